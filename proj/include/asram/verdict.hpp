#pragma once

namespace asram {

// Shared verdict vocabulary for the escalation harnesses. Stabilisation is
// evidence, not proof: it reports that the final confirmation runs agreed.
enum class VerdictKind { Stabilized, Unstable, ResourceExceeded };

inline const char* verdict_name(VerdictKind v) {
    switch (v) {
        case VerdictKind::Stabilized: return "stabilized";
        case VerdictKind::Unstable: return "unstable";
        case VerdictKind::ResourceExceeded: return "resource_exceeded";
    }
    return "?";
}

}  // namespace asram
