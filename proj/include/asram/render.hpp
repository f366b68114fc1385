#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "asram/value.hpp"

namespace asram {

// Threshold above which values are shown as 2^e or as a bit-length instead
// of full decimal.
inline constexpr std::size_t kRenderBitThreshold = 512;

// Human rendering: decimal up to the threshold, "2^e" for exact powers of
// two, "[N bits]" otherwise. Never converts huge values to decimal.
inline std::string render_value(const Value& v, std::size_t threshold = kRenderBitThreshold) {
    if (v.bits() <= threshold) return v.to_decimal();
    if (auto e = v.pow2_exponent()) return "2^" + std::to_string(*e);
    return "[" + std::to_string(v.bits()) + " bits]";
}

// Short preview for trace records: decimal truncated to `width` characters.
// Values too wide to convert cheaply fall back to the render form.
inline std::string preview_value(const Value& v, std::size_t width) {
    if (v.bits() > 4096) return render_value(v);
    std::string s = v.to_decimal();
    if (s.size() <= width) return s;
    std::string out = s.substr(0, width);
    out += "...(" + std::to_string(s.size()) + " digits)";
    return out;
}

// Stable content hash used to identify programs in machine-readable run
// records (FNV-1a, 64-bit).
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace asram
