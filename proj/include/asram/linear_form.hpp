#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asram/value.hpp"

namespace asram {

// Formal expression a0 + sum_i a_i * w_i over symbols w_1, w_2, ... where
// each w_i is assumed to dominate every coefficient-weighted combination of
// lower-indexed symbols. Index 0 is the constant term. Normalised: zero
// coefficients are not stored.
class LinearForm {
public:
    LinearForm() = default;

    static LinearForm constant(Value c) {
        LinearForm f;
        f.set_coeff(0, std::move(c));
        return f;
    }

    static LinearForm symbol(std::size_t index, Value coeff = Value(1)) {
        if (index == 0) throw std::invalid_argument("symbol index starts at 1");
        LinearForm f;
        f.set_coeff(index, std::move(coeff));
        return f;
    }

    Value coeff(std::size_t index) const {
        auto it = coeffs_.find(index);
        return it == coeffs_.end() ? Value() : it->second;
    }

    void set_coeff(std::size_t index, Value v) {
        if (v.is_zero())
            coeffs_.erase(index);
        else
            coeffs_[index] = std::move(v);
    }

    // Highest index with a nonzero coefficient; 0 for the zero form.
    std::size_t max_index() const {
        return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
    }

    bool is_zero() const { return coeffs_.empty(); }

    const std::map<std::size_t, Value>& coeffs() const { return coeffs_; }

    friend bool operator==(const LinearForm&, const LinearForm&) = default;

    std::string to_string() const {
        if (coeffs_.empty()) return "0";
        std::string out;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            if (!out.empty()) out += " + ";
            if (it->first == 0) {
                out += it->second.to_decimal();
            } else {
                if (!(it->second == Value(1))) out += it->second.to_decimal() + "*";
                out += "w" + std::to_string(it->first);
            }
        }
        return out;
    }

private:
    std::map<std::size_t, Value> coeffs_;
};

inline LinearForm lf_add(const LinearForm& p, const LinearForm& q) {
    LinearForm r = p;
    for (const auto& [idx, c] : q.coeffs()) r.set_coeff(idx, add(r.coeff(idx), c));
    return r;
}

enum class Ordering { Less, Equal, Greater };

// Compares coefficient vectors from the highest occurring index downward;
// the first unequal coefficient decides. Sound whenever each symbol
// dominates every combination of the lower ones, which is exactly the
// assumption the symbols carry.
inline Ordering lf_compare(const LinearForm& p, const LinearForm& q) {
    std::size_t top = std::max(p.max_index(), q.max_index());
    for (std::size_t i = top + 1; i-- > 0;) {
        Value a = p.coeff(i);
        Value b = q.coeff(i);
        if (a < b) return Ordering::Less;
        if (b < a) return Ordering::Greater;
    }
    return Ordering::Equal;
}

// Numeric evaluation under concrete witnesses; witnesses[i-1] instantiates
// w_i. The independent check on lf_compare.
inline Value lf_instantiate(const LinearForm& p, std::span<const Value> witnesses) {
    mpz_class acc = p.coeff(0).mpz();
    for (const auto& [idx, c] : p.coeffs()) {
        if (idx == 0) continue;
        if (idx > witnesses.size())
            throw std::invalid_argument("missing witness for w" + std::to_string(idx));
        mpz_addmul(acc.get_mpz_t(), c.mpz().get_mpz_t(), witnesses[idx - 1].mpz().get_mpz_t());
    }
    return Value(std::move(acc));
}

}  // namespace asram
