#pragma once

// Prime field F_p: residue arithmetic and deterministic primality testing.

#include <cstdint>
#include <string>

#include "rsrp/errors.hpp"

namespace rsrp {

using residue_t = std::uint32_t;

namespace detail {

inline std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// Deterministic Miller-Rabin; the witness set below decides every n < 2^64.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = detail::powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int j = 0; j + 1 < r; ++j) {
            x = detail::mulmod64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

class PrimeField {
public:
    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (p >= (1ull << 32))
            throw parameter_error("PrimeField: modulus " + std::to_string(p) + " exceeds 2^32");
        if (!is_prime(p))
            throw parameter_error("PrimeField: modulus " + std::to_string(p) + " is not prime");
    }

    std::uint64_t p() const { return p_; }

    residue_t reduce(std::uint64_t v) const { return static_cast<residue_t>(v % p_); }

    residue_t add(residue_t a, residue_t b) const {
        std::uint64_t s = std::uint64_t(a) + b;
        return s >= p_ ? residue_t(s - p_) : residue_t(s);
    }

    residue_t sub(residue_t a, residue_t b) const {
        return a >= b ? residue_t(a - b) : residue_t(a + p_ - b);
    }

    residue_t neg(residue_t a) const { return a == 0 ? 0 : residue_t(p_ - a); }

    residue_t mul(residue_t a, residue_t b) const {
        return static_cast<residue_t>((std::uint64_t(a) * b) % p_);
    }

    residue_t pow(residue_t a, std::uint64_t e) const {
        return static_cast<residue_t>(detail::powmod64(a, e, p_));
    }

    residue_t inv(residue_t a) const {
        if (a == 0) throw invalid_input("PrimeField::inv: division by zero");
        return pow(a, p_ - 2);
    }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }
    bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

private:
    std::uint64_t p_;
};

}  // namespace rsrp
