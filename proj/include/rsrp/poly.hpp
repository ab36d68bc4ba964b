#pragma once

// Univariate polynomials over F_p: arithmetic, irreducibility (Rabin's test),
// deterministic irreducible search, and Newton power sums of roots.

#include <cstdint>
#include <utility>
#include <vector>

#include "rsrp/errors.hpp"
#include "rsrp/fp.hpp"

namespace rsrp {

class Poly {
public:
    // Coefficients lowest degree first; reduced mod p and trimmed to canonical form.
    Poly(PrimeField field, std::vector<residue_t> coeffs) : field_(field), coeffs_(std::move(coeffs)) {
        for (auto& c : coeffs_) c = field_.reduce(c);
        trim();
    }

    static Poly zero(PrimeField f) { return Poly(f, {}); }
    static Poly one(PrimeField f) { return Poly(f, {1}); }
    static Poly x(PrimeField f) { return Poly(f, {0, 1}); }

    static Poly monomial(PrimeField f, unsigned degree, residue_t c = 1) {
        std::vector<residue_t> v(degree + 1, 0);
        v[degree] = c;
        return Poly(f, std::move(v));
    }

    const PrimeField& field() const { return field_; }
    const std::vector<residue_t>& coeffs() const { return coeffs_; }

    // -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }

    residue_t coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0; }

    bool operator==(const Poly& o) const { return field_ == o.field_ && coeffs_ == o.coeffs_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator+(const Poly& o) const {
        check_field(o);
        std::vector<residue_t> r(std::max(coeffs_.size(), o.coeffs_.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_.add(coeff(i), o.coeff(i));
        return Poly(field_, std::move(r));
    }

    Poly operator-(const Poly& o) const {
        check_field(o);
        std::vector<residue_t> r(std::max(coeffs_.size(), o.coeffs_.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_.sub(coeff(i), o.coeff(i));
        return Poly(field_, std::move(r));
    }

    Poly operator*(const Poly& o) const {
        check_field(o);
        if (is_zero() || o.is_zero()) return zero(field_);
        std::vector<residue_t> r(coeffs_.size() + o.coeffs_.size() - 1, 0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
                r[i + j] = field_.add(r[i + j], field_.mul(coeffs_[i], o.coeffs_[j]));
        }
        return Poly(field_, std::move(r));
    }

    Poly scaled(residue_t c) const {
        std::vector<residue_t> r(coeffs_);
        for (auto& v : r) v = field_.mul(v, c);
        return Poly(field_, std::move(r));
    }

    Poly monic() const {
        if (is_zero()) throw invalid_input("Poly::monic: zero polynomial");
        return scaled(field_.inv(coeffs_.back()));
    }

    std::pair<Poly, Poly> divmod(const Poly& d) const {
        check_field(d);
        if (d.is_zero()) throw invalid_input("Poly::divmod: division by zero polynomial");
        if (degree() < d.degree()) return {zero(field_), *this};
        std::vector<residue_t> rem(coeffs_);
        std::vector<residue_t> quot(coeffs_.size() - d.coeffs_.size() + 1, 0);
        residue_t lead_inv = field_.inv(d.coeffs_.back());
        for (int i = static_cast<int>(rem.size()) - 1; i >= static_cast<int>(d.coeffs_.size()) - 1; --i) {
            residue_t q = field_.mul(rem[i], lead_inv);
            if (q == 0) continue;
            quot[i - d.degree()] = q;
            for (std::size_t j = 0; j < d.coeffs_.size(); ++j)
                rem[i - d.degree() + j] = field_.sub(rem[i - d.degree() + j], field_.mul(q, d.coeffs_[j]));
        }
        return {Poly(field_, std::move(quot)), Poly(field_, std::move(rem))};
    }

    Poly mod(const Poly& d) const { return divmod(d).second; }

    residue_t eval(residue_t at) const {
        residue_t acc = 0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = field_.add(field_.mul(acc, at), coeffs_[i]);
        return acc;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    void check_field(const Poly& o) const {
        if (field_ != o.field_) throw invalid_input("Poly: operands live in different fields");
    }

    PrimeField field_;
    std::vector<residue_t> coeffs_;
};

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& m) { return (a * b).mod(m); }

// a^e mod m, e a machine word.
inline Poly powmod(const Poly& a, std::uint64_t e, const Poly& m) {
    Poly r = Poly::one(a.field());
    Poly base = a.mod(m);
    while (e) {
        if (e & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

namespace detail {

// x^(p^iters) mod f via iterated p-th powering (Frobenius is a ring map on F_p[x]/(f)).
inline Poly frobenius_power(const Poly& f, unsigned iters) {
    Poly g = Poly::x(f.field()).mod(f);
    for (unsigned i = 0; i < iters; ++i) g = powmod(g, f.field().p(), f);
    return g;
}

inline std::vector<unsigned> prime_divisors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace detail

inline Poly poly_gcd(const Poly& f, const Poly& g) {
    if (f.is_zero() && g.is_zero()) throw invalid_input("poly_gcd: both arguments zero");
    Poly a = f, b = g;
    while (!b.is_zero()) {
        Poly r = a.mod(b);
        a = b;
        b = r;
    }
    return a.monic();
}

// Rabin's criterion: f irreducible over F_p iff x^(p^d) = x (mod f) and
// gcd(x^(p^(d/t)) - x, f) = 1 for every prime t | d.
inline bool is_irreducible(const Poly& f) {
    if (f.degree() < 1) throw invalid_input("is_irreducible: degree must be >= 1");
    Poly m = f.monic();
    unsigned d = static_cast<unsigned>(m.degree());
    Poly x = Poly::x(m.field()).mod(m);
    if (detail::frobenius_power(m, d) != x) return false;
    for (unsigned t : detail::prime_divisors(d)) {
        Poly g = detail::frobenius_power(m, d / t) - x;
        if (g.is_zero() || poly_gcd(g, m).degree() != 0) return false;
    }
    return true;
}

// Lexicographically smallest monic irreducible of the given degree, the lower
// coefficients enumerated as base-p digits; deterministic by construction.
inline Poly find_irreducible(PrimeField field, unsigned degree) {
    if (degree == 0) throw invalid_input("find_irreducible: degree must be >= 1");
    const std::uint64_t p = field.p();
    std::vector<residue_t> coeffs(degree + 1, 0);
    coeffs[degree] = 1;
    for (;;) {
        Poly cand(field, coeffs);
        if (cand.degree() == static_cast<int>(degree) && is_irreducible(cand)) return cand;
        // increment the low digits
        std::size_t i = 0;
        while (i < degree) {
            if (++coeffs[i] < p) break;
            coeffs[i] = 0;
            ++i;
        }
        if (i == degree) throw error("find_irreducible: search exhausted");  // unreachable
    }
}

// Power sums t_a of the roots of a monic f, a = 0..max_exponent, via the
// division-free Newton recurrence over F_p.
inline std::vector<residue_t> power_sums(const Poly& f, unsigned max_exponent) {
    if (!f.is_monic()) throw invalid_input("power_sums: polynomial must be monic");
    const PrimeField& F = f.field();
    const unsigned d = static_cast<unsigned>(f.degree());
    std::vector<residue_t> t(max_exponent + 1, 0);
    t[0] = F.reduce(d);
    for (unsigned a = 1; a <= max_exponent; ++a) {
        residue_t acc = 0;
        unsigned upper = std::min(a - 1, d);
        for (unsigned j = 1; j <= upper; ++j) acc = F.add(acc, F.mul(f.coeff(d - j), t[a - j]));
        if (a <= d) acc = F.add(acc, F.mul(F.reduce(a), f.coeff(d - a)));
        t[a] = F.neg(acc);
    }
    return t;
}

}  // namespace rsrp
