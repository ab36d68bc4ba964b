#pragma once

// Arithmetic in the composite extension K = F_p(a_1,...,a_n)(b), represented as
// a tensor product of coprime-degree extensions. Elements are coefficient
// tensors over F_p indexed by (a_1,...,a_n,b) in row-major order (a_1 slowest,
// b fastest). Subfield structure (the F_i and their traces) is visible as
// monomial support, which keeps membership tests and repair-field selection a
// matter of reading coefficients.

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rsrp/errors.hpp"
#include "rsrp/fp.hpp"
#include "rsrp/linalg.hpp"
#include "rsrp/poly.hpp"

namespace rsrp {

class TowerSpec;
class KElement;

namespace detail {

struct TowerFactor {
    Poly min_poly;
    unsigned deg = 0;
    std::size_t stride = 0;      // packed stride
    std::size_t raw_stride = 0;  // stride in the unreduced convolution tensor
    // red[e] = coefficients of x^e mod min_poly, e in [0, 2*deg-2], each length deg
    std::vector<std::vector<residue_t>> red;
    std::vector<residue_t> psums;  // power sums of the roots, exponents 0..deg-1
    std::vector<residue_t> frob;   // deg x deg, column a = x^(a*p) mod min_poly

    TowerFactor(PrimeField base, Poly m) : min_poly(std::move(m)), deg(static_cast<unsigned>(min_poly.degree())) {
        red.resize(2 * deg - 1);
        for (unsigned e = 0; e < 2 * deg - 1; ++e) {
            Poly r = Poly::monomial(base, e).mod(min_poly);
            red[e].assign(deg, 0);
            for (unsigned t = 0; t < deg; ++t) red[e][t] = r.coeff(t);
        }
        psums = power_sums(min_poly, deg == 1 ? 0u : deg - 1);
        frob.assign(std::size_t(deg) * deg, 0);
        for (unsigned a = 0; a < deg; ++a) {
            Poly fa = powmod(Poly::monomial(base, a), base.p(), min_poly);
            for (unsigned t = 0; t < deg; ++t) frob[std::size_t(a) * deg + t] = fa.coeff(t);
        }
    }
};

}  // namespace detail

// The subfield F_i = F_p(a_j : j != i) of the tower, with the trace tables of
// Tr_{K/F_i} evaluated per monomial through the power sums of the minimal
// polynomials (tower transitivity: Tr_{K/F_i} = Tr_{F/F_i} . Tr_{K/F}).
class SubfieldView {
public:
    SubfieldView(const TowerSpec& tower, std::size_t excluded_axis);

    const TowerSpec& tower() const { return *tower_; }
    std::size_t excluded_axis() const { return axis_; }
    // d_i = prod_{j != i} p_j
    std::size_t degree() const { return degree_; }
    // [K : F_i] = s * p_i
    std::size_t codegree() const { return codegree_; }

    // packed tower index of the r-th basis monomial of F_i, canonical order
    const std::vector<std::uint32_t>& monomials() const { return monomials_; }
    const std::vector<std::uint32_t>& trace_target() const { return target_; }
    const std::vector<residue_t>& trace_factor() const { return factor_; }

    bool contains(const KElement& x) const;
    // F_i coordinates in canonical monomial order; requires membership
    std::vector<residue_t> coords(const KElement& x) const;
    KElement embed(const std::vector<residue_t>& coords) const;

private:
    const TowerSpec* tower_;
    std::size_t axis_;
    std::size_t degree_, codegree_;
    std::vector<std::uint32_t> monomials_;
    std::vector<std::uint32_t> target_;
    std::vector<residue_t> factor_;
};

class TowerSpec {
public:
    // Prefer make_tower / make_tower_from_polys; the constructor checks the
    // same invariants but does not wrap the result in a shared_ptr.
    TowerSpec(PrimeField base, std::vector<Poly> axis_polys, std::optional<Poly> top_poly)
        : base_(base) {
        if (base_.p() >= 256)
            throw parameter_error("TowerSpec: base prime must be < 256 (one-byte coefficient storage)");
        if (axis_polys.empty()) throw parameter_error("TowerSpec: at least one axis required");
        for (const Poly& m : axis_polys) {
            if (m.field() != base_) throw parameter_error("TowerSpec: axis polynomial over wrong field");
            if (!m.is_monic() || m.degree() < 2 || !is_irreducible(m))
                throw parameter_error("TowerSpec: axis polynomials must be monic irreducible of degree >= 2");
            if (!is_prime(static_cast<std::uint64_t>(m.degree())))
                throw parameter_error("TowerSpec: axis degrees must be prime");
        }
        for (std::size_t i = 0; i < axis_polys.size(); ++i)
            for (std::size_t j = i + 1; j < axis_polys.size(); ++j)
                if (axis_polys[i].degree() == axis_polys[j].degree())
                    throw parameter_error("TowerSpec: repeated axis degree " +
                                          std::to_string(axis_polys[i].degree()) +
                                          " (tensor product would not be a field)");
        if (top_poly) {
            if (top_poly->field() != base_) throw parameter_error("TowerSpec: top polynomial over wrong field");
            if (!top_poly->is_monic() || top_poly->degree() < 2 || !is_irreducible(*top_poly))
                throw parameter_error("TowerSpec: top polynomial must be monic irreducible of degree >= 2");
            for (const Poly& m : axis_polys)
                if (std::gcd<long, long>(top_poly->degree(), m.degree()) != 1)
                    throw parameter_error("TowerSpec: top degree must be coprime to every axis degree");
        }

        axes_ = axis_polys.size();
        for (Poly& m : axis_polys) factors_.emplace_back(base_, std::move(m));
        if (top_poly) factors_.emplace_back(base_, std::move(*top_poly));
        has_top_ = top_poly.has_value();

        total_ = 1;
        raw_size_ = 1;
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
            it->stride = total_;
            it->raw_stride = raw_size_;
            total_ *= it->deg;
            raw_size_ *= 2 * it->deg - 1;
        }

        exps_.assign(factors_.size(), std::vector<std::uint16_t>(total_));
        raw_offset_.assign(total_, 0);
        for (std::size_t idx = 0; idx < total_; ++idx) {
            std::size_t rem = idx;
            std::size_t off = 0;
            for (std::size_t f = 0; f < factors_.size(); ++f) {
                std::size_t e = rem / factors_[f].stride;
                rem %= factors_[f].stride;
                exps_[f][idx] = static_cast<std::uint16_t>(e);
                off += e * factors_[f].raw_stride;
            }
            raw_offset_[idx] = static_cast<std::uint32_t>(off);
        }

        views_.reserve(axes_);
        for (std::size_t i = 0; i < axes_; ++i) views_.emplace_back(*this, i);
    }

    TowerSpec(const TowerSpec&) = delete;
    TowerSpec& operator=(const TowerSpec&) = delete;

    const PrimeField& base() const { return base_; }
    std::size_t axis_count() const { return axes_; }
    bool has_top() const { return has_top_; }
    unsigned s() const { return has_top_ ? factors_.back().deg : 1; }
    // L = s * prod p_i
    std::size_t total_degree() const { return total_; }

    const Poly& axis_poly(std::size_t i) const { return factors_.at(i).min_poly; }
    unsigned axis_degree(std::size_t i) const { return factors_.at(i).deg; }
    const Poly* top_poly() const { return has_top_ ? &factors_.back().min_poly : nullptr; }

    const SubfieldView& subfield(std::size_t i) const {
        if (i >= axes_) throw invalid_input("TowerSpec::subfield: axis out of range");
        return views_[i];
    }

    // internal layout accessors
    std::size_t factor_count() const { return factors_.size(); }
    const detail::TowerFactor& factor(std::size_t f) const { return factors_[f]; }
    std::uint16_t exponent(std::size_t f, std::size_t idx) const { return exps_[f][idx]; }
    std::size_t raw_size() const { return raw_size_; }
    std::uint32_t raw_offset(std::size_t idx) const { return raw_offset_[idx]; }

    bool same_layout(const TowerSpec& o) const {
        if (this == &o) return true;
        if (base_ != o.base_ || factors_.size() != o.factors_.size() || has_top_ != o.has_top_) return false;
        for (std::size_t f = 0; f < factors_.size(); ++f)
            if (factors_[f].min_poly != o.factors_[f].min_poly) return false;
        return true;
    }

private:
    PrimeField base_;
    std::vector<detail::TowerFactor> factors_;  // prime axes, then the optional top axis
    std::size_t axes_ = 0;
    bool has_top_ = false;
    std::size_t total_ = 0;
    std::size_t raw_size_ = 0;
    std::vector<std::vector<std::uint16_t>> exps_;
    std::vector<std::uint32_t> raw_offset_;
    std::vector<SubfieldView> views_;
};

class KElement {
public:
    explicit KElement(const TowerSpec* tower) : tower_(tower), c_(tower->total_degree(), 0) {}

    static KElement zero(const TowerSpec& t) { return KElement(&t); }

    static KElement scalar(const TowerSpec& t, residue_t v) {
        KElement e(&t);
        e.c_[0] = static_cast<std::uint8_t>(t.base().reduce(v));
        return e;
    }

    static KElement one(const TowerSpec& t) { return scalar(t, 1); }

    // generator of prime axis i (the unit monomial a_i)
    static KElement axis_generator(const TowerSpec& t, std::size_t i) {
        if (i >= t.axis_count()) throw invalid_input("axis_generator: axis out of range");
        KElement e(&t);
        e.c_[t.factor(i).stride] = 1;
        return e;
    }

    // generator of the top axis (b)
    static KElement top_generator(const TowerSpec& t) {
        if (!t.has_top()) throw invalid_input("top_generator: tower has no top axis");
        KElement e(&t);
        e.c_[t.factor(t.factor_count() - 1).stride] = 1;
        return e;
    }

    template <class Rng>
    static KElement random(const TowerSpec& t, Rng& rng) {
        std::uniform_int_distribution<std::uint32_t> dist(0, static_cast<std::uint32_t>(t.base().p() - 1));
        KElement e(&t);
        for (auto& c : e.c_) c = static_cast<std::uint8_t>(dist(rng));
        return e;
    }

    const TowerSpec& tower() const { return *tower_; }
    std::size_t size() const { return c_.size(); }
    residue_t operator[](std::size_t i) const { return c_[i]; }

    void set(std::size_t i, residue_t v) { c_[i] = static_cast<std::uint8_t>(tower_->base().reduce(v)); }

    bool is_zero() const {
        for (auto c : c_)
            if (c) return false;
        return true;
    }

    bool operator==(const KElement& o) const {
        check_tower(o);
        return c_ == o.c_;
    }
    bool operator!=(const KElement& o) const { return !(*this == o); }

    KElement operator+(const KElement& o) const {
        check_tower(o);
        const PrimeField& F = tower_->base();
        KElement r(tower_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = static_cast<std::uint8_t>(F.add(c_[i], o.c_[i]));
        return r;
    }

    KElement operator-(const KElement& o) const {
        check_tower(o);
        const PrimeField& F = tower_->base();
        KElement r(tower_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = static_cast<std::uint8_t>(F.sub(c_[i], o.c_[i]));
        return r;
    }

    KElement& operator+=(const KElement& o) {
        check_tower(o);
        const PrimeField& F = tower_->base();
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = static_cast<std::uint8_t>(F.add(c_[i], o.c_[i]));
        return *this;
    }

    KElement neg() const {
        const PrimeField& F = tower_->base();
        KElement r(tower_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = static_cast<std::uint8_t>(F.neg(c_[i]));
        return r;
    }

    KElement scaled(residue_t v) const {
        const PrimeField& F = tower_->base();
        residue_t s = F.reduce(v);
        KElement r(tower_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = static_cast<std::uint8_t>(F.mul(c_[i], s));
        return r;
    }

    // Multivariate convolution followed by per-axis reduction.
    KElement operator*(const KElement& o) const {
        check_tower(o);
        const TowerSpec& T = *tower_;
        const std::uint64_t p = T.base().p();
        std::vector<std::uint64_t> raw(T.raw_size(), 0);

        if (p == 2) {
            const std::size_t raw_words = (T.raw_size() + 63) / 64;
            std::vector<std::uint64_t> yraw(raw_words, 0), acc(raw_words, 0);
            for (std::size_t c = 0; c < c_.size(); ++c)
                if (o.c_[c]) yraw[T.raw_offset(c) / 64] |= 1ull << (T.raw_offset(c) % 64);
            for (std::size_t c = 0; c < c_.size(); ++c) {
                if (!c_[c]) continue;
                const std::size_t k = T.raw_offset(c);
                const std::size_t wk = k / 64, bs = k % 64;
                if (bs == 0) {
                    for (std::size_t w = 0; w + wk < raw_words; ++w) acc[w + wk] ^= yraw[w];
                } else {
                    for (std::size_t w = 0; w + wk < raw_words; ++w) {
                        acc[w + wk] ^= yraw[w] << bs;
                        if (w + wk + 1 < raw_words) acc[w + wk + 1] ^= yraw[w] >> (64 - bs);
                    }
                }
            }
            for (std::size_t i = 0; i < T.raw_size(); ++i) raw[i] = (acc[i / 64] >> (i % 64)) & 1;
        } else {
            std::vector<std::pair<std::uint32_t, std::uint32_t>> xs, ys;
            xs.reserve(c_.size());
            ys.reserve(c_.size());
            for (std::size_t c = 0; c < c_.size(); ++c) {
                if (c_[c]) xs.emplace_back(T.raw_offset(c), c_[c]);
                if (o.c_[c]) ys.emplace_back(T.raw_offset(c), o.c_[c]);
            }
            for (const auto& [ox, vx] : xs)
                for (const auto& [oy, vy] : ys) raw[std::size_t(ox) + oy] += std::uint64_t(vx) * vy;
        }

        reduce_raw(T, raw);
        KElement r(tower_);
        for (std::size_t idx = 0; idx < c_.size(); ++idx)
            r.c_[idx] = static_cast<std::uint8_t>(raw[T.raw_offset(idx)] % p);
        return r;
    }

    // Multiply by generator_f^e (any e >= 0); one O(L) pass per unit step.
    KElement shifted(std::size_t f, std::size_t e = 1) const {
        KElement r = *this;
        for (std::size_t step = 0; step < e; ++step) r = r.shift_once(f);
        return r;
    }

    // x -> x^p, applied factor by factor (Frobenius acts per tensor axis).
    KElement frobenius() const {
        const TowerSpec& T = *tower_;
        const PrimeField& F = T.base();
        std::vector<std::uint32_t> cur(c_.begin(), c_.end()), next(c_.size());
        for (std::size_t f = 0; f < T.factor_count(); ++f) {
            const auto& fac = T.factor(f);
            const std::size_t dim = fac.deg, stride = fac.stride;
            const std::size_t block = dim * stride;
            std::fill(next.begin(), next.end(), 0u);
            for (std::size_t base = 0; base < c_.size(); base += block) {
                for (std::size_t inner = 0; inner < stride; ++inner) {
                    for (std::size_t a = 0; a < dim; ++a) {
                        std::uint32_t v = cur[base + a * stride + inner];
                        if (!v) continue;
                        const residue_t* col = &fac.frob[a * dim];
                        for (std::size_t t = 0; t < dim; ++t) {
                            if (col[t])
                                next[base + t * stride + inner] =
                                    F.add(next[base + t * stride + inner], F.mul(v, col[t]));
                        }
                    }
                }
            }
            std::swap(cur, next);
        }
        KElement r(tower_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = static_cast<std::uint8_t>(cur[i]);
        return r;
    }

    KElement pow(std::uint64_t e) const {
        KElement r = one(*tower_);
        KElement b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    std::vector<residue_t> as_base_vector() const { return std::vector<residue_t>(c_.begin(), c_.end()); }

    static KElement from_base_vector(const TowerSpec& t, const std::vector<residue_t>& v) {
        if (v.size() != t.total_degree())
            throw invalid_input("from_base_vector: expected length " + std::to_string(t.total_degree()));
        KElement e(&t);
        for (std::size_t i = 0; i < v.size(); ++i) e.c_[i] = static_cast<std::uint8_t>(t.base().reduce(v[i]));
        return e;
    }

    // Serialized form: base-p coefficients in monomial order; bit-packed
    // little-endian for p = 2 (index 0 = least significant bit of byte 0).
    std::vector<std::uint8_t> to_bytes() const {
        if (tower_->base().p() == 2) {
            std::vector<std::uint8_t> out((c_.size() + 7) / 8, 0);
            for (std::size_t i = 0; i < c_.size(); ++i)
                if (c_[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
            return out;
        }
        return c_;
    }

    static std::size_t byte_size(const TowerSpec& t) {
        return t.base().p() == 2 ? (t.total_degree() + 7) / 8 : t.total_degree();
    }

    static KElement from_bytes(const TowerSpec& t, const std::uint8_t* data, std::size_t len) {
        if (len != byte_size(t)) throw invalid_input("KElement::from_bytes: wrong length");
        KElement e(&t);
        if (t.base().p() == 2) {
            for (std::size_t i = 0; i < e.c_.size(); ++i) e.c_[i] = (data[i / 8] >> (i % 8)) & 1;
        } else {
            for (std::size_t i = 0; i < e.c_.size(); ++i) {
                if (data[i] >= t.base().p()) throw corruption_error("KElement::from_bytes: coefficient out of range");
                e.c_[i] = data[i];
            }
        }
        return e;
    }

private:
    void check_tower(const KElement& o) const {
        if (tower_ != o.tower_) throw invalid_input("KElement: operands from different towers");
    }

    KElement shift_once(std::size_t f) const {
        const TowerSpec& T = *tower_;
        const PrimeField& F = T.base();
        const auto& fac = T.factor(f);
        const std::size_t dim = fac.deg, stride = fac.stride;
        std::vector<std::uint32_t> out(c_.size(), 0);
        const auto& fold = fac.red[dim];  // x^dim mod m
        for (std::size_t idx = 0; idx < c_.size(); ++idx) {
            std::uint32_t v = c_[idx];
            if (!v) continue;
            const std::size_t e = T.exponent(f, idx);
            if (e + 1 < dim) {
                out[idx + stride] = F.add(out[idx + stride], v);
            } else {
                const std::size_t base = idx - e * stride;
                for (std::size_t t = 0; t < dim; ++t)
                    if (fold[t]) out[base + t * stride] = F.add(out[base + t * stride], F.mul(v, fold[t]));
            }
        }
        KElement r(tower_);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = static_cast<std::uint8_t>(out[i]);
        return r;
    }

    static void reduce_raw(const TowerSpec& T, std::vector<std::uint64_t>& raw) {
        const std::uint64_t p = T.base().p();
        for (std::size_t f = 0; f < T.factor_count(); ++f) {
            const auto& fac = T.factor(f);
            const std::size_t dim = fac.deg;
            const std::size_t rs = fac.raw_stride;
            const std::size_t extent = 2 * dim - 1;
            const std::size_t block = extent * rs;
            for (std::size_t e = extent - 1; e >= dim; --e) {
                const auto& row = fac.red[e];
                for (std::size_t base = 0; base < raw.size(); base += block) {
                    std::uint64_t* high = &raw[base + e * rs];
                    for (std::size_t inner = 0; inner < rs; ++inner) {
                        std::uint64_t v = high[inner] % p;
                        high[inner] = 0;
                        if (!v) continue;
                        for (std::size_t t = 0; t < dim; ++t)
                            if (row[t]) raw[base + t * rs + inner] += v * row[t];
                    }
                }
            }
        }
    }

    const TowerSpec* tower_;
    std::vector<std::uint8_t> c_;
};

inline SubfieldView::SubfieldView(const TowerSpec& tower, std::size_t excluded_axis)
    : tower_(&tower), axis_(excluded_axis) {
    const std::size_t L = tower.total_degree();
    const PrimeField& F = tower.base();
    const auto& ax = tower.factor(axis_);
    const std::size_t top = tower.factor_count() - 1;
    const bool has_top = tower.has_top();

    degree_ = 1;
    for (std::size_t j = 0; j < tower.axis_count(); ++j)
        if (j != axis_) degree_ *= tower.factor(j).deg;
    codegree_ = L / degree_;

    target_.resize(L);
    factor_.resize(L);
    monomials_.reserve(degree_);
    const std::vector<residue_t>* top_psums = has_top ? &tower.factor(top).psums : nullptr;
    for (std::size_t idx = 0; idx < L; ++idx) {
        const std::size_t ea = tower.exponent(axis_, idx);
        const std::size_t eb = has_top ? tower.exponent(top, idx) : 0;
        target_[idx] = static_cast<std::uint32_t>(idx - ea * ax.stride -
                                                  (has_top ? eb * tower.factor(top).stride : 0));
        residue_t fct = ax.psums[ea];
        if (top_psums) fct = F.mul(fct, (*top_psums)[eb]);
        factor_[idx] = fct;
        if (ea == 0 && eb == 0) monomials_.push_back(static_cast<std::uint32_t>(idx));
    }
}

inline bool SubfieldView::contains(const KElement& x) const {
    const TowerSpec& T = *tower_;
    for (std::size_t idx = 0; idx < x.size(); ++idx)
        if (x[idx] && target_[idx] != idx) return false;
    (void)T;
    return true;
}

inline std::vector<residue_t> SubfieldView::coords(const KElement& x) const {
    if (!contains(x)) throw invalid_input("SubfieldView::coords: element not in the subfield");
    std::vector<residue_t> out(degree_);
    for (std::size_t r = 0; r < degree_; ++r) out[r] = x[monomials_[r]];
    return out;
}

inline KElement SubfieldView::embed(const std::vector<residue_t>& coords) const {
    if (coords.size() != degree_) throw invalid_input("SubfieldView::embed: expected length " + std::to_string(degree_));
    KElement e = KElement::zero(*tower_);
    for (std::size_t r = 0; r < degree_; ++r) e.set(monomials_[r], coords[r]);
    return e;
}

// Tr_{K/F_i}(x): per monomial, t^(i)_{a_i} * e_b times the F_i-monomial part.
inline KElement trace_to_subfield(const KElement& x, const SubfieldView& view) {
    if (&x.tower() != &view.tower()) throw invalid_input("trace_to_subfield: tower mismatch");
    const PrimeField& F = x.tower().base();
    const auto& target = view.trace_target();
    const auto& factor = view.trace_factor();
    KElement out = KElement::zero(x.tower());
    for (std::size_t idx = 0; idx < x.size(); ++idx) {
        if (!x[idx] || !factor[idx]) continue;
        const std::size_t t = target[idx];
        out.set(t, F.add(out[t], F.mul(x[idx], factor[idx])));
    }
    return out;
}

// making a tower: axis polynomials are chosen deterministically
// (lexicographically smallest monic irreducible of each degree).
inline std::shared_ptr<const TowerSpec> make_tower(PrimeField base, const std::vector<unsigned>& axis_degrees,
                                                   std::optional<unsigned> s = std::nullopt) {
    std::vector<Poly> axis_polys;
    axis_polys.reserve(axis_degrees.size());
    for (unsigned d : axis_degrees) axis_polys.push_back(find_irreducible(base, d));
    std::optional<Poly> top;
    if (s) {
        if (*s < 2) throw parameter_error("make_tower: top degree must be >= 2 when present");
        top = find_irreducible(base, *s);
    }
    return std::make_shared<const TowerSpec>(base, std::move(axis_polys), std::move(top));
}

inline std::shared_ptr<const TowerSpec> make_tower_from_polys(PrimeField base, std::vector<Poly> axis_polys,
                                                              std::optional<Poly> top_poly) {
    return std::make_shared<const TowerSpec>(base, std::move(axis_polys), std::move(top_poly));
}

// Rank of the set as vectors in F_p^L.
inline std::size_t rank_over_base(const std::vector<KElement>& elements) {
    if (elements.empty()) return 0;
    const TowerSpec& T = elements.front().tower();
    FpMatrix m(T.base(), elements.size(), T.total_degree());
    for (std::size_t r = 0; r < elements.size(); ++r) {
        const KElement& e = elements[r];
        if (&e.tower() != &T) throw invalid_input("rank_over_base: mixed towers");
        for (std::size_t c = 0; c < e.size(); ++c)
            if (e[c]) m.set(r, c, e[c]);
    }
    return m.rank();
}

// Visits u * gamma_idx for every basis monomial gamma_idx, in increasing packed
// index order; each step is a single generator shift from an earlier product.
template <class Visitor>
void for_each_basis_multiple(const KElement& u, Visitor&& visit) {
    const TowerSpec& T = u.tower();
    std::size_t counter = 0;
    auto rec = [&](auto&& self, std::size_t f, const KElement& cur) -> void {
        if (f == T.factor_count()) {
            visit(counter++, cur);
            return;
        }
        self(self, f + 1, cur);
        KElement acc = cur;
        for (std::size_t e = 1; e < T.factor(f).deg; ++e) {
            acc = acc.shifted(f);
            self(self, f + 1, acc);
        }
    };
    rec(rec, 0, u);
}

// Multiplicative inverse via the multiplication-by-x linear system.
inline KElement inv(const KElement& x) {
    if (x.is_zero()) throw invalid_input("inv: division by zero");
    const TowerSpec& T = x.tower();
    const std::size_t L = T.total_degree();
    FpMatrix m(T.base(), L, L);
    for_each_basis_multiple(x, [&](std::size_t col, const KElement& prod) {
        for (std::size_t r = 0; r < L; ++r)
            if (prod[r]) m.set(r, col, prod[r]);
    });
    auto minv = m.inverse();
    if (!minv) throw error("inv: multiplication map singular (tower is not a field?)");
    std::vector<residue_t> e0(L, 0);
    e0[0] = 1;
    return KElement::from_base_vector(T, minv->apply(e0));
}

// Batched inversion (one linear solve plus 3(n-1) multiplications).
inline std::vector<KElement> batch_inverse(const std::vector<KElement>& xs) {
    if (xs.empty()) return {};
    const TowerSpec& T = xs.front().tower();
    std::vector<KElement> prefix;
    prefix.reserve(xs.size());
    KElement acc = KElement::one(T);
    for (const KElement& x : xs) {
        if (x.is_zero()) throw invalid_input("batch_inverse: zero element");
        acc = acc * x;
        prefix.push_back(acc);
    }
    KElement run = inv(acc);
    std::vector<KElement> out(xs.size(), KElement::zero(T));
    for (std::size_t i = xs.size(); i-- > 0;) {
        out[i] = i == 0 ? run : run * prefix[i - 1];
        run = run * xs[i];
    }
    return out;
}

}  // namespace rsrp
