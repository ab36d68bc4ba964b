#pragma once

// Dense matrices over F_p with rank / inverse / matrix-vector products.
// Rows are bit-packed into machine words when p = 2.

#include <cstdint>
#include <optional>
#include <vector>

#include "rsrp/errors.hpp"
#include "rsrp/fp.hpp"

namespace rsrp {

class FpMatrix {
public:
    FpMatrix(PrimeField field, std::size_t rows, std::size_t cols)
        : field_(field), rows_(rows), cols_(cols), words_((cols + 63) / 64) {
        if (packed())
            bits_.assign(rows_ * words_, 0);
        else
            dense_.assign(rows_ * cols_, 0);
    }

    static FpMatrix from_rows(PrimeField field, const std::vector<std::vector<residue_t>>& rows) {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        FpMatrix m(field, rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw invalid_input("FpMatrix::from_rows: ragged rows");
            for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
        }
        return m;
    }

    const PrimeField& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    residue_t get(std::size_t r, std::size_t c) const {
        if (packed()) return (bits_[r * words_ + c / 64] >> (c % 64)) & 1;
        return dense_[r * cols_ + c];
    }

    void set(std::size_t r, std::size_t c, residue_t v) {
        if (packed()) {
            std::uint64_t m = 1ull << (c % 64);
            if (v & 1)
                bits_[r * words_ + c / 64] |= m;
            else
                bits_[r * words_ + c / 64] &= ~m;
        } else {
            dense_[r * cols_ + c] = field_.reduce(v);
        }
    }

    std::size_t rank() const { return packed() ? rank_packed() : rank_dense(); }

    // Gauss-Jordan inverse; nullopt when singular. Requires a square matrix.
    std::optional<FpMatrix> inverse() const {
        if (rows_ != cols_) throw invalid_input("FpMatrix::inverse: matrix not square");
        return packed() ? inverse_packed() : inverse_dense();
    }

    std::vector<residue_t> apply(const std::vector<residue_t>& v) const {
        if (v.size() != cols_) throw invalid_input("FpMatrix::apply: length mismatch");
        std::vector<residue_t> out(rows_, 0);
        if (packed()) {
            std::vector<std::uint64_t> pv(words_, 0);
            for (std::size_t c = 0; c < cols_; ++c)
                if (v[c] & 1) pv[c / 64] |= 1ull << (c % 64);
            for (std::size_t r = 0; r < rows_; ++r) {
                std::uint64_t acc = 0;
                const std::uint64_t* row = &bits_[r * words_];
                for (std::size_t w = 0; w < words_; ++w) acc ^= row[w] & pv[w];
                out[r] = static_cast<residue_t>(__builtin_popcountll(acc) & 1);
            }
        } else {
            for (std::size_t r = 0; r < rows_; ++r) {
                std::uint64_t acc = 0;
                const residue_t* row = &dense_[r * cols_];
                for (std::size_t c = 0; c < cols_; ++c) {
                    acc += std::uint64_t(row[c]) * v[c] % field_.p();
                    if (acc >= (1ull << 63)) acc %= field_.p();
                }
                out[r] = field_.reduce(acc);
            }
        }
        return out;
    }

private:
    bool packed() const { return field_.p() == 2; }

    std::size_t rank_packed() const {
        std::vector<std::uint64_t> a(bits_);
        std::size_t rank = 0;
        for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
            const std::size_t w = c / 64;
            const std::uint64_t m = 1ull << (c % 64);
            std::size_t piv = rank;
            while (piv < rows_ && !(a[piv * words_ + w] & m)) ++piv;
            if (piv == rows_) continue;
            if (piv != rank)
                for (std::size_t j = w; j < words_; ++j) std::swap(a[piv * words_ + j], a[rank * words_ + j]);
            for (std::size_t r = rank + 1; r < rows_; ++r) {
                if (a[r * words_ + w] & m)
                    for (std::size_t j = w; j < words_; ++j) a[r * words_ + j] ^= a[rank * words_ + j];
            }
            ++rank;
        }
        return rank;
    }

    std::size_t rank_dense() const {
        std::vector<residue_t> a(dense_);
        std::size_t rank = 0;
        for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
            std::size_t piv = rank;
            while (piv < rows_ && a[piv * cols_ + c] == 0) ++piv;
            if (piv == rows_) continue;
            if (piv != rank)
                for (std::size_t j = c; j < cols_; ++j) std::swap(a[piv * cols_ + j], a[rank * cols_ + j]);
            residue_t pinv = field_.inv(a[rank * cols_ + c]);
            for (std::size_t r = rank + 1; r < rows_; ++r) {
                residue_t f = field_.mul(a[r * cols_ + c], pinv);
                if (f == 0) continue;
                for (std::size_t j = c; j < cols_; ++j)
                    a[r * cols_ + j] = field_.sub(a[r * cols_ + j], field_.mul(f, a[rank * cols_ + j]));
            }
            ++rank;
        }
        return rank;
    }

    std::optional<FpMatrix> inverse_packed() const {
        const std::size_t n = rows_;
        std::vector<std::uint64_t> left(bits_);
        FpMatrix right(field_, n, n);
        for (std::size_t i = 0; i < n; ++i) right.set(i, i, 1);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t w = c / 64;
            const std::uint64_t m = 1ull << (c % 64);
            std::size_t piv = c;
            while (piv < n && !(left[piv * words_ + w] & m)) ++piv;
            if (piv == n) return std::nullopt;
            if (piv != c) {
                for (std::size_t j = 0; j < words_; ++j) std::swap(left[piv * words_ + j], left[c * words_ + j]);
                for (std::size_t j = 0; j < words_; ++j)
                    std::swap(right.bits_[piv * words_ + j], right.bits_[c * words_ + j]);
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (r != c && (left[r * words_ + w] & m)) {
                    for (std::size_t j = w; j < words_; ++j) left[r * words_ + j] ^= left[c * words_ + j];
                    for (std::size_t j = 0; j < words_; ++j)
                        right.bits_[r * words_ + j] ^= right.bits_[c * words_ + j];
                }
            }
        }
        return right;
    }

    std::optional<FpMatrix> inverse_dense() const {
        const std::size_t n = rows_;
        std::vector<residue_t> left(dense_);
        FpMatrix right(field_, n, n);
        for (std::size_t i = 0; i < n; ++i) right.set(i, i, 1);
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t piv = c;
            while (piv < n && left[piv * n + c] == 0) ++piv;
            if (piv == n) return std::nullopt;
            if (piv != c) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(left[piv * n + j], left[c * n + j]);
                    std::swap(right.dense_[piv * n + j], right.dense_[c * n + j]);
                }
            }
            residue_t pinv = field_.inv(left[c * n + c]);
            for (std::size_t j = 0; j < n; ++j) {
                left[c * n + j] = field_.mul(left[c * n + j], pinv);
                right.dense_[c * n + j] = field_.mul(right.dense_[c * n + j], pinv);
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (r == c) continue;
                residue_t f = left[r * n + c];
                if (f == 0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    left[r * n + j] = field_.sub(left[r * n + j], field_.mul(f, left[c * n + j]));
                    right.dense_[r * n + j] = field_.sub(right.dense_[r * n + j], field_.mul(f, right.dense_[c * n + j]));
                }
            }
        }
        return right;
    }

    PrimeField field_;
    std::size_t rows_, cols_, words_;
    std::vector<std::uint64_t> bits_;
    std::vector<residue_t> dense_;
};

}  // namespace rsrp
