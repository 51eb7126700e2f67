#pragma once

// Howell normal form over Z/p^N. Echelon forms are not canonical over a ring
// with zero divisors; the Howell form is, once every row r with pivot p^a has
// p^{N-a} r in the span of the rows below it.

#include "fitt/modular.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fitt {

using ResidueVector = std::vector<std::uint64_t>;

struct ResidueMatrix {
    Modulus mod;
    std::size_t cols = 0;
    std::vector<ResidueVector> rows;

    ResidueMatrix() = default;
    ResidueMatrix(Modulus m, std::size_t width) : mod(m), cols(width) {}
    void add_row(ResidueVector r) {
        if (r.size() != cols) throw Error("ResidueMatrix: row width mismatch");
        for (auto& x : r) x %= mod.q;
        rows.push_back(std::move(r));
    }
    std::size_t row_count() const { return rows.size(); }
};

/// Incrementally maintained saturated echelon structure: at most one row per
/// pivot column, pivot entries are powers of p.
class HowellBuilder {
public:
    HowellBuilder() = default;
    HowellBuilder(Modulus m, std::size_t width) : mod_(m), width_(width), rows_(width) {}

    const Modulus& mod() const { return mod_; }
    std::size_t width() const { return width_; }

    /// Reduce v against the structure; returns true iff v is in the span.
    bool contains(ResidueVector v) const {
        check_width(v);
        for (std::size_t c = 0; c < width_; ++c) {
            if (v[c] == 0) continue;
            const auto& r = rows_[c];
            if (!r) return false;
            int b = pivot_valuation(c);
            int a = mod_.valuation(v[c]);
            if (a < b) return false;
            auto f = v[c] / mod_.power_of_p(b);
            sub_scaled(v, *r, f, c);
        }
        return true;
    }

    /// Add v to the span. Returns false if v was already a member (no change).
    bool insert(ResidueVector v) {
        check_width(v);
        if (contains(v)) return false;
        std::vector<ResidueVector> pending{std::move(v)};
        while (!pending.empty()) {
            auto cur = std::move(pending.back());
            pending.pop_back();
            while (true) {
                std::size_t c = first_nonzero(cur);
                if (c == width_) break;
                int a = mod_.valuation(cur[c]);
                auto unit = cur[c] / mod_.power_of_p(a);
                scale_from(cur, mod_.inverse(unit % mod_.q), c);
                auto& slot = rows_[c];
                if (!slot) {
                    ++count_;
                    slot = cur;
                    if (a == 0) break;
                    // Saturation: p^{N-a} cur vanishes at c.
                    scale_from(cur, mod_.power_of_p(mod_.N - a), c);
                    continue;
                }
                int b = pivot_valuation(c);
                if (a >= b) {
                    sub_scaled(cur, *slot, mod_.power_of_p(a - b), c);
                    continue;
                }
                ResidueVector old = std::move(*slot);
                slot = cur;
                sub_scaled(old, cur, mod_.power_of_p(b - a), c);
                pending.push_back(std::move(old));
                scale_from(cur, mod_.power_of_p(mod_.N - a), c);
            }
        }
        return true;
    }

    std::size_t pivot_count() const { return count_; }

    /// log_p of the number of elements in the span.
    std::uint64_t log_size() const {
        std::uint64_t s = 0;
        for (std::size_t c = 0; c < width_; ++c)
            if (rows_[c]) s += static_cast<std::uint64_t>(mod_.N - pivot_valuation(c));
        return s;
    }

    /// Canonical rows: pivots ascending, entries above each pivot reduced
    /// into [0, pivot).
    std::vector<ResidueVector> canonical_rows() const {
        std::vector<ResidueVector> out;
        std::vector<std::size_t> pivots;
        for (std::size_t c = 0; c < width_; ++c)
            if (rows_[c]) {
                out.push_back(*rows_[c]);
                pivots.push_back(c);
            }
        for (std::size_t i = out.size(); i-- > 0;) {
            auto& row = out[i];
            for (std::size_t k = i + 1; k < out.size(); ++k) {
                auto c = pivots[k];
                auto pv = out[k][c];
                auto f = row[c] / pv;
                if (f) sub_scaled(row, out[k], f, c);
            }
        }
        return out;
    }

    const std::optional<ResidueVector>& row_at(std::size_t c) const { return rows_[c]; }

private:
    void check_width(const ResidueVector& v) const {
        if (v.size() != width_) throw Error("Howell: vector width mismatch");
    }
    std::size_t first_nonzero(const ResidueVector& v) const {
        for (std::size_t c = 0; c < width_; ++c)
            if (v[c]) return c;
        return width_;
    }
    int pivot_valuation(std::size_t c) const { return mod_.valuation((*rows_[c])[c]); }
    void sub_scaled(ResidueVector& v, const ResidueVector& r, std::uint64_t f, std::size_t from) const {
        f %= mod_.q;
        if (!f) return;
        const auto q = mod_.q;
        for (std::size_t k = from; k < width_; ++k) {
            if (!r[k]) continue;
            auto t = (f * r[k]) % q;
            v[k] = v[k] >= t ? v[k] - t : v[k] + q - t;
        }
    }
    void scale_from(ResidueVector& v, std::uint64_t f, std::size_t from) const {
        for (std::size_t k = from; k < width_; ++k)
            if (v[k]) v[k] = (v[k] * f) % mod_.q;
    }

    Modulus mod_;
    std::size_t width_ = 0;
    std::vector<std::optional<ResidueVector>> rows_;
    std::size_t count_ = 0;
};

class HowellForm {
public:
    HowellForm() = default;
    HowellForm(Modulus m, std::size_t width, std::vector<ResidueVector> rows)
        : mod_(m), width_(width), rows_(std::move(rows)) {}

    const Modulus& mod() const { return mod_; }
    std::size_t width() const { return width_; }
    const std::vector<ResidueVector>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

    bool operator==(const HowellForm& o) const {
        return mod_ == o.mod_ && width_ == o.width_ && rows_ == o.rows_;
    }

private:
    Modulus mod_;
    std::size_t width_ = 0;
    std::vector<ResidueVector> rows_;
};

inline HowellBuilder howell_builder(const ResidueMatrix& m) {
    HowellBuilder b(m.mod, m.cols);
    for (const auto& r : m.rows) b.insert(r);
    return b;
}

inline HowellForm howell_form(const ResidueMatrix& m) {
    auto b = howell_builder(m);
    return HowellForm(m.mod, m.cols, b.canonical_rows());
}

inline bool membership(const ResidueVector& v, const HowellForm& h) {
    if (v.size() != h.width()) throw Error("membership: width mismatch");
    HowellBuilder b(h.mod(), h.width());
    for (const auto& r : h.rows()) b.insert(r);
    return b.contains(v);
}

inline bool span_equal(const ResidueMatrix& a, const ResidueMatrix& b) {
    if (a.cols != b.cols || !(a.mod == b.mod)) throw Error("span_equal: shape or modulus mismatch");
    return howell_form(a) == howell_form(b);
}

/// Generators of the left kernel {x : x * m = 0}.
inline std::vector<ResidueVector> kernel(const ResidueMatrix& m) {
    const auto n = m.rows.size();
    HowellBuilder b(m.mod, m.cols + n);
    for (std::size_t i = 0; i < n; ++i) {
        ResidueVector r(m.cols + n, 0);
        std::copy(m.rows[i].begin(), m.rows[i].end(), r.begin());
        r[m.cols + i] = 1;
        b.insert(std::move(r));
    }
    std::vector<ResidueVector> out;
    for (std::size_t c = m.cols; c < m.cols + n; ++c)
        if (const auto& r = b.row_at(c)) out.emplace_back(r->begin() + static_cast<std::ptrdiff_t>(m.cols), r->end());
    return out;
}

/// Cyclic decomposition of (Z/p^N)^gens / rowspan(rel): the exponents e of
/// the nonzero summands Z/p^e, sorted descending.
inline std::vector<int> quotient_invariants(const Modulus& mod, std::size_t gens, std::vector<ResidueVector> rel) {
    std::vector<int> exps;
    std::vector<char> col_used(gens, 0);
    std::vector<char> row_used(rel.size(), 0);
    std::size_t pivots = 0;
    while (true) {
        int best = mod.N;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < rel.size(); ++i) {
            if (row_used[i]) continue;
            for (std::size_t j = 0; j < gens; ++j) {
                if (col_used[j] || !rel[i][j]) continue;
                int v = mod.valuation(rel[i][j]);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best == mod.N) break;
        row_used[bi] = col_used[bj] = 1;
        ++pivots;
        if (best > 0) exps.push_back(best);
        auto pe = mod.power_of_p(best);
        auto u_inv = mod.inverse((rel[bi][bj] / pe) % mod.q);
        // The pivot has minimal valuation, so it divides everything left.
        for (std::size_t i = 0; i < rel.size(); ++i) {
            if (i == bi || !rel[i][bj]) continue;
            auto f = mod.mul(rel[i][bj] / pe, u_inv);
            for (std::size_t j = 0; j < gens; ++j) rel[i][j] = mod.sub(rel[i][j], mod.mul(f, rel[bi][j]));
        }
        for (std::size_t j = 0; j < gens; ++j)
            if (j != bj) rel[bi][j] = 0;
    }
    for (std::size_t k = pivots; k < gens; ++k) exps.push_back(mod.N);
    std::sort(exps.rbegin(), exps.rend());
    return exps;
}

}  // namespace fitt
