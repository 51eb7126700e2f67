#pragma once

// Ideals of (Z/p^N)[G][T] compared at truncation T^M, fractional ideals with
// denominators from a fixed non-zero-divisor family, minors and Fitting ideals.

#include "fitt/howell.hpp"
#include "fitt/parallel.hpp"
#include "fitt/ring.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace fitt {

class InsufficientPrecision : public Error {
public:
    using Error::Error;
};

/// Incremental construction of an ideal: keeps only generators that were not
/// already members.
class IdealBuilder {
public:
    explicit IdealBuilder(ContextPtr ctx)
        : ctx_(std::move(ctx)), span_(ctx_->mod(), ctx_->flat_dim()) {}

    const ContextPtr& context() const { return ctx_; }

    bool contains(const RingElement& x) const {
        return span_.contains(x.flatten(static_cast<std::size_t>(ctx_->t_precision())));
    }

    /// Returns true if x enlarged the span.
    bool add(const RingElement& x) {
        if (!x.context() || !x.context()->compatible(*ctx_)) throw Error("ideal: context mismatch");
        const auto M = static_cast<std::size_t>(ctx_->t_precision());
        auto base = x.in_context(ctx_).truncated(M);
        if (base.is_zero() || contains(base)) return false;
        gens_.push_back(x.in_context(ctx_));
        const auto n = ctx_->group_order();
        for (GroupIndex g = 0; g < n; ++g) {
            auto flat = base.shifted_by(g).flatten(M);
            for (std::size_t j = 0; j < M; ++j) {
                if (j) {
                    // multiply by T: move every slice up one degree
                    std::rotate(flat.rbegin(), flat.rbegin() + static_cast<std::ptrdiff_t>(n), flat.rend());
                    std::fill(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n), 0);
                }
                if (std::all_of(flat.begin(), flat.end(), [](auto c) { return c == 0; })) break;
                span_.insert(flat);
            }
        }
        return true;
    }

    const std::vector<RingElement>& generators() const { return gens_; }
    const HowellBuilder& span() const { return span_; }

private:
    ContextPtr ctx_;
    HowellBuilder span_;
    std::vector<RingElement> gens_;
};

/// Immutable ideal with its canonical span computed at construction.
class Ideal {
public:
    Ideal() = default;
    explicit Ideal(const IdealBuilder& b)
        : ctx_(b.context()),
          gens_(b.generators()),
          span_(std::make_shared<const HowellBuilder>(b.span())),
          canonical_(std::make_shared<const HowellForm>(b.context()->mod(), b.context()->flat_dim(),
                                                        b.span().canonical_rows())) {}

    static Ideal generated(const ContextPtr& ctx, const std::vector<RingElement>& gens) {
        IdealBuilder b(ctx);
        for (const auto& g : gens) b.add(g);
        return Ideal(b);
    }
    static Ideal zero(const ContextPtr& ctx) { return generated(ctx, {}); }
    static Ideal unit(const ContextPtr& ctx) { return generated(ctx, {RingElement::one(ctx)}); }

    const ContextPtr& context() const { return ctx_; }
    /// Non-redundant generators in insertion order.
    const std::vector<RingElement>& generators() const { return gens_; }
    const HowellForm& canonical() const { return *canonical_; }
    bool is_zero() const { return gens_.empty(); }
    std::uint64_t log_size() const { return span_->log_size(); }

    bool contains(const RingElement& x) const {
        return span_->contains(x.in_context(ctx_).flatten(static_cast<std::size_t>(ctx_->t_precision())));
    }
    bool contains(const Ideal& o) const {
        return std::all_of(o.gens_.begin(), o.gens_.end(), [&](const RingElement& g) { return contains(g); });
    }
    bool is_unit_ideal() const { return contains(RingElement::one(ctx_)); }

    /// Largest T-degree among the generators.
    int max_t_degree() const {
        int d = 0;
        for (const auto& g : gens_) d = std::max(d, g.t_degree());
        return d;
    }

    Ideal with(const std::vector<RingElement>& extra) const {
        IdealBuilder b(ctx_);
        for (const auto& g : gens_) b.add(g);
        for (const auto& g : extra) b.add(g);
        return Ideal(b);
    }

    std::string to_string() const {
        if (gens_.empty()) return "(0)";
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < gens_.size(); ++i) os << (i ? ", " : "") << gens_[i].to_string();
        os << ')';
        return os.str();
    }

private:
    ContextPtr ctx_;
    std::vector<RingElement> gens_;
    std::shared_ptr<const HowellBuilder> span_;
    std::shared_ptr<const HowellForm> canonical_;
};

inline void require_same_context(const Ideal& i, const Ideal& j) {
    if (!i.context() || !j.context() || !i.context()->same(*j.context()))
        throw Error("ideal: context mismatch (N and M must agree)");
}

inline bool ideal_equal(const Ideal& i, const Ideal& j) {
    require_same_context(i, j);
    return i.log_size() == j.log_size() && i.canonical() == j.canonical();
}

inline Ideal ideal_sum(const Ideal& i, const Ideal& j) {
    require_same_context(i, j);
    return i.with(j.generators());
}

inline Ideal ideal_product(const Ideal& i, const Ideal& j) {
    require_same_context(i, j);
    IdealBuilder b(i.context());
    for (const auto& x : i.generators())
        for (const auto& y : j.generators()) b.add(x * y);
    return Ideal(b);
}

inline Ideal ideal_scaled(const Ideal& i, const RingElement& x) {
    IdealBuilder b(i.context());
    for (const auto& g : i.generators()) b.add(g * x);
    return Ideal(b);
}

// ---------------------------------------------------------------------------
// Matrices

class RingMatrix {
public:
    RingMatrix() = default;
    RingMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols)
        : ctx_(std::move(ctx)), rows_(rows), cols_(cols), data_(rows * cols, RingElement(ctx_)) {}

    static RingMatrix identity(const ContextPtr& ctx, std::size_t n) {
        RingMatrix m(ctx, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = RingElement::one(ctx);
        return m;
    }
    static RingMatrix from_rows(const ContextPtr& ctx, const std::vector<std::vector<RingElement>>& rows) {
        std::size_t c = rows.empty() ? 0 : rows.front().size();
        RingMatrix m(ctx, rows.size(), c);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != c) throw Error("RingMatrix: ragged rows");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j].in_context(ctx);
        }
        return m;
    }

    const ContextPtr& context() const { return ctx_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    RingElement& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const RingElement& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RingMatrix transposed() const {
        RingMatrix t(ctx_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }
    /// Entries reinterpreted in a context with the same arithmetic.
    RingMatrix in_context(const ContextPtr& other) const {
        RingMatrix t(other, rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) t.data_[k] = data_[k].in_context(other);
        return t;
    }
    RingMatrix submatrix(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
        RingMatrix t(ctx_, rs.size(), cs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j) t.at(i, j) = at(rs[i], cs[j]);
        return t;
    }
    RingMatrix operator*(const RingMatrix& o) const {
        if (cols_ != o.rows_) throw Error("RingMatrix: dimension mismatch in product");
        RingMatrix t(ctx_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const auto& a = at(i, k);
                if (a.is_zero()) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    if (!o.at(k, j).is_zero()) t.at(i, j) += a * o.at(k, j);
            }
        return t;
    }
    RingMatrix operator+(const RingMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("RingMatrix: dimension mismatch in sum");
        RingMatrix t(*this);
        for (std::size_t k = 0; k < data_.size(); ++k) t.data_[k] += o.data_[k];
        return t;
    }
    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const RingElement& x) { return x.is_zero(); });
    }
    bool operator==(const RingMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    /// Rows of this matrix followed by rows of o.
    RingMatrix stacked(const RingMatrix& o) const {
        if (cols_ != o.cols_) throw Error("RingMatrix: column mismatch in stack");
        RingMatrix t(ctx_, rows_ + o.rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) t.data_[k] = data_[k];
        for (std::size_t k = 0; k < o.data_.size(); ++k) t.data_[data_.size() + k] = o.data_[k].in_context(ctx_);
        return t;
    }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < rows_; ++i) {
            os << '[';
            for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << at(i, j).to_string();
            os << "]\n";
        }
        return os.str();
    }

private:
    ContextPtr ctx_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<RingElement> data_;
};

inline constexpr std::size_t max_determinant_dimension = 40;

namespace detail {

inline RingElement det_cofactor(const RingMatrix& m) {
    const auto n = m.rows();
    const auto& ctx = m.context();
    std::vector<RingElement> dp(std::size_t{1} << n, RingElement(ctx));
    dp[0] = RingElement::one(ctx);
    // dp[mask]: determinant of rows 0..|mask|-1 restricted to columns in mask.
    for (std::size_t mask = 0; mask < dp.size(); ++mask) {
        if (dp[mask].is_zero()) continue;
        auto k = static_cast<std::size_t>(std::popcount(mask));
        if (k == n) continue;
        for (std::size_t c = 0; c < n; ++c) {
            if (mask >> c & 1) continue;
            const auto& a = m.at(k, c);
            if (a.is_zero()) continue;
            auto above = static_cast<unsigned>(std::popcount(mask >> (c + 1)));
            auto term = a * dp[mask];
            dp[mask | (std::size_t{1} << c)] += (above & 1) ? -term : term;
        }
    }
    return dp.back();
}

inline RingElement det_berkowitz(const RingMatrix& a) {
    const auto n = a.rows();
    const auto& ctx = a.context();
    const RingElement zero(ctx);
    // c holds the characteristic polynomial coefficients of the leading
    // r x r block, highest power first.
    std::vector<RingElement> c{RingElement::one(ctx), -a.at(0, 0)};
    for (std::size_t r = 1; r < n; ++r) {
        // t_0 = 1, t_1 = -a_rr, t_k = -R A_r^{k-2} S.
        std::vector<RingElement> t{RingElement::one(ctx), -a.at(r, r)};
        std::vector<RingElement> v(r, zero);
        for (std::size_t i = 0; i < r; ++i) v[i] = a.at(i, r);
        for (std::size_t k = 2; k <= r + 1; ++k) {
            RingElement s = zero;
            for (std::size_t i = 0; i < r; ++i)
                if (!v[i].is_zero() && !a.at(r, i).is_zero()) s += a.at(r, i) * v[i];
            t.push_back(-s);
            if (k == r + 1) break;
            std::vector<RingElement> nv(r, zero);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    if (!a.at(i, j).is_zero() && !v[j].is_zero()) nv[i] += a.at(i, j) * v[j];
            v = std::move(nv);
        }
        std::vector<RingElement> next(r + 2, zero);
        for (std::size_t i = 0; i < r + 2; ++i)
            for (std::size_t j = 0; j <= std::min(i, r); ++j)
                if (!t[i - j].is_zero() && !c[j].is_zero()) next[i] += t[i - j] * c[j];
        c = std::move(next);
    }
    return (n % 2) ? -c[n] : c[n];
}

}  // namespace detail

inline RingElement determinant(const RingMatrix& m) {
    if (m.rows() != m.cols()) throw Error("determinant: matrix is not square");
    if (m.rows() > max_determinant_dimension) throw Error("determinant: dimension overflow");
    if (m.rows() == 0) return RingElement::one(m.context());
    if (m.rows() <= 8) return detail::det_cofactor(m);
    return detail::det_berkowitz(m);
}

// ---------------------------------------------------------------------------
// Minor ideals

struct MinorProfile {
    std::vector<Ideal> by_size;  // by_size[e] = Min_e
    const Ideal& operator[](std::size_t e) const { return by_size.at(e); }
    std::size_t max_size() const { return by_size.empty() ? 0 : by_size.size() - 1; }
};

namespace detail {

struct Binomials {
    std::vector<std::vector<std::uint64_t>> c;
    explicit Binomials(std::size_t n) : c(n + 2, std::vector<std::uint64_t>(n + 2, 0)) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i][0] = 1;
            for (std::size_t j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + (j < i ? c[i - 1][j] : 0);
        }
    }
    std::uint64_t operator()(std::size_t n, std::size_t k) const { return k > n ? 0 : c[n][k]; }
};

// Colex rank of a sorted subset.
inline std::size_t colex_rank(const std::vector<std::size_t>& s, const Binomials& b) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < s.size(); ++i) r += b(s[i], i + 1);
    return r;
}

inline bool next_combination(std::vector<std::size_t>& s, std::size_t n) {
    const auto k = s.size();
    for (std::size_t i = k; i-- > 0;) {
        if (s[i] < n - k + i) {
            ++s[i];
            for (std::size_t j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Depth-first walk over column subsets in lexicographic order. `table` holds
// all k-minors on the current column prefix, indexed by colex rank of the row
// subset. Each nonzero minor of a wanted size is handed to the builder.
struct MinorWalk {
    const RingMatrix& m;
    const Binomials& binom;
    std::size_t max_e;
    const std::vector<char>& wanted;
    std::vector<IdealBuilder>& out;

    void emit(std::size_t k, const std::vector<RingElement>& table) {
        if (!wanted[k]) return;
        std::vector<std::size_t> s(k);
        std::iota(s.begin(), s.end(), std::size_t{0});
        do {
            const auto& v = table[colex_rank(s, binom)];
            if (!v.is_zero()) out[k].add(v);
        } while (next_combination(s, m.rows()));
    }

    void extend(std::size_t k, std::size_t last_col, const std::vector<RingElement>& prev) {
        const auto R = m.rows();
        for (std::size_t c = last_col + 1; c < m.cols(); ++c) step(k, c, prev);
        (void)R;
    }

    // prev holds k-minors; add column c to get (k+1)-minors.
    void step(std::size_t k, std::size_t c, const std::vector<RingElement>& prev) {
        const auto R = m.rows();
        const auto kk = k + 1;
        if (kk > R) return;
        std::vector<RingElement> table(binom(R, kk), RingElement(m.context()));
        bool any = false;
        std::vector<std::size_t> s(kk), rest(k);
        std::iota(s.begin(), s.end(), std::size_t{0});
        do {
            RingElement acc(m.context());
            for (std::size_t t = 0; t < kk; ++t) {
                const auto& a = m.at(s[t], c);
                if (a.is_zero()) continue;
                for (std::size_t i = 0, w = 0; i < kk; ++i)
                    if (i != t) rest[w++] = s[i];
                const auto& sub = prev[colex_rank(rest, binom)];
                if (sub.is_zero()) continue;
                auto term = a * sub;
                acc += ((t + k) % 2) ? -term : term;
            }
            if (!acc.is_zero()) any = true;
            table[colex_rank(s, binom)] = std::move(acc);
        } while (next_combination(s, R));
        // All minors on this prefix vanish, so every extension does too.
        if (!any) return;
        emit(kk, table);
        if (kk < max_e) extend(kk, c, table);
    }
};

}  // namespace detail

/// Min_e for every e in `sizes`, computed in one pass. Work is split by the
/// first column; builders are merged in job order, so the generators kept
/// are independent of the worker count.
inline std::map<std::size_t, Ideal> minor_ideals(const RingMatrix& m, const std::vector<std::size_t>& sizes,
                                                 unsigned jobs = 0) {
    const auto& ctx = m.context();
    const auto lim = std::min(m.rows(), m.cols());
    std::size_t max_e = 0;
    std::vector<char> wanted(lim + 1, 0);
    for (auto e : sizes) {
        if (e > lim) throw Error("minors: size exceeds matrix dimensions");
        wanted[e] = 1;
        max_e = std::max(max_e, e);
    }
    detail::Binomials binom(std::max(m.rows(), m.cols()));
    std::vector<std::vector<IdealBuilder>> partial(m.cols());
    if (max_e > 0) {
        if (jobs == 0) jobs = default_jobs().load();
        parallel_for(m.cols(), jobs, [&](std::size_t c) {
            std::vector<IdealBuilder> builders(lim + 1, IdealBuilder(ctx));
            detail::MinorWalk walk{m, binom, max_e, wanted, builders};
            std::vector<RingElement> base{RingElement::one(ctx)};
            walk.step(0, c, base);
            partial[c] = std::move(builders);
        });
    }
    std::map<std::size_t, Ideal> result;
    for (auto e : sizes) {
        if (e == 0) {
            result.emplace(0, Ideal::unit(ctx));
            continue;
        }
        IdealBuilder b(ctx);
        for (const auto& job : partial)
            for (const auto& g : job[e].generators()) b.add(g);
        result.emplace(e, Ideal(b));
    }
    return result;
}

inline Ideal minors(const RingMatrix& m, std::size_t e, unsigned jobs = 0) {
    return minor_ideals(m, {e}, jobs).at(e);
}

inline MinorProfile minor_profile(const RingMatrix& m, unsigned jobs = 0) {
    std::vector<std::size_t> sizes(std::min(m.rows(), m.cols()) + 1);
    std::iota(sizes.begin(), sizes.end(), std::size_t{0});
    auto all = minor_ideals(m, sizes, jobs);
    MinorProfile p;
    for (auto e : sizes) p.by_size.push_back(all.at(e));
    return p;
}

/// Min_b of a presentation with b columns; (0) with fewer than b rows.
inline Ideal fitt0(const RingMatrix& presentation) {
    const auto b = presentation.cols();
    if (presentation.rows() < b) return Ideal::zero(presentation.context());
    return minors(presentation, b);
}

// ---------------------------------------------------------------------------
// Fractional ideals

/// The non-zero-divisor g*(1+T)^e - 1, e >= 1. (identity, 1) is T and
/// (identity, p^n) is (1+T)^{p^n} - 1.
struct DenFactor {
    GroupIndex g = 0;
    std::uint64_t e = 1;
    auto operator<=>(const DenFactor&) const = default;
};

inline DenFactor den_t() { return {0, 1}; }
inline DenFactor den_gamma(unsigned n, std::uint64_t p) {
    std::uint64_t e = 1;
    for (unsigned i = 0; i < n; ++i) e *= p;
    return {0, e};
}

inline RingElement den_value(const DenFactor& f, const ContextPtr& ctx) {
    if (f.e == 0) throw Error("denominator: exponent must be positive");
    return frobenius_minus_one(f.g, f.e, ctx);
}

inline std::string den_string(const DenFactor& f, const ContextPtr& ctx) {
    if (f.g == 0 && f.e == 1) return "T";
    std::ostringstream os;
    os << '(';
    if (f.g != 0) os << RingElement::group_element(ctx, f.g).to_string() << '*';
    os << "(1+T)";
    if (f.e != 1) os << '^' << f.e;
    os << " - 1)";
    return os.str();
}

/// numerator / product of denominator factors.
class FractionalIdeal {
public:
    FractionalIdeal() = default;
    FractionalIdeal(Ideal num, std::vector<DenFactor> den) : num_(std::move(num)), den_(std::move(den)) {
        std::sort(den_.begin(), den_.end());
        for (const auto& f : den_)
            if (f.e == 0) throw Error("fractional ideal: denominator outside the non-zero-divisor family");
    }
    static FractionalIdeal integral(Ideal num) { return FractionalIdeal(std::move(num), {}); }

    /// Sum of principal pieces a_k / d_k over the least common denominator.
    static FractionalIdeal from_terms(const ContextPtr& ctx,
                                      const std::vector<std::pair<RingElement, std::vector<DenFactor>>>& terms) {
        std::map<DenFactor, std::size_t> lcm;
        for (const auto& [a, d] : terms) {
            std::map<DenFactor, std::size_t> cnt;
            for (const auto& f : d) ++cnt[f];
            for (const auto& [f, k] : cnt) lcm[f] = std::max(lcm[f], k);
        }
        IdealBuilder b(ctx);
        for (const auto& [a, d] : terms) {
            std::map<DenFactor, std::size_t> cnt;
            for (const auto& f : d) ++cnt[f];
            auto x = a.in_context(ctx);
            for (const auto& [f, k] : lcm)
                for (std::size_t i = cnt[f]; i < k; ++i) x *= den_value(f, ctx);
            b.add(x);
        }
        std::vector<DenFactor> den;
        for (const auto& [f, k] : lcm) den.insert(den.end(), k, f);
        return FractionalIdeal(Ideal(b), den);
    }

    const Ideal& numerator() const { return num_; }
    const std::vector<DenFactor>& denominator() const { return den_; }
    const ContextPtr& context() const { return num_.context(); }

    RingElement denominator_value() const {
        auto d = RingElement::one(context());
        for (const auto& f : den_) d *= den_value(f, context());
        return d;
    }

    std::string to_string() const {
        if (den_.empty()) return num_.to_string();
        std::ostringstream os;
        os << num_.to_string() << " / ";
        std::map<DenFactor, std::size_t> cnt;
        for (const auto& f : den_) ++cnt[f];
        bool first = true;
        for (const auto& [f, k] : cnt) {
            os << (first ? "" : "*") << den_string(f, context());
            if (k > 1) os << '^' << k;
            first = false;
        }
        return os.str();
    }

private:
    Ideal num_;
    std::vector<DenFactor> den_;
};

inline std::vector<DenFactor> den_product(std::vector<DenFactor> a, const std::vector<DenFactor>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

inline FractionalIdeal frac_product(const FractionalIdeal& x, const FractionalIdeal& y) {
    return FractionalIdeal(ideal_product(x.numerator(), y.numerator()), den_product(x.denominator(), y.denominator()));
}

inline FractionalIdeal frac_sum(const FractionalIdeal& x, const FractionalIdeal& y) {
    require_same_context(x.numerator(), y.numerator());
    if (x.denominator() == y.denominator())
        return FractionalIdeal(ideal_sum(x.numerator(), y.numerator()), x.denominator());
    auto ctx = x.context();
    auto a = ideal_scaled(x.numerator(), y.denominator_value());
    auto b = ideal_scaled(y.numerator(), x.denominator_value());
    return FractionalIdeal(ideal_sum(a, b), den_product(x.denominator(), y.denominator()));
}

inline constexpr int default_precision_slack = 2;

/// den(y) num(x) = den(x) num(y) at truncation (N, M). Common denominator
/// factors are cancelled first; they are non-zero-divisors.
inline bool frac_ideal_equal(const FractionalIdeal& x, const FractionalIdeal& y,
                             int slack = default_precision_slack) {
    require_same_context(x.numerator(), y.numerator());
    const auto& ctx = x.context();
    std::vector<DenFactor> dx, dy;
    std::set_difference(x.denominator().begin(), x.denominator().end(), y.denominator().begin(),
                        y.denominator().end(), std::back_inserter(dx));
    std::set_difference(y.denominator().begin(), y.denominator().end(), x.denominator().begin(),
                        x.denominator().end(), std::back_inserter(dy));
    auto value = [&](const std::vector<DenFactor>& d) {
        auto v = RingElement::one(ctx);
        for (const auto& f : d) v *= den_value(f, ctx);
        return v;
    };
    auto lhs = dy.empty() ? x.numerator() : ideal_scaled(x.numerator(), value(dy));
    auto rhs = dx.empty() ? y.numerator() : ideal_scaled(y.numerator(), value(dx));
    int need = std::max(lhs.max_t_degree(), rhs.max_t_degree()) + slack;
    if (ctx->t_precision() < need)
        throw InsufficientPrecision("frac_ideal_equal: t_precision " + std::to_string(ctx->t_precision()) +
                                    " below required " + std::to_string(need));
    return ideal_equal(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Shifted Fitting ideals

/// w^{(t1 - t0)} ^ -1 * sum_{e=0}^{t2} w^{t2-e} Min_e(A) for a lifted t3 x t2
/// matrix A over Lambda.
inline FractionalIdeal fitt_shift1_lifted(const RingMatrix& A, std::size_t t0, std::size_t t1, std::size_t t2,
                                          const DenFactor& w, unsigned jobs = 0) {
    if (A.cols() != t2) throw Error("fitt_shift1: matrix has " + std::to_string(A.cols()) + " columns, expected t2");
    const auto& ctx = A.context();
    auto wv = den_value(w, ctx);
    bool t_free = true;
    for (std::size_t i = 0; i < A.rows() && t_free; ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (!A.at(i, j).is_t_free()) {
                t_free = false;
                break;
            }
    // T-free minors: enumerate over the slice and lift the surviving generators.
    auto prof = t_free && ctx->t_precision() > 1
                    ? minor_profile(A.in_context(make_context(ctx->group(), ctx->coeff_precision(), 1)), jobs)
                    : minor_profile(A, jobs);
    IdealBuilder b(ctx);
    auto wpow = RingElement::one(ctx);
    std::vector<RingElement> wp{wpow};
    for (std::size_t k = 1; k <= t2; ++k) wp.push_back(wp.back() * wv);
    for (std::size_t e = 0; e <= std::min(t2, prof.max_size()); ++e)
        for (const auto& g : prof[e].generators()) b.add(g.in_context(ctx) * wp[t2 - e]);
    Ideal num(b);
    if (t1 >= t0) return FractionalIdeal(num, std::vector<DenFactor>(t1 - t0, w));
    auto extra = RingElement::one(ctx);
    for (std::size_t k = 0; k < t0 - t1; ++k) extra *= wv;
    return FractionalIdeal(ideal_scaled(num, extra), {});
}

/// A over the T-free slice R = (Z/p^N)[G] (a context with the same group),
/// lifted canonically into lambda; w = (1+T)^{p^n} - 1.
inline FractionalIdeal fitt_shift1_from_resolution(const RingMatrix& A, std::size_t t1, std::size_t t2,
                                                   std::size_t t3, unsigned n, const ContextPtr& lambda,
                                                   unsigned jobs = 0) {
    if (A.rows() != t3 || A.cols() != t2) throw Error("fitt_shift1_from_resolution: dimension mismatch");
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (!A.at(i, j).is_t_free()) throw Error("fitt_shift1_from_resolution: entries must be T-free");
    return fitt_shift1_lifted(A.in_context(lambda), 0, t1, t2, den_gamma(n, lambda->p()), jobs);
}

/// Dual route: Min_{t2}([A; w I]) / w^{t1 - t0}.
inline FractionalIdeal fitt_shift1_stacked(const RingMatrix& A, std::size_t t0, std::size_t t1, const DenFactor& w,
                                           unsigned jobs = 0) {
    const auto& ctx = A.context();
    const auto t2 = A.cols();
    RingMatrix wi(ctx, t2, t2);
    auto wv = den_value(w, ctx);
    for (std::size_t i = 0; i < t2; ++i) wi.at(i, i) = wv;
    auto num = minors(A.stacked(wi), t2, jobs);
    if (t1 >= t0) return FractionalIdeal(num, std::vector<DenFactor>(t1 - t0, w));
    auto extra = RingElement::one(ctx);
    for (std::size_t k = 0; k < t0 - t1; ++k) extra *= wv;
    return FractionalIdeal(ideal_scaled(num, extra), {});
}

/// (sigma - 1)^{-1} (N_{T_v}, sigma - 1) for a cyclic inertia group T_v.
inline FractionalIdeal zv_fitt1(const Subgroup& tv, const DenFactor& frobenius_lift, const ContextPtr& lambda) {
    if (!tv.is_cyclic()) throw Error("zv_fitt1: inertia group is not cyclic");
    auto num = Ideal::generated(lambda, {norm_element(tv, lambda), den_value(frobenius_lift, lambda)});
    return FractionalIdeal(num, {frobenius_lift});
}

}  // namespace fitt
