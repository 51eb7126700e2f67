#pragma once

// Finite abelian p-groups, their subgroups, and the coefficient ring
// (Z/p^N)[G][T] standing in for the Iwasawa algebra Z_p[G][[T]].

#include "fitt/modular.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace fitt {

using GroupIndex = std::uint32_t;

/// A product of cyclic groups of orders p^{a_1}, ..., p^{a_s}.
class PGroup {
public:
    PGroup() = default;
    PGroup(std::uint64_t p, std::vector<std::uint64_t> factor_orders)
        : p_(p), orders_(std::move(factor_orders)) {
        if (!is_prime(p_)) throw Error("PGroup: p = " + std::to_string(p_) + " is not prime");
        for (auto o : orders_) {
            if (o < p_) throw Error("PGroup: factor order " + std::to_string(o) + " is below p");
            std::uint64_t x = o;
            while (x % p_ == 0) x /= p_;
            if (x != 1) throw Error("PGroup: factor order " + std::to_string(o) + " is not a power of p");
        }
        strides_.assign(orders_.size(), 1);
        order_ = 1;
        for (std::size_t j = orders_.size(); j-- > 0;) {
            strides_[j] = order_;
            order_ *= orders_[j];
            if (order_ > (1u << 22)) throw Error("PGroup: group order too large");
        }
    }

    std::uint64_t p() const { return p_; }
    const std::vector<std::uint64_t>& factor_orders() const { return orders_; }
    std::size_t rank() const { return orders_.size(); }
    std::uint64_t order() const { return order_; }

    std::vector<std::uint64_t> exponents(GroupIndex g) const {
        std::vector<std::uint64_t> e(orders_.size());
        for (std::size_t j = 0; j < orders_.size(); ++j) e[j] = (g / strides_[j]) % orders_[j];
        return e;
    }
    GroupIndex index(std::span<const std::int64_t> exps) const {
        if (exps.size() != orders_.size()) throw Error("PGroup: exponent tuple has wrong length");
        std::uint64_t g = 0;
        for (std::size_t j = 0; j < orders_.size(); ++j) {
            auto o = static_cast<std::int64_t>(orders_[j]);
            std::int64_t e = ((exps[j] % o) + o) % o;
            g += static_cast<std::uint64_t>(e) * strides_[j];
        }
        return static_cast<GroupIndex>(g);
    }
    GroupIndex index(std::initializer_list<std::int64_t> exps) const {
        std::vector<std::int64_t> v(exps);
        return index(std::span<const std::int64_t>(v));
    }
    /// Generator of the j-th cyclic factor.
    GroupIndex factor_generator(std::size_t j) const { return static_cast<GroupIndex>(strides_.at(j)); }

    GroupIndex mul(GroupIndex a, GroupIndex b) const {
        std::uint64_t g = 0;
        for (std::size_t j = 0; j < orders_.size(); ++j) {
            auto ea = (a / strides_[j]) % orders_[j];
            auto eb = (b / strides_[j]) % orders_[j];
            g += ((ea + eb) % orders_[j]) * strides_[j];
        }
        return static_cast<GroupIndex>(g);
    }
    GroupIndex inverse(GroupIndex a) const {
        std::uint64_t g = 0;
        for (std::size_t j = 0; j < orders_.size(); ++j) {
            auto ea = (a / strides_[j]) % orders_[j];
            g += ((orders_[j] - ea) % orders_[j]) * strides_[j];
        }
        return static_cast<GroupIndex>(g);
    }
    GroupIndex power(GroupIndex a, std::uint64_t k) const {
        std::uint64_t g = 0;
        for (std::size_t j = 0; j < orders_.size(); ++j) {
            auto ea = (a / strides_[j]) % orders_[j];
            g += ((ea * (k % orders_[j])) % orders_[j]) * strides_[j];
        }
        return static_cast<GroupIndex>(g);
    }
    std::uint64_t element_order(GroupIndex a) const {
        std::uint64_t m = 1;
        for (std::size_t j = 0; j < orders_.size(); ++j) {
            auto ea = (a / strides_[j]) % orders_[j];
            std::uint64_t oj = orders_[j] / std::gcd(orders_[j], ea == 0 ? orders_[j] : ea);
            m = std::max(m, oj);
        }
        return m;
    }

    std::string element_string(GroupIndex g) const {
        auto e = exponents(g);
        std::ostringstream os;
        os << '(';
        for (std::size_t j = 0; j < e.size(); ++j) os << (j ? "," : "") << e[j];
        os << ')';
        return os.str();
    }

    bool operator==(const PGroup& o) const { return p_ == o.p_ && orders_ == o.orders_; }

private:
    std::uint64_t p_ = 3;
    std::vector<std::uint64_t> orders_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t order_ = 1;
};

/// All elements of g; index order is lexicographic on exponent tuples.
inline std::vector<GroupIndex> group_elements(const PGroup& g) {
    std::vector<GroupIndex> out(g.order());
    std::iota(out.begin(), out.end(), GroupIndex{0});
    return out;
}

/// Subgroup given by generators, with its element set cached.
class Subgroup {
public:
    Subgroup(PGroup parent, std::vector<GroupIndex> generators)
        : parent_(std::move(parent)), generators_(std::move(generators)) {
        for (auto g : generators_)
            if (g >= parent_.order()) throw Error("Subgroup: generator outside the parent group");
        std::vector<char> seen(parent_.order(), 0);
        std::vector<GroupIndex> frontier{0};
        seen[0] = 1;
        elements_.push_back(0);
        while (!frontier.empty()) {
            auto x = frontier.back();
            frontier.pop_back();
            for (auto g : generators_) {
                auto y = parent_.mul(x, g);
                if (!seen[y]) {
                    seen[y] = 1;
                    elements_.push_back(y);
                    frontier.push_back(y);
                }
            }
        }
        std::sort(elements_.begin(), elements_.end());
        member_ = std::move(seen);
    }

    static Subgroup trivial(const PGroup& g) { return Subgroup(g, {}); }
    static Subgroup whole(const PGroup& g) {
        std::vector<GroupIndex> gens;
        for (std::size_t j = 0; j < g.rank(); ++j) gens.push_back(g.factor_generator(j));
        return Subgroup(g, gens);
    }

    const PGroup& parent() const { return parent_; }
    const std::vector<GroupIndex>& generators() const { return generators_; }
    const std::vector<GroupIndex>& elements() const { return elements_; }
    std::uint64_t order() const { return elements_.size(); }
    bool contains(GroupIndex g) const { return member_.at(g) != 0; }
    bool contains(const Subgroup& other) const {
        return std::all_of(other.elements_.begin(), other.elements_.end(),
                           [&](GroupIndex g) { return contains(g); });
    }

    /// A generator if the subgroup is cyclic, otherwise nothing.
    std::optional<GroupIndex> cyclic_generator() const {
        for (auto g : elements_)
            if (parent_.element_order(g) == order()) return g;
        return std::nullopt;
    }
    bool is_cyclic() const { return cyclic_generator().has_value(); }

    bool operator==(const Subgroup& o) const { return parent_ == o.parent_ && elements_ == o.elements_; }

private:
    PGroup parent_;
    std::vector<GroupIndex> generators_;
    std::vector<GroupIndex> elements_;
    std::vector<char> member_;
};

inline std::vector<GroupIndex> subgroup_elements(const Subgroup& h) { return h.elements(); }

/// Least representative of each coset of h, in increasing order, together
/// with the coset id of every element of the parent.
struct CosetData {
    std::vector<GroupIndex> representatives;
    std::vector<std::uint32_t> coset_of;
};

inline CosetData coset_data(const PGroup& g, const Subgroup& h) {
    if (!(h.parent() == g)) throw Error("coset_transversal: subgroup of a different group");
    CosetData out;
    constexpr auto unset = static_cast<std::uint32_t>(-1);
    out.coset_of.assign(g.order(), unset);
    for (GroupIndex x = 0; x < g.order(); ++x) {
        if (out.coset_of[x] != unset) continue;
        auto id = static_cast<std::uint32_t>(out.representatives.size());
        out.representatives.push_back(x);
        for (auto s : h.elements()) out.coset_of[g.mul(x, s)] = id;
    }
    return out;
}

inline std::vector<GroupIndex> coset_transversal(const PGroup& g, const Subgroup& h) {
    return coset_data(g, h).representatives;
}

/// Shared ring parameters: group G, coefficients mod p^N, and the T-truncation
/// M used by ideal membership and equality.
class RingContext {
public:
    RingContext(PGroup group, int coeff_precision, int t_precision, bool allow_even_p = false)
        : group_(std::move(group)), mod_(group_.p(), coeff_precision), t_precision_(t_precision) {
        if (t_precision < 1) throw Error("RingContext: t_precision must be >= 1");
        if (group_.p() == 2 && !allow_even_p)
            throw Error("RingContext: p = 2 requires the allow-even-p override");
        auto n = group_.order();
        if (n > 2187) throw Error("RingContext: group order above 2187 is not supported");
        table_.resize(n * n);
        for (GroupIndex a = 0; a < n; ++a)
            for (GroupIndex b = 0; b < n; ++b) table_[a * n + b] = group_.mul(a, b);
    }

    const PGroup& group() const { return group_; }
    const Modulus& mod() const { return mod_; }
    std::uint64_t p() const { return group_.p(); }
    int coeff_precision() const { return mod_.N; }
    int t_precision() const { return t_precision_; }
    std::size_t group_order() const { return group_.order(); }
    /// Width of the flattened basis {(g, T^j) : j < M}.
    std::size_t flat_dim() const { return group_order() * static_cast<std::size_t>(t_precision_); }
    GroupIndex mul(GroupIndex a, GroupIndex b) const { return table_[a * group_order() + b]; }

    /// Same arithmetic (group and N); M may differ.
    bool compatible(const RingContext& o) const { return group_ == o.group_ && mod_ == o.mod_; }
    bool same(const RingContext& o) const { return compatible(o) && t_precision_ == o.t_precision_; }

private:
    PGroup group_;
    Modulus mod_;
    int t_precision_;
    std::vector<GroupIndex> table_;
};

using ContextPtr = std::shared_ptr<const RingContext>;

inline ContextPtr make_context(PGroup group, int coeff_precision, int t_precision, bool allow_even_p = false) {
    return std::make_shared<const RingContext>(std::move(group), coeff_precision, t_precision, allow_even_p);
}

/// Element of (Z/p^N)[G][T]. Dense storage indexed by j*|G| + g (T-degree
/// major); trailing zero T-degrees are trimmed so the degree is exact.
class RingElement {
public:
    RingElement() = default;
    explicit RingElement(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    static RingElement zero(const ContextPtr& ctx) { return RingElement(ctx); }
    static RingElement constant(const ContextPtr& ctx, std::int64_t c) {
        RingElement r(ctx);
        r.set(0, 0, ctx->mod().reduce(c));
        return r;
    }
    static RingElement one(const ContextPtr& ctx) { return constant(ctx, 1); }
    static RingElement monomial(const ContextPtr& ctx, GroupIndex g, std::size_t t_degree = 0, std::int64_t c = 1) {
        RingElement r(ctx);
        r.set(g, t_degree, ctx->mod().reduce(c));
        return r;
    }
    static RingElement group_element(const ContextPtr& ctx, GroupIndex g) { return monomial(ctx, g); }
    static RingElement t_power(const ContextPtr& ctx, std::size_t j) { return monomial(ctx, 0, j); }
    static RingElement from_flat(const ContextPtr& ctx, std::span<const std::uint64_t> flat) {
        RingElement r(ctx);
        r.coeffs_.assign(flat.begin(), flat.end());
        auto n = ctx->group_order();
        if (r.coeffs_.size() % n != 0) throw Error("RingElement: flat vector length not a multiple of |G|");
        r.trim();
        return r;
    }

    const ContextPtr& context() const { return ctx_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// Exact T-degree; -1 for zero.
    int t_degree() const {
        return is_zero() ? -1 : static_cast<int>(coeffs_.size() / ctx_->group_order()) - 1;
    }
    bool is_t_free() const { return t_degree() <= 0; }
    std::uint64_t coeff(GroupIndex g, std::size_t j) const {
        auto k = j * n() + g;
        return k < coeffs_.size() ? coeffs_[k] : 0;
    }
    const std::vector<std::uint64_t>& raw() const { return coeffs_; }
    std::size_t nonzero_count() const {
        return static_cast<std::size_t>(std::count_if(coeffs_.begin(), coeffs_.end(), [](auto c) { return c != 0; }));
    }

    void set(GroupIndex g, std::size_t j, std::uint64_t c) {
        auto k = j * n() + g;
        if (k >= coeffs_.size()) {
            if (c == 0) return;
            coeffs_.resize((j + 1) * n(), 0);
        }
        coeffs_[k] = c % ctx_->mod().q;
        trim();
    }

    RingElement operator+(const RingElement& o) const {
        check(o);
        RingElement r(ctx_);
        const auto& m = ctx_->mod();
        r.coeffs_.assign(std::max(coeffs_.size(), o.coeffs_.size()), 0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) r.coeffs_[k] = coeffs_[k];
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) r.coeffs_[k] = m.add(r.coeffs_[k], o.coeffs_[k]);
        r.trim();
        return r;
    }
    RingElement operator-() const {
        RingElement r(*this);
        for (auto& c : r.coeffs_) c = ctx_->mod().neg(c);
        return r;
    }
    RingElement operator-(const RingElement& o) const { return *this + (-o); }
    RingElement& operator+=(const RingElement& o) { return *this = *this + o; }
    RingElement& operator-=(const RingElement& o) { return *this = *this - o; }

    RingElement operator*(const RingElement& o) const {
        check(o);
        RingElement r(ctx_);
        if (is_zero() || o.is_zero()) return r;
        const auto& m = ctx_->mod();
        const auto gn = n();
        r.coeffs_.assign(coeffs_.size() + o.coeffs_.size() - gn, 0);
        // Iterate over the sparser operand's nonzeros.
        const RingElement& a = nonzero_count() <= o.nonzero_count() ? *this : o;
        const RingElement& b = &a == this ? o : *this;
        for (std::size_t ka = 0; ka < a.coeffs_.size(); ++ka) {
            auto ca = a.coeffs_[ka];
            if (ca == 0) continue;
            auto ja = ka / gn;
            auto ga = static_cast<GroupIndex>(ka % gn);
            for (std::size_t kb = 0; kb < b.coeffs_.size(); ++kb) {
                auto cb = b.coeffs_[kb];
                if (cb == 0) continue;
                auto jb = kb / gn;
                auto gb = static_cast<GroupIndex>(kb % gn);
                auto& slot = r.coeffs_[(ja + jb) * gn + ctx_->mul(ga, gb)];
                slot = (slot + ca * cb) % m.q;
            }
        }
        r.trim();
        return r;
    }
    RingElement& operator*=(const RingElement& o) { return *this = *this * o; }

    RingElement scaled(std::int64_t c) const {
        RingElement r(*this);
        auto cc = ctx_->mod().reduce(c);
        for (auto& x : r.coeffs_) x = ctx_->mod().mul(x, cc);
        r.trim();
        return r;
    }

    RingElement pow(std::uint64_t k) const {
        RingElement result = one(ctx_);
        RingElement base = *this;
        while (k) {
            if (k & 1) result = result * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return result;
    }

    /// Image under g -> 1, T -> 0.
    std::uint64_t augmentation() const {
        std::uint64_t s = 0;
        for (std::size_t g = 0; g < n() && g < coeffs_.size(); ++g) s = ctx_->mod().add(s, coeffs_[g]);
        return s;
    }

    /// Units of the local ring are exactly the elements whose image in F_p is nonzero.
    bool is_unit() const { return augmentation() % ctx_->p() != 0; }

    /// Inverse of a unit with no T terms; exact in the finite ring (Z/p^N)[G].
    RingElement inverse_t_free() const {
        if (!is_t_free()) throw Error("RingElement: exact inverse requires a T-free element");
        if (!is_unit()) throw Error("RingElement: inverse of a non-unit");
        auto x = constant(ctx_, static_cast<std::int64_t>(ctx_->mod().inverse(augmentation())));
        auto two = constant(ctx_, 2);
        auto target = one(ctx_);
        for (int it = 0; it < 128; ++it) {
            auto ux = *this * x;
            if (ux == target) return x;
            x = x * (two - ux);
        }
        throw Error("RingElement: Newton inversion did not converge");
    }

    /// Truncation mod T^M as a vector of length |G|*M.
    std::vector<std::uint64_t> flatten(std::size_t M) const {
        std::vector<std::uint64_t> v(n() * M, 0);
        auto lim = std::min(v.size(), coeffs_.size());
        std::copy(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lim), v.begin());
        return v;
    }
    RingElement truncated(std::size_t M) const {
        RingElement r(*this);
        if (r.coeffs_.size() > n() * M) r.coeffs_.resize(n() * M);
        r.trim();
        return r;
    }

    /// Multiply by a group element (a coefficient permutation).
    RingElement shifted_by(GroupIndex h) const {
        RingElement r(ctx_);
        r.coeffs_.assign(coeffs_.size(), 0);
        const auto gn = n();
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (!coeffs_[k]) continue;
            auto j = k / gn;
            auto g = static_cast<GroupIndex>(k % gn);
            r.coeffs_[j * gn + ctx_->mul(g, h)] = coeffs_[k];
        }
        return r;
    }

    /// Copy of this element in another context with the same arithmetic.
    RingElement in_context(const ContextPtr& other) const {
        if (!ctx_->compatible(*other)) throw Error("RingElement: incompatible context");
        RingElement r(other);
        r.coeffs_ = coeffs_;
        return r;
    }

    bool operator==(const RingElement& o) const { return coeffs_ == o.coeffs_; }

    /// Lexicographic key over (T-degree, group index, coefficient) triples.
    std::vector<std::uint64_t> sort_key() const {
        std::vector<std::uint64_t> key;
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (!coeffs_[k]) continue;
            key.push_back(k / n());
            key.push_back(k % n());
            key.push_back(coeffs_[k]);
        }
        return key;
    }

    /// "c*g1^e1...gs^es*T^j" monomials joined by signs, ordered by
    /// (T-degree, group index).
    std::string to_string() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        const auto& m = ctx_->mod();
        const auto& grp = ctx_->group();
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (!coeffs_[k]) continue;
            auto c = m.signed_value(coeffs_[k]);
            auto j = k / n();
            auto g = static_cast<GroupIndex>(k % n());
            os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
            first = false;
            auto ac = c < 0 ? -c : c;
            auto e = grp.exponents(g);
            std::ostringstream mono;
            bool any = false;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                mono << (any ? "*" : "") << "g" << (i + 1);
                if (e[i] != 1) mono << '^' << e[i];
                any = true;
            }
            if (j) {
                mono << (any ? "*" : "") << "T";
                if (j != 1) mono << '^' << j;
                any = true;
            }
            if (!any)
                os << ac;
            else if (ac != 1)
                os << ac << '*' << mono.str();
            else
                os << mono.str();
        }
        return os.str();
    }

private:
    std::size_t n() const { return ctx_->group_order(); }
    void check(const RingElement& o) const {
        if (!ctx_ || !o.ctx_) throw Error("RingElement: missing context");
        if (ctx_ != o.ctx_ && !ctx_->compatible(*o.ctx_)) throw Error("RingElement: context mismatch");
    }
    void trim() {
        const auto gn = n();
        while (!coeffs_.empty()) {
            auto base = coeffs_.size() - gn;
            bool zero = std::all_of(coeffs_.begin() + static_cast<std::ptrdiff_t>(base), coeffs_.end(),
                                    [](auto c) { return c == 0; });
            if (!zero) break;
            coeffs_.resize(base);
        }
    }

    ContextPtr ctx_;
    std::vector<std::uint64_t> coeffs_;
};

inline RingElement ring_add(const RingElement& x, const RingElement& y) { return x + y; }
inline RingElement ring_mul(const RingElement& x, const RingElement& y) { return x * y; }
inline std::uint64_t augmentation(const RingElement& x) { return x.augmentation(); }

/// Sum of the elements of h.
inline RingElement norm_element(const Subgroup& h, const ContextPtr& ctx) {
    if (!(h.parent() == ctx->group())) throw Error("norm_element: subgroup of a different group");
    RingElement r(ctx);
    for (auto g : h.elements()) r.set(g, 0, 1);
    return r;
}

/// 1 + s + ... + s^{m-1}.
inline RingElement geometric_sum(GroupIndex s, std::uint64_t m, const ContextPtr& ctx) {
    RingElement r(ctx);
    GroupIndex x = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
        r += RingElement::group_element(ctx, x);
        x = ctx->mul(x, s);
    }
    return r;
}

/// g - 1.
inline RingElement minus_one(GroupIndex g, const ContextPtr& ctx) {
    return RingElement::group_element(ctx, g) - RingElement::one(ctx);
}

/// (1+T)^{p^n} - 1, the image of gamma^{p^n} - 1.
inline RingElement gamma_power_poly(unsigned n, const ContextPtr& ctx) {
    auto one_plus_t = RingElement::one(ctx) + RingElement::t_power(ctx, 1);
    std::uint64_t e = 1;
    for (unsigned i = 0; i < n; ++i) e *= ctx->p();
    return one_plus_t.pow(e) - RingElement::one(ctx);
}

/// g * (1+T)^e - 1.
inline RingElement frobenius_minus_one(GroupIndex g, std::uint64_t e, const ContextPtr& ctx) {
    auto one_plus_t = RingElement::one(ctx) + RingElement::t_power(ctx, 1);
    return RingElement::group_element(ctx, g) * one_plus_t.pow(e) - RingElement::one(ctx);
}

/// Substitute T -> s(T) in x.
inline RingElement substitute_t(const RingElement& x, const RingElement& s) {
    const auto& ctx = x.context();
    RingElement result(ctx);
    RingElement spow = RingElement::one(ctx);
    for (int j = 0; j <= x.t_degree(); ++j) {
        RingElement slice(ctx);
        for (GroupIndex g = 0; g < ctx->group_order(); ++g)
            if (auto c = x.coeff(g, static_cast<std::size_t>(j))) slice.set(g, 0, c);
        result += slice * spow;
        spow = spow * s;
    }
    return result;
}

}  // namespace fitt
