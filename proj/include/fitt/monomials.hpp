#pragma once

// nu-monomials, (tau, nu)-monomials and the minor-ideal comparisons for the
// truncated tensor complex of r cyclic factors.

#include "fitt/complex.hpp"
#include "fitt/ideal.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

namespace fitt {

struct NuMonomial {
    std::vector<unsigned> f;
    unsigned degree() const { return std::accumulate(f.begin(), f.end(), 0u); }
    std::size_t support() const {
        return static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [](unsigned x) { return x > 0; }));
    }
};

/// Sorted descending, the partial sums of f stay below those of r-1, r-2, ...
inline bool is_admissible(const NuMonomial& m) {
    auto f = m.f;
    std::sort(f.rbegin(), f.rend());
    const auto r = static_cast<long>(f.size());
    long lhs = 0, rhs = 0;
    for (long i = 1; i <= r; ++i) {
        lhs += f[static_cast<std::size_t>(i - 1)];
        rhs += r - i;
        if (lhs > rhs) return false;
    }
    return true;
}

struct TauNuMonomial {
    std::vector<unsigned> tau, nu;

    unsigned degree() const {
        return std::accumulate(tau.begin(), tau.end(), 0u) + std::accumulate(nu.begin(), nu.end(), 0u);
    }
    NuMonomial nu_part() const { return {nu}; }
    bool disjoint() const {
        for (std::size_t i = 0; i < tau.size(); ++i)
            if (tau[i] && nu[i]) return false;
        return true;
    }
    std::string to_string() const {
        std::string s;
        auto put = [&](const char* name, const std::vector<unsigned>& e) {
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i]) continue;
                if (!s.empty()) s += "*";
                s += name + std::to_string(i + 1);
                if (e[i] > 1) s += "^" + std::to_string(e[i]);
            }
        };
        put("tau", tau);
        put("nu", nu);
        return s.empty() ? "1" : s;
    }
    bool operator==(const TauNuMonomial&) const = default;
};

/// Degree-d (tau, nu)-monomials with admissible nu-part containing at least
/// l distinct nu_i (no constraint for l <= 0).
inline std::vector<TauNuMonomial> enumerate_M(unsigned d, int l, std::size_t r) {
    std::vector<TauNuMonomial> out;
    TauNuMonomial z{std::vector<unsigned>(r, 0), std::vector<unsigned>(r, 0)};
    // Each index carries either a tau power or a nu power.
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
        if (i == r) {
            if (left) return;
            auto y = z.nu_part();
            if (static_cast<long>(y.support()) >= l && is_admissible(y)) out.push_back(z);
            return;
        }
        for (unsigned k = 0; k <= left; ++k) {
            z.tau[i] = 0;
            z.nu[i] = k;
            rec(i + 1, left - k);
            if (k > 0) {
                z.nu[i] = 0;
                z.tau[i] = k;
                rec(i + 1, left - k);
            }
        }
        z.tau[i] = z.nu[i] = 0;
    };
    rec(0, d);
    return out;
}

/// tau_i = s_i - 1 and nu_i = norm of <s_i> inside a fixed ring.
struct MonomialRing {
    ContextPtr ctx;
    std::vector<GroupIndex> gens;
    std::vector<RingElement> tau, nu;

    MonomialRing(ContextPtr c, std::vector<GroupIndex> g) : ctx(std::move(c)), gens(std::move(g)) {
        for (auto s : gens) {
            tau.push_back(minus_one(s, ctx));
            nu.push_back(norm_element(Subgroup(ctx->group(), {s}), ctx));
        }
    }
    std::size_t r() const { return gens.size(); }

    RingElement value(const TauNuMonomial& z) const {
        auto x = RingElement::one(ctx);
        for (std::size_t i = 0; i < r(); ++i) {
            for (unsigned k = 0; k < z.tau[i]; ++k) x *= tau[i];
            for (unsigned k = 0; k < z.nu[i]; ++k) x *= nu[i];
        }
        return x;
    }
    Ideal ideal_of(const std::vector<TauNuMonomial>& zs) const {
        IdealBuilder b(ctx);
        for (const auto& z : zs) b.add(value(z));
        return Ideal(b);
    }
};

/// All cyclic factor generators of the ambient group, in order.
inline std::vector<GroupIndex> all_factor_generators(const PGroup& g) {
    std::vector<GroupIndex> out;
    for (std::size_t i = 0; i < g.factor_orders().size(); ++i) out.push_back(g.factor_generator(i));
    return out;
}

/// Degree 3 -> 2 boundary of the full tensor complex C.
inline RingMatrix build_Mtilde(const ContextPtr& ctx, const std::vector<GroupIndex>& gens) {
    return tensor_complexes(cyclic_factors(ctx, gens, 3)).d(3);
}

/// M~ with the rows x_i^3 and the columns x_j^2 removed.
inline RingMatrix build_A(const ContextPtr& ctx, const std::vector<GroupIndex>& gens) {
    auto C = tensor_complexes(cyclic_factors(ctx, gens, 3));
    auto pure = [](const std::string& l, int n) {
        return l.find('*') == std::string::npos && l.size() > 2 && l.substr(l.size() - 2) == "^" + std::to_string(n);
    };
    std::vector<std::size_t> rs, cs;
    for (std::size_t i = 0; i < C.rank(3); ++i)
        if (!pure(C.labels(3)[i], 3)) rs.push_back(i);
    for (std::size_t j = 0; j < C.rank(2); ++j)
        if (!pure(C.labels(2)[j], 2)) cs.push_back(j);
    return C.d(3).submatrix(rs, cs);
}

struct ConjectureRow {
    std::string check;
    std::size_t r = 0;
    std::vector<std::uint64_t> orders;
    std::size_t e = 0;
    std::size_t monomials = 0;
    std::uint64_t lhs_log = 0, rhs_log = 0;  // log_p of |span| at the working truncation
    bool pass = false;
    std::string witness;  // an element of one side outside the other
};

namespace detail {

inline std::string inclusion_witness(const Ideal& a, const Ideal& b, const std::string& a_name, const std::string& b_name) {
    for (const auto& g : a.generators())
        if (!b.contains(g)) return a_name + " has " + g.to_string() + " outside " + b_name;
    for (const auto& g : b.generators())
        if (!a.contains(g)) return b_name + " has " + g.to_string() + " outside " + a_name;
    return "";
}

inline void warn_sweep(std::size_t r, bool allow_r5) {
    if (r > 5 || (r == 5 && !allow_r5))
        throw Error("monomial checks: r = " + std::to_string(r) + " outside the sweep budget (r <= 4, r = 5 on request)");
    if (r == 5) std::cerr << "warning: r = 5 sweep requested; this may take a long time\n";
}

}  // namespace detail

/// Rank of M~_r over the total ring of fractions: C(r+1, 2) - (r - 1).
/// Beyond it every minor vanishes.
inline std::size_t mtilde_generic_rank(std::size_t r) { return r * (r + 1) / 2 - r + 1; }

/// Min_e(M~_r) against the degree-e monomials with admissible nu-part.
inline ConjectureRow gkt_minor_check(const MonomialRing& ring, std::size_t e, unsigned jobs = 0, bool allow_r5 = false) {
    detail::warn_sweep(ring.r(), allow_r5);
    auto Mt = build_Mtilde(ring.ctx, ring.gens);
    if (e > std::min(Mt.rows(), Mt.cols())) throw Error("gkt_minor_check: e exceeds the matrix size");
    auto zs = enumerate_M(static_cast<unsigned>(e), 0, ring.r());
    auto lhs = minors(Mt, e, jobs);
    auto rhs = ring.ideal_of(zs);
    ConjectureRow row{"gkt", ring.r(), ring.ctx->group().factor_orders(), e, zs.size(), lhs.log_size(), rhs.log_size(),
                      ideal_equal(lhs, rhs), ""};
    if (!row.pass) row.witness = detail::inclusion_witness(lhs, rhs, "Min", "ideal(M)");
    return row;
}

/// Min_e(A) against ideal(M(e, r - 1 - t2 + e)) for 0 <= e <= t2.
inline std::vector<ConjectureRow> strong_conjecture_check(const MonomialRing& ring, unsigned jobs = 0,
                                                          bool allow_r5 = false) {
    detail::warn_sweep(ring.r(), allow_r5);
    const auto r = ring.r();
    const auto t2 = r * (r - 1) / 2;
    auto A = build_A(ring.ctx, ring.gens);
    std::vector<std::size_t> sizes(t2 + 1);
    std::iota(sizes.begin(), sizes.end(), std::size_t{0});
    auto mins = minor_ideals(A, sizes, jobs);
    std::vector<ConjectureRow> rows;
    for (std::size_t e = 0; e <= t2; ++e) {
        int l = static_cast<int>(r) - 1 - static_cast<int>(t2) + static_cast<int>(e);
        auto zs = enumerate_M(static_cast<unsigned>(e), l, r);
        const auto& lhs = mins.at(e);
        auto rhs = ring.ideal_of(zs);
        ConjectureRow row{"strong", r, ring.ctx->group().factor_orders(), e, zs.size(), lhs.log_size(), rhs.log_size(),
                          ideal_equal(lhs, rhs), ""};
        if (!row.pass) row.witness = detail::inclusion_witness(lhs, rhs, "Min", "ideal(M)");
        rows.push_back(row);
    }
    return rows;
}

/// The conjectured generators T^{j+1-r} M(t2 - j, r - 1 - j), j = 0..t2, as
/// one fractional ideal over T^{r-1}.
inline FractionalIdeal weak_conjecture_rhs(const MonomialRing& lambda_ring) {
    const auto r = lambda_ring.r();
    const auto t2 = r * (r - 1) / 2;
    const auto& ctx = lambda_ring.ctx;
    IdealBuilder b(ctx);
    auto tj = RingElement::one(ctx);
    auto T = RingElement::t_power(ctx, 1);
    for (std::size_t j = 0; j <= t2; ++j) {
        for (const auto& z : enumerate_M(static_cast<unsigned>(t2 - j), static_cast<int>(r) - 1 - static_cast<int>(j), r))
            b.add(lambda_ring.value(z) * tj);
        tj *= T;
    }
    return FractionalIdeal(Ideal(b), std::vector<DenFactor>(r - 1, den_t()));
}

/// Fitt^[1] from the pruned tensor complex against the conjectured form.
/// lambda must share the group of ring.ctx.
inline ConjectureRow weak_conjecture_check(const MonomialRing& ring, const ContextPtr& lambda, unsigned jobs = 0,
                                           bool allow_r5 = false) {
    detail::warn_sweep(ring.r(), allow_r5);
    auto D = tensor_construction(ring.ctx, ring.gens, 3).D;
    auto lhs = fitt_shift1_from_complex(D, lambda, jobs);
    MonomialRing lr(lambda, ring.gens);
    auto rhs = weak_conjecture_rhs(lr);
    const auto r = ring.r();
    ConjectureRow row{"weak", r, ring.ctx->group().factor_orders(), r * (r - 1) / 2, 0,
                      lhs.numerator().log_size(), rhs.numerator().log_size(), frac_ideal_equal(lhs, rhs), ""};
    for (std::size_t j = 0; j <= row.e; ++j)
        row.monomials += enumerate_M(static_cast<unsigned>(row.e - j), static_cast<int>(r) - 1 - static_cast<int>(j), r).size();
    if (!row.pass) row.witness = "fitting ideal " + lhs.to_string() + " vs conjectured " + rhs.to_string();
    return row;
}

}  // namespace fitt
