#pragma once

// Place data over Lambda = (Z/p^N)[H][[T]], the permutation modules Z_v,
// Z^0 and the closed-form ideal expressions they are compared against.
//
// G = H x Gamma with T = gamma - 1. A place carries a cyclic inertia group
// T_v in H and a Frobenius lift h_v * gamma^{p^{n_v}}, so that
// G_v = <delta_v, h_v gamma^{p^{n_v}}>.

#include "fitt/complex.hpp"
#include "fitt/howell.hpp"
#include "fitt/ideal.hpp"
#include "fitt/monomials.hpp"
#include "fitt/ring.hpp"

#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace fitt {

struct PlaceDatum {
    std::string label;
    std::vector<std::vector<std::int64_t>> inertia_generators;  // exponent tuples in H
    std::vector<std::int64_t> frobenius_element;                 // empty means the identity
    unsigned n_v = 0;
};

/// Finite quotient G_alg = H x <c>, c of order p^n, through which every
/// decomposition group factors, with the lift h c^k -> h (1+T)^k.
struct AlgebraicModel {
    unsigned n = 0;
    ContextPtr R;  // (Z/p^N)[G_alg], T-free
    std::vector<GroupIndex> embed;  // H -> G_alg
    GroupIndex c = 0;
    std::vector<Subgroup> decomposition;
    ContextPtr lambda;
    std::vector<RingElement> one_plus_t_powers;

    RingElement lift(const RingElement& x) const {
        auto out = RingElement::zero(lambda);
        const auto& g = R->group();
        const auto& h = lambda->group();
        const auto k = h.factor_orders().size();
        for (GroupIndex a = 0; a < g.order(); ++a) {
            auto coef = x.coeff(a, 0);
            if (!coef) continue;
            auto e = g.exponents(a);
            std::vector<std::int64_t> he(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k));
            GroupIndex hi = h.index(std::span<const std::int64_t>(he));
            std::uint64_t pw = n > 0 ? e.back() : 0;
            out += one_plus_t_powers[pw].shifted_by(hi).scaled(static_cast<std::int64_t>(coef));
        }
        return out;
    }
    LiftMap lift_map() const {
        return [this](const RingElement& x) { return lift(x); };
    }
    RingMatrix lift(const RingMatrix& m) const { return lift_matrix(m, lambda, lift_map()); }
    DenFactor w() const { return den_gamma(n, lambda->p()); }
};

class Scenario {
public:
    Scenario(ContextPtr lambda, std::vector<PlaceDatum> places) : lambda_(std::move(lambda)), places_(std::move(places)) {
        if (places_.empty()) throw Error("scenario: the set of places must be nonempty");
        const auto& H = lambda_->group();
        for (const auto& v : places_) {
            std::vector<GroupIndex> gens;
            for (const auto& e : v.inertia_generators) gens.push_back(H.index(std::span<const std::int64_t>(e)));
            Subgroup t(H, gens);
            auto delta = t.cyclic_generator();
            if (!delta) throw Error("scenario: inertia group of " + v.label + " is not cyclic");
            inertia_.push_back(t);
            delta_.push_back(*delta);
            GroupIndex h = 0;
            if (!v.frobenius_element.empty()) h = H.index(std::span<const std::int64_t>(v.frobenius_element));
            frob_.push_back(h);
        }
    }

    const ContextPtr& lambda() const { return lambda_; }
    const std::vector<PlaceDatum>& places() const { return places_; }
    std::size_t size() const { return places_.size(); }
    const Subgroup& inertia(std::size_t i) const { return inertia_.at(i); }
    GroupIndex delta(std::size_t i) const { return delta_.at(i); }
    GroupIndex frobenius_element(std::size_t i) const { return frob_.at(i); }
    unsigned n_v(std::size_t i) const { return places_.at(i).n_v; }
    /// The lift of the Frobenius has no H-component.
    bool inertial_degree_one(std::size_t i) const { return frob_.at(i) == 0; }

    /// sigma~_v - 1 as a denominator factor.
    DenFactor frobenius_den(std::size_t i) const {
        std::uint64_t e = 1;
        for (unsigned k = 0; k < n_v(i); ++k) e *= lambda_->p();
        return {frob_.at(i), e};
    }
    RingElement frobenius_minus_one(std::size_t i) const { return den_value(frobenius_den(i), lambda_); }
    RingElement inertia_norm(std::size_t i) const { return norm_element(inertia_.at(i), lambda_); }

    Scenario with_places(const std::vector<PlaceDatum>& extra) const {
        auto all = places_;
        all.insert(all.end(), extra.begin(), extra.end());
        return Scenario(lambda_, all);
    }
    Scenario only(std::size_t i) const { return Scenario(lambda_, {places_.at(i)}); }

    const AlgebraicModel& model() const {
        if (!model_) model_ = std::make_shared<AlgebraicModel>(build_model());
        return *model_;
    }

private:
    AlgebraicModel build_model() const {
        const auto& H = lambda_->group();
        const auto p = lambda_->p();
        AlgebraicModel m;
        // c^{p^n} must lie in every G_v: n >= n_v + log_p(order of h_v mod T_v).
        for (std::size_t i = 0; i < size(); ++i) {
            unsigned k = 0;
            GroupIndex x = frob_[i];
            while (!inertia_[i].contains(x)) {
                x = H.power(x, p);
                ++k;
            }
            m.n = std::max(m.n, n_v(i) + k);
        }
        auto orders = H.factor_orders();
        std::uint64_t pn = 1;
        for (unsigned k = 0; k < m.n; ++k) pn *= p;
        if (m.n > 0) orders.push_back(pn);
        PGroup G(p, orders);
        m.R = make_context(G, lambda_->coeff_precision(), 1, p == 2);
        m.lambda = lambda_;
        for (GroupIndex a = 0; a < H.order(); ++a) {
            auto e = H.exponents(a);
            std::vector<std::int64_t> ge(e.begin(), e.end());
            if (m.n > 0) ge.push_back(0);
            m.embed.push_back(G.index(std::span<const std::int64_t>(ge)));
        }
        if (m.n > 0) m.c = G.factor_generator(orders.size() - 1);
        auto step = RingElement::one(lambda_) + RingElement::t_power(lambda_, 1);
        m.one_plus_t_powers.push_back(RingElement::one(lambda_));
        for (std::uint64_t k = 1; k < std::max<std::uint64_t>(pn, 1); ++k)
            m.one_plus_t_powers.push_back(m.one_plus_t_powers.back() * step);
        for (std::size_t i = 0; i < size(); ++i) {
            std::uint64_t e = 1;
            for (unsigned k = 0; k < n_v(i); ++k) e *= p;
            auto frob = G.mul(m.embed[frob_[i]], G.power(m.c, e));
            m.decomposition.emplace_back(G, std::vector<GroupIndex>{m.embed[delta_[i]], frob});
        }
        return m;
    }

    ContextPtr lambda_;
    std::vector<PlaceDatum> places_;
    std::vector<Subgroup> inertia_;
    std::vector<GroupIndex> delta_, frob_;
    mutable std::shared_ptr<AlgebraicModel> model_;
};

// ---------------------------------------------------------------------------
// Z_v and Z^0

/// Rank-one presentation of Z_v: relations sigma~_v - 1 and delta_v - 1.
inline RingMatrix build_Zv(const Scenario& s, std::size_t i) {
    const auto& L = s.lambda();
    return RingMatrix::from_rows(L, {{s.frobenius_minus_one(i)}, {minus_one(s.delta(i), L)}});
}

/// Z_{S'} = sum_v Z_p[G/G_v] as a (Z/p^N)-module with the G_alg action, and
/// the kernel Z^0 of the augmentation.
struct Z0Data {
    const AlgebraicModel* model = nullptr;
    std::vector<std::size_t> offset;  // first ambient coordinate of each place
    std::vector<CosetData> cosets;
    std::size_t ambient_rank = 0;
    std::vector<ResidueVector> generators;  // (Z/p^N)-generators of Z^0
    std::uint64_t log_size = 0;

    std::size_t rank() const { return ambient_rank - 1; }

    /// g . x on ambient coordinates.
    ResidueVector act(GroupIndex g, const ResidueVector& x) const {
        const auto& G = model->R->group();
        ResidueVector y(x.size(), 0);
        for (std::size_t v = 0; v < cosets.size(); ++v) {
            const auto& cd = cosets[v];
            for (std::size_t k = 0; k < cd.representatives.size(); ++k) {
                auto a = x[offset[v] + k];
                if (!a) continue;
                y[offset[v] + cd.coset_of[G.mul(g, cd.representatives[k])]] = a;
            }
        }
        return y;
    }
};

inline Z0Data build_Z0(const Scenario& s) {
    Z0Data z;
    z.model = &s.model();
    const auto& m = *z.model;
    const auto mod = m.R->mod();
    for (std::size_t v = 0; v < s.size(); ++v) {
        z.offset.push_back(z.ambient_rank);
        z.cosets.push_back(coset_data(m.R->group(), m.decomposition[v]));
        z.ambient_rank += z.cosets.back().representatives.size();
    }
    ResidueMatrix aug(mod, 1);
    for (std::size_t k = 0; k < z.ambient_rank; ++k) aug.add_row({1});
    z.generators = kernel(aug);
    ResidueMatrix g(mod, z.ambient_rank);
    for (const auto& x : z.generators) g.add_row(x);
    z.log_size = howell_builder(g).log_size();
    if (z.log_size != static_cast<std::uint64_t>(z.rank()) * static_cast<std::uint64_t>(mod.N))
        throw Error("build_Z0: kernel of the augmentation is not free of the expected rank");
    return z;
}

namespace detail {

// Greedy module generators: keep a candidate when it is outside the span of
// the G-translates of those kept so far.
inline std::vector<ResidueVector> module_generators(const Modulus& mod, std::size_t width, std::size_t group_order,
                                                    const std::vector<ResidueVector>& candidates,
                                                    const std::function<ResidueVector(GroupIndex, const ResidueVector&)>& act) {
    HowellBuilder span(mod, width);
    std::vector<ResidueVector> kept;
    for (const auto& x : candidates) {
        if (span.contains(x)) continue;
        kept.push_back(x);
        for (GroupIndex g = 0; g < group_order; ++g) span.insert(act(g, x));
    }
    return kept;
}

inline ResidueVector act_free(const PGroup& G, GroupIndex g, const ResidueVector& x) {
    const auto n = G.order();
    ResidueVector y(x.size(), 0);
    for (std::size_t j = 0; j < x.size() / n; ++j)
        for (GroupIndex k = 0; k < n; ++k) y[j * n + G.mul(g, k)] = x[j * n + k];
    return y;
}

inline RingMatrix rows_to_matrix(const ContextPtr& R, const std::vector<ResidueVector>& rows, std::size_t cols) {
    const auto n = R->group_order();
    RingMatrix out(R, rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            for (GroupIndex g = 0; g < n; ++g)
                if (auto c = rows[i][j * n + g]) out.at(i, j).set(g, 0, c);
    return out;
}

}  // namespace detail

/// R^{t3} -A-> R^{t2} -> R^{t1} -> Z^0 -> 0 over R = (Z/p^N)[G_alg], found by
/// greedy generators and flattened kernels, then reduced by unit pivots.
/// Degrees 1..3 of the returned complex; degree 0 is empty.
inline FreeComplex direct_resolution(const Z0Data& z) {
    const auto& m = *z.model;
    const auto& R = m.R;
    const auto& G = R->group();
    const auto mod = R->mod();
    const auto n = G.order();
    auto gens1 = detail::module_generators(mod, z.ambient_rank, n, z.generators,
                                           [&](GroupIndex g, const ResidueVector& x) { return z.act(g, x); });
    const auto t1 = gens1.size();
    ResidueMatrix phi(mod, z.ambient_rank);
    for (const auto& x : gens1)
        for (GroupIndex g = 0; g < n; ++g) phi.add_row(z.act(g, x));
    auto free_act = [&](GroupIndex g, const ResidueVector& x) { return detail::act_free(G, g, x); };
    auto gens2 = detail::module_generators(mod, t1 * n, n, kernel(phi), free_act);
    auto d2 = detail::rows_to_matrix(R, gens2, t1);
    auto gens3 = detail::module_generators(mod, gens2.size() * n, n, kernel(module_rows(d2)), free_act);
    auto d3 = detail::rows_to_matrix(R, gens3, gens2.size());
    FreeComplex c(R);
    c.push_degree0({});
    auto names = [](const char* s, std::size_t k) {
        std::vector<std::string> v;
        for (std::size_t i = 0; i < k; ++i) v.push_back(std::string(s) + std::to_string(i + 1));
        return v;
    };
    c.push_degree(names("a", t1), RingMatrix(R, t1, 0));
    c.push_degree(names("b", gens2.size()), d2);
    c.push_degree(names("c", gens3.size()), d3);
    if (!c.is_complex()) throw Error("direct_resolution: boundaries do not compose to zero");
    return minimize(c, 3);
}

// ---------------------------------------------------------------------------
// Splitting along a dominant decomposition group

struct SplitData {
    std::size_t v_star = 0;
    std::vector<ResidueVector> section;  // images of the basis of the other Z_v
    bool is_section = false;
    bool lands_in_Z0 = false;
};

/// s(x)_v = x_v for v != v*, s(x)_{v*} = -sum pi_v(x_v).
inline SplitData split_Z0(const Scenario& s, std::size_t v_star) {
    const auto& m = s.model();
    for (std::size_t v = 0; v < s.size(); ++v)
        if (!m.decomposition[v_star].contains(m.decomposition[v]))
            throw Error("split_Z0: decomposition group of " + s.places()[v].label + " is not contained in that of " +
                        s.places()[v_star].label);
    auto z = build_Z0(s);
    const auto mod = m.R->mod();
    const auto& G = m.R->group();
    SplitData out;
    out.v_star = v_star;
    const auto& star = z.cosets[v_star];
    for (std::size_t v = 0; v < s.size(); ++v) {
        if (v == v_star) continue;
        for (std::size_t k = 0; k < z.cosets[v].representatives.size(); ++k) {
            ResidueVector x(z.ambient_rank, 0);
            x[z.offset[v] + k] = 1;
            auto target = star.coset_of[z.cosets[v].representatives[k]];
            x[z.offset[v_star] + target] = mod.sub(x[z.offset[v_star] + target], 1);
            out.section.push_back(x);
        }
    }
    // projection onto the other summands recovers the basis; augmentation vanishes
    out.is_section = true;
    out.lands_in_Z0 = true;
    std::size_t idx = 0;
    for (std::size_t v = 0; v < s.size(); ++v) {
        if (v == v_star) continue;
        for (std::size_t k = 0; k < z.cosets[v].representatives.size(); ++k, ++idx) {
            const auto& x = out.section[idx];
            for (std::size_t u = 0; u < s.size(); ++u) {
                if (u == v_star) continue;
                for (std::size_t l = 0; l < z.cosets[u].representatives.size(); ++l) {
                    auto want = (u == v && l == k) ? 1u : 0u;
                    if (x[z.offset[u] + l] != want) out.is_section = false;
                }
            }
            std::uint64_t a = 0;
            for (auto c : x) a = mod.add(a, c);
            if (a) out.lands_in_Z0 = false;
        }
    }
    // G-equivariance of s on basis vectors
    idx = 0;
    for (std::size_t v = 0; v < s.size() && out.is_section; ++v) {
        if (v == v_star) continue;
        for (std::size_t k = 0; k < z.cosets[v].representatives.size(); ++k, ++idx)
            for (GroupIndex g = 0; g < G.order(); ++g) {
                auto gx = z.act(g, out.section[idx]);
                auto k2 = z.cosets[v].coset_of[G.mul(g, z.cosets[v].representatives[k])];
                std::size_t j = idx - k + k2;
                if (gx != out.section[j]) out.is_section = false;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fitt^[1](Z^0) by construction method

enum class Method { Direct, Bar, Tensor, Cone, Split };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Direct: return "direct";
        case Method::Bar: return "bar";
        case Method::Tensor: return "tensor";
        case Method::Cone: return "cone";
        case Method::Split: return "split";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
    for (auto m : {Method::Direct, Method::Bar, Method::Tensor, Method::Cone, Method::Split})
        if (method_name(m) == s) return m;
    return std::nullopt;
}

namespace detail {

inline bool frobenius_is_gamma(const Scenario& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.frobenius_element(i) != 0 || s.n_v(i) != 0) return false;
    return true;
}

}  // namespace detail

/// G = prod of the inertia groups of the places, one per cyclic factor, and
/// every Frobenius lift equal to gamma.
inline bool tensor_applies(const Scenario& s) {
    const auto& H = s.lambda()->group();
    if (!detail::frobenius_is_gamma(s) || s.size() != H.rank()) return false;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s.inertia(i) == Subgroup(H, {H.factor_generator(i)}))) return false;
    return true;
}

/// One place, Frobenius gamma, inertia a product of subgroups of the factors.
inline std::optional<std::vector<std::uint64_t>> cone_indices(const Scenario& s) {
    if (s.size() != 1 || !detail::frobenius_is_gamma(s)) return std::nullopt;
    const auto& H = s.lambda()->group();
    std::vector<std::uint64_t> idx;
    std::uint64_t prod = 1;
    for (std::size_t j = 0; j < H.rank(); ++j) {
        auto gj = H.factor_generator(j);
        auto oj = H.factor_orders()[j];
        std::uint64_t m = 1;
        while (m < oj && !s.inertia(0).contains(H.power(gj, m))) m *= H.p();
        idx.push_back(m);
        prod *= oj / m;
    }
    if (prod != s.inertia(0).order()) return std::nullopt;
    return idx;
}

/// Cyclic H and every Frobenius lift free of H-components.
inline bool thm47_applies(const Scenario& s) {
    if (s.lambda()->group().rank() > 1) return false;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s.inertial_degree_one(i)) return false;
    return true;
}

inline FractionalIdeal thm47_fitt(const Scenario& s, unsigned jobs = 0);

/// Fitt^[1](Z_v) = (1, nu_v / (sigma_v - 1)).
inline FractionalIdeal zv_fitt(const Scenario& s, std::size_t i) {
    return zv_fitt1(s.inertia(i), s.frobenius_den(i), s.lambda());
}

inline FractionalIdeal fitt1_Z0(const Scenario& s, Method method, unsigned jobs = 0, std::size_t budget = default_rank_budget) {
    const auto& L = s.lambda();
    switch (method) {
        case Method::Direct: {
            const auto& m = s.model();
            auto D = direct_resolution(build_Z0(s));
            return fitt_shift1_lifted(m.lift(D.d(3)), 0, D.rank(1), D.rank(2), m.w(), jobs);
        }
        case Method::Bar: {
            const auto& m = s.model();
            auto D = bar_cone(m.R, m.decomposition, 3, budget);
            return fitt_shift1_from_complex(D, L, m.lift_map(), m.w(), jobs);
        }
        case Method::Tensor: {
            if (!tensor_applies(s)) throw Error("fitt1_Z0: tensor route needs one place per cyclic factor of H");
            const auto& m = s.model();
            auto t = tensor_construction(m.R, all_factor_generators(m.R->group()), 3);
            return fitt_shift1_from_complex(t.D, L, jobs);
        }
        case Method::Cone: {
            if (auto idx = cone_indices(s)) {
                const auto& m = s.model();
                auto c = cone_construction(m.R, all_factor_generators(m.R->group()), *idx, 3);
                return fitt_shift1_from_complex(c.D, L, jobs);
            }
            if (thm47_applies(s)) return thm47_fitt(s, jobs);
            throw Error("fitt1_Z0: cone route needs a single place or cyclic H with inertial degree one");
        }
        case Method::Split: {
            // Z^0 = Z^0_{v*} + sum_{v != v*} Z_v for a dominant v*
            const auto& m = s.model();
            std::optional<std::size_t> star;
            for (std::size_t v = 0; v < s.size() && !star; ++v) {
                bool dom = true;
                for (std::size_t u = 0; u < s.size(); ++u)
                    if (!m.decomposition[v].contains(m.decomposition[u])) dom = false;
                if (dom) star = v;
            }
            if (!star) throw Error("fitt1_Z0: no place has a decomposition group containing all others");
            auto split = split_Z0(s, *star);
            if (!split.is_section || !split.lands_in_Z0) throw Error("fitt1_Z0: splitting map failed verification");
            auto f = fitt1_Z0(s.only(*star), Method::Direct, jobs);
            for (std::size_t v = 0; v < s.size(); ++v)
                if (v != *star) f = frac_product(f, zv_fitt(s, v));
            return f;
        }
    }
    throw Error("fitt1_Z0: unknown method");
}

inline std::vector<Method> applicable_methods(const Scenario& s, std::size_t budget = default_rank_budget) {
    std::vector<Method> out{Method::Direct};
    const auto& m = s.model();
    std::uint64_t g = m.R->group_order();
    if (g * g * g <= budget) out.push_back(Method::Bar);
    if (tensor_applies(s)) out.push_back(Method::Tensor);
    if (cone_indices(s) || thm47_applies(s)) out.push_back(Method::Cone);
    return out;
}

// ---------------------------------------------------------------------------
// Closed forms

inline bool totally_ramified(const Scenario& s, std::size_t i) { return s.inertia(i) == Subgroup::whole(s.lambda()->group()); }

/// (1, nu_H T / (sigma_{v*} - 1)) prod_{v != v*} (1, nu_v / (sigma_v - 1)).
inline FractionalIdeal thm46_rhs(const Scenario& s, std::size_t v_star) {
    if (!totally_ramified(s, v_star)) throw Error("thm46_rhs: " + s.places()[v_star].label + " is not totally ramified");
    const auto& m = s.model();
    for (std::size_t v = 0; v < s.size(); ++v)
        if (!m.decomposition[v_star].contains(m.decomposition[v]))
            throw Error("thm46_rhs: decomposition group of " + s.places()[v_star].label + " does not contain all others");
    const auto& L = s.lambda();
    auto nuH = norm_element(Subgroup::whole(L->group()), L);
    auto f = FractionalIdeal::from_terms(
        L, {{RingElement::one(L), {}}, {nuH * RingElement::t_power(L, 1), {s.frobenius_den(v_star)}}});
    for (std::size_t v = 0; v < s.size(); ++v)
        if (v != v_star) f = frac_product(f, zv_fitt(s, v));
    return f;
}

/// sum_{v'} (1, nu_H T / (sigma_{v'} - 1)) prod_{v != v'} (1, nu_H / (sigma_v - 1)).
inline FractionalIdeal thm45_rhs(const Scenario& s) {
    const auto& L = s.lambda();
    for (std::size_t v = 0; v < s.size(); ++v)
        if (!totally_ramified(s, v)) throw Error("thm45_rhs: " + s.places()[v].label + " is not totally ramified");
    auto nuH = norm_element(Subgroup::whole(L->group()), L);
    auto T = RingElement::t_power(L, 1);
    std::optional<FractionalIdeal> sum;
    for (std::size_t a = 0; a < s.size(); ++a) {
        auto f = FractionalIdeal::from_terms(L, {{RingElement::one(L), {}}, {nuH * T, {s.frobenius_den(a)}}});
        for (std::size_t v = 0; v < s.size(); ++v)
            if (v != a)
                f = frac_product(f, FractionalIdeal::from_terms(L, {{RingElement::one(L), {}}, {nuH, {s.frobenius_den(v)}}}));
        sum = sum ? frac_sum(*sum, f) : f;
    }
    return *sum;
}

/// Places with minimal n_v; each is a valid v* in the degree-p setting.
inline std::vector<std::size_t> minimal_layer_places(const Scenario& s) {
    unsigned lo = s.n_v(0);
    for (std::size_t v = 1; v < s.size(); ++v) lo = std::min(lo, s.n_v(v));
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < s.size(); ++v)
        if (s.n_v(v) == lo) out.push_back(v);
    return out;
}

/// (2r+2) x (r+1) presentation of Cok(d_3) for cyclic H.
inline RingMatrix thm47_B_matrix(const Scenario& s) {
    if (!thm47_applies(s)) throw Error("thm47: needs cyclic H and inertial degree one at every place");
    const auto& L = s.lambda();
    const auto r = s.size();
    auto delta = L->group().rank() ? L->group().factor_generator(0) : GroupIndex{0};
    RingMatrix B(L, 2 * r + 2, r + 1);
    for (std::size_t i = 0; i < r; ++i) {
        B.at(i, i) = -s.inertia_norm(i);
        B.at(i, r) = RingElement::one(L);
        B.at(r + 1 + i, i) = s.frobenius_minus_one(i);
    }
    B.at(r, r) = minus_one(delta, L);
    B.at(2 * r + 1, r) = RingElement::t_power(L, 1);
    return B;
}

/// T prod nu_i, (delta - 1) prod nu_i, and prod_{J} nu_i prod_{not J} (sigma~_i - 1)
/// over proper subsets J.
inline std::vector<RingElement> thm47_generators(const Scenario& s) {
    if (!thm47_applies(s)) throw Error("thm47: needs cyclic H and inertial degree one at every place");
    const auto& L = s.lambda();
    const auto r = s.size();
    auto delta = L->group().rank() ? L->group().factor_generator(0) : GroupIndex{0};
    auto all_nu = RingElement::one(L);
    for (std::size_t i = 0; i < r; ++i) all_nu *= s.inertia_norm(i);
    std::vector<RingElement> out{RingElement::t_power(L, 1) * all_nu, minus_one(delta, L) * all_nu};
    for (std::uint64_t J = 0; J + 1 < (std::uint64_t{1} << r); ++J) {
        auto x = RingElement::one(L);
        for (std::size_t i = 0; i < r; ++i) x *= ((J >> i) & 1) ? s.inertia_norm(i) : s.frobenius_minus_one(i);
        out.push_back(x);
    }
    return out;
}

inline FractionalIdeal thm47_fitt(const Scenario& s, unsigned jobs) {
    auto B = thm47_B_matrix(s);
    std::vector<DenFactor> den;
    for (std::size_t i = 0; i < s.size(); ++i) den.push_back(s.frobenius_den(i));
    return FractionalIdeal(minors(B, s.size() + 1, jobs), den);
}

// ---------------------------------------------------------------------------
// The totally ramified single place over H x C_{p^n}

/// [ (d3')~ ; w_n I ] with gamma_K - 1 lifted to T and N_n to w_n / T.
inline RingMatrix thm51_stacked_matrix(const ContextPtr& L, GroupIndex delta, unsigned n) {
    auto wn = gamma_power_poly(n, L);
    auto Nn = RingElement::zero(L);
    auto power = RingElement::one(L);
    auto step = RingElement::one(L) + RingElement::t_power(L, 1);
    std::uint64_t pn = 1;
    for (unsigned k = 0; k < n; ++k) pn *= L->p();
    for (std::uint64_t k = 0; k < pn; ++k) {
        Nn += power;
        power *= step;
    }
    auto T = RingElement::t_power(L, 1);
    auto dm = minus_one(delta, L);
    auto NH = norm_element(Subgroup(L->group(), {delta}), L);
    auto z = RingElement::zero(L);
    return RingMatrix::from_rows(L, {{T, z}, {dm, -Nn}, {z, NH}, {wn, z}, {z, wn}});
}

// ---------------------------------------------------------------------------
// Independence of the set of places

struct IndependenceReport {
    bool pass = false;
    FractionalIdeal lhs, rhs;
};

/// Fitt^[1](Z^0) with extra unramified places equals the original times
/// prod (sigma~_v - 1)^{-1}.
inline IndependenceReport independence_check(const Scenario& s, const std::vector<PlaceDatum>& extra, Method method,
                                             unsigned jobs = 0) {
    auto big = s.with_places(extra);
    std::vector<DenFactor> den;
    for (std::size_t i = s.size(); i < big.size(); ++i) {
        if (big.inertia(i).order() != 1) throw Error("independence_check: extra place " + big.places()[i].label + " is ramified");
        den.push_back(big.frobenius_den(i));
    }
    auto base = fitt1_Z0(s, method, jobs);
    IndependenceReport rep{false, fitt1_Z0(big, Method::Direct, jobs),
                           frac_product(base, FractionalIdeal(Ideal::unit(s.lambda()), den))};
    rep.pass = frac_ideal_equal(rep.lhs, rep.rhs);
    return rep;
}

}  // namespace fitt
