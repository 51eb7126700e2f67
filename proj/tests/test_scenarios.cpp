#include "fitt/scenarios.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fitt;

namespace {

PlaceDatum place(std::string label, std::vector<std::vector<std::int64_t>> inertia, std::vector<std::int64_t> frob = {},
                 unsigned n = 0) {
    return {std::move(label), std::move(inertia), std::move(frob), n};
}

Scenario ex45(int N, int M, std::vector<std::uint64_t> orders = {3, 3}) {
    auto L = make_context(PGroup(3, orders), N, M);
    return Scenario(L, {place("v1", {{1, 0}}), place("v2", {{0, 1}})});
}

std::uint64_t pow_p(std::uint64_t p, unsigned n) {
    std::uint64_t r = 1;
    while (n--) r *= p;
    return r;
}

}  // namespace

TEST(Scenario, RejectsBadInput) {
    auto L = make_context(PGroup(3, {3, 3}), 2, 4);
    EXPECT_THROW(Scenario(L, {}), Error);
    EXPECT_THROW(Scenario(L, {place("v", {{1, 0}, {0, 1}})}), Error);
}

TEST(Scenario, AlgebraicModel) {
    auto L = make_context(PGroup(3, {9}), 2, 10);
    // g has order 3 modulo T_v = <g^3>, so one layer beyond n_v
    Scenario s(L, {place("v1", {{3}}, {1}, 1), place("v2", {{1}}, {}, 0)});
    const auto& m = s.model();
    EXPECT_EQ(m.n, 2u);
    EXPECT_EQ(m.R->group_order(), 81u);
    // index |H/T_v| p^{n_v}
    EXPECT_EQ(81u / m.decomposition[0].order(), 3u * 3u);
    EXPECT_EQ(81u / m.decomposition[1].order(), 1u);
    // lift sends the Gamma generator to 1+T
    auto c = RingElement::monomial(m.R, m.c);
    EXPECT_EQ(m.lift(c), RingElement::one(L) + RingElement::t_power(L, 1));
}

TEST(Z0, RankFormula) {
    auto L = make_context(PGroup(3, {3, 3}), 2, 4);
    Scenario s(L, {place("v1", {{1, 0}}), place("v2", {{0, 1}}, {1, 1}, 1)});
    auto z = build_Z0(s);
    // |G/G_v| = |H/T_v| p^{n_v}
    EXPECT_EQ(z.ambient_rank, 3u + 3u * 3u);
    EXPECT_EQ(z.rank(), 11u);
}

TEST(Z0, RankIsMinusOneModPRandomized) {
    std::mt19937 rng(7);
    const std::vector<std::vector<std::uint64_t>> groups{{3}, {9}, {3, 3}};
    for (int trial = 0; trial < 120; ++trial) {
        const auto& orders = groups[static_cast<std::size_t>(trial) % groups.size()];
        auto L = make_context(PGroup(3, orders), 1, 1);
        const auto& H = L->group();
        std::vector<PlaceDatum> ps;
        auto count = 1 + rng() % 3;
        for (std::size_t k = 0; k < count; ++k) {
            auto g = H.exponents(static_cast<GroupIndex>(rng() % H.order()));
            auto h = H.exponents(static_cast<GroupIndex>(rng() % H.order()));
            // G/G_v nontrivial: T_v proper or n_v > 0
            unsigned n = rng() % 2;
            std::vector<std::int64_t> ge(g.begin(), g.end()), he(h.begin(), h.end());
            ps.push_back(place("v" + std::to_string(k), {ge}, he, n));
        }
        Scenario s(L, ps);
        bool nontrivial = true;
        for (std::size_t v = 0; v < s.size(); ++v)
            if (s.model().decomposition[v].order() == s.model().R->group_order()) nontrivial = false;
        if (!nontrivial) continue;
        auto z = build_Z0(s);
        EXPECT_EQ((z.rank() + 1) % 3, 0u) << trial;
    }
}

TEST(Zv, Presentation) {
    auto L = make_context(PGroup(3, {9}), 2, 6);
    Scenario s(L, {place("v", {{3}}, {}, 1)});
    auto z = build_Zv(s, 0);
    ASSERT_EQ(z.rows(), 2u);
    EXPECT_EQ(z.at(0, 0), den_value(den_gamma(1, 3), L));
    EXPECT_EQ(z.at(1, 0), minus_one(L->group().index({3}), L));
}

TEST(Zv, FittingAgreesWithSplitRandomized) {
    // A totally ramified place with n_v = 0 dominates everything, and its own
    // Z^0 vanishes, so Fitt^[1](Z^0) = Fitt^[1](Z_v) for the second place.
    std::mt19937 rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<std::uint64_t> orders = trial % 2 ? std::vector<std::uint64_t>{9} : std::vector<std::uint64_t>{3, 3};
        auto L0 = make_context(PGroup(3, orders), 2, 1);
        const auto& H = L0->group();
        auto g = H.exponents(static_cast<GroupIndex>(rng() % H.order()));
        auto h = H.exponents(static_cast<GroupIndex>(rng() % H.order()));
        std::vector<std::int64_t> ge(g.begin(), g.end()), he(h.begin(), h.end());
        std::vector<std::vector<std::int64_t>> whole;
        for (std::size_t j = 0; j < H.rank(); ++j) {
            std::vector<std::int64_t> e(H.rank(), 0);
            e[j] = 1;
            whole.push_back(e);
        }
        if (H.rank() > 1) continue;  // totally ramified needs cyclic H
        Scenario probe(L0, {place("w", whole), place("v", {ge}, he, 0)});
        const auto p = pow_p(3, probe.model().n);
        auto L = make_context(H, 2, static_cast<int>(4 * p + 4));
        Scenario s(L, {place("w", whole), place("v", {ge}, he, 0)});
        auto direct = fitt1_Z0(s, Method::Direct);
        EXPECT_TRUE(frac_ideal_equal(direct, zv_fitt(s, 1))) << trial << " " << direct.to_string();
    }
}

TEST(Methods, AgreeOnTwoFactorScenario) {
    auto s = ex45(2, 6);
    auto methods = applicable_methods(s);
    ASSERT_EQ(methods.size(), 3u);
    auto ref = fitt1_Z0(s, Method::Tensor);
    for (auto m : methods) EXPECT_TRUE(frac_ideal_equal(ref, fitt1_Z0(s, m))) << method_name(m);
    const auto& L = s.lambda();
    auto nu = [&](std::int64_t a, std::int64_t b) { return norm_element(Subgroup(L->group(), {L->group().index({a, b})}), L); };
    auto expect = FractionalIdeal::from_terms(L, {{RingElement::one(L), {}}, {nu(1, 0), {den_t()}}, {nu(0, 1), {den_t()}}});
    EXPECT_TRUE(frac_ideal_equal(ref, expect));
}

TEST(Methods, InapplicableRouteIsAnError) {
    auto L = make_context(PGroup(3, {3, 3}), 2, 6);
    Scenario s(L, {place("v1", {{1, 0}}, {0, 1}, 0), place("v2", {{0, 1}})});
    EXPECT_THROW(fitt1_Z0(s, Method::Tensor), Error);
    EXPECT_THROW(fitt1_Z0(s, Method::Cone), Error);
    EXPECT_FALSE(parse_method("nope").has_value());
    EXPECT_EQ(*parse_method("bar"), Method::Bar);
}

TEST(Methods, ConeAndDirectWithNontrivialFrobenius) {
    auto L = make_context(PGroup(3, {9}), 2, 12);
    Scenario s(L, {place("v1", {{3}}, {}, 0), place("v2", {{1}}, {}, 1)});
    EXPECT_TRUE(frac_ideal_equal(fitt1_Z0(s, Method::Direct), fitt1_Z0(s, Method::Cone)));
}

TEST(Split, SectionIsVerified) {
    auto L = make_context(PGroup(3, {3}), 2, 8);
    Scenario s(L, {place("v1", {{1}}), place("v2", {{1}}, {}, 1), place("v3", {}, {}, 1)});
    auto sp = split_Z0(s, 0);
    EXPECT_TRUE(sp.is_section);
    EXPECT_TRUE(sp.lands_in_Z0);
    EXPECT_EQ(sp.section.size(), 3u + 9u);
    EXPECT_THROW(split_Z0(s, 2), Error);
}

TEST(Thm46, DominantPlaceFormula) {
    auto L = make_context(PGroup(3, {3}), 2, 12);
    Scenario s(L, {place("v1", {{1}}), place("v2", {{1}}, {}, 1)});
    auto f = fitt1_Z0(s, Method::Direct);
    EXPECT_TRUE(frac_ideal_equal(f, thm46_rhs(s, 0)));
    EXPECT_TRUE(frac_ideal_equal(f, fitt1_Z0(s, Method::Split)));
    EXPECT_TRUE(frac_ideal_equal(f, thm45_rhs(s)));
}

TEST(Thm46, RejectsNonDominantPlace) {
    auto L = make_context(PGroup(3, {3}), 2, 8);
    Scenario s(L, {place("v1", {{1}}), place("v2", {{1}}, {}, 1)});
    EXPECT_THROW(thm46_rhs(s, 1), Error);
    Scenario t(L, {place("v1", {}), place("v2", {{1}})});
    EXPECT_THROW(thm46_rhs(t, 0), Error);
    EXPECT_THROW(thm45_rhs(t), Error);
}

TEST(Thm46, SumFormMatchesEveryMinimalPlace) {
    auto L = make_context(PGroup(3, {3}), 2, 10);
    Scenario s(L, {place("v1", {{1}}), place("v2", {{1}}), place("v3", {{1}}, {}, 1)});
    auto mins = minimal_layer_places(s);
    EXPECT_EQ(mins, (std::vector<std::size_t>{0, 1}));
    auto sum = thm45_rhs(s);
    for (auto v : mins) EXPECT_TRUE(frac_ideal_equal(sum, thm46_rhs(s, v))) << v;
}

TEST(Thm51, StackedMatrix) {
    for (unsigned n : {0u, 1u})
        for (std::uint64_t o : {3u, 9u}) {
            auto L = make_context(PGroup(3, {o}), 2, static_cast<int>(2 * pow_p(3, n) + 4));
            auto A = thm51_stacked_matrix(L, 1, n);
            auto wn = gamma_power_poly(n, L);
            auto nuT = norm_element(Subgroup::whole(L->group()), L) * RingElement::t_power(L, 1);
            EXPECT_TRUE(ideal_equal(minors(A, 2), Ideal::generated(L, {wn, nuT})));
            auto f = fitt_shift1_stacked(A, 0, 1, den_gamma(n, 3));
            auto expect = FractionalIdeal::from_terms(L, {{RingElement::one(L), {}}, {nuT, {den_gamma(n, 3)}}});
            EXPECT_TRUE(frac_ideal_equal(f, expect));
            Scenario s(L, {place("v", {{1}}, {}, n)});
            EXPECT_TRUE(frac_ideal_equal(f, fitt1_Z0(s, Method::Direct)));
        }
}

TEST(Thm47, BMatrixMinorsMatchGeneratorList) {
    auto L = make_context(PGroup(3, {9}), 2, 12);
    std::vector<PlaceDatum> all{place("v1", {{3}}, {}, 0), place("v2", {{1}}, {}, 1), place("v3", {{3}}, {}, 1)};
    for (std::size_t r = 1; r <= 3; ++r) {
        Scenario s(L, {all.begin(), all.begin() + static_cast<long>(r)});
        auto B = thm47_B_matrix(s);
        EXPECT_EQ(B.rows(), 2 * r + 2);
        EXPECT_EQ(B.cols(), r + 1);
        EXPECT_TRUE(ideal_equal(minors(B, r + 1), Ideal::generated(L, thm47_generators(s)))) << r;
    }
}

TEST(Thm47, AgreesWithDirectRoute) {
    auto L = make_context(PGroup(3, {3}), 2, 10);
    Scenario s(L, {place("v1", {{1}}), place("v2", {}, {}, 1)});
    EXPECT_TRUE(frac_ideal_equal(thm47_fitt(s), fitt1_Z0(s, Method::Direct)));
    Scenario t(L, {place("v1", {{1}}, {1}, 0)});
    EXPECT_THROW(thm47_B_matrix(t), Error);
}

TEST(Independence, UnramifiedPlacesMultiplyByFrobenius) {
    auto s = ex45(2, 6);
    EXPECT_TRUE(independence_check(s, {place("u1", {})}, Method::Tensor).pass);
    EXPECT_TRUE(independence_check(s, {place("u1", {}), place("u2", {})}, Method::Tensor).pass);
    auto big = ex45(2, 14);
    EXPECT_TRUE(independence_check(big, {place("u1", {}, {1, 0})}, Method::Direct).pass);
    EXPECT_TRUE(independence_check(big, {place("u1", {}, {1, 1}), place("u2", {}, {}, 1)}, Method::Direct).pass);
    EXPECT_THROW(independence_check(s, {place("u1", {{1, 0}})}, Method::Direct), Error);
}

TEST(Independence, PrecisionGuard) {
    auto s = ex45(2, 6);
    EXPECT_THROW(independence_check(s, {place("u1", {}, {1, 0})}, Method::Direct), InsufficientPrecision);
}
