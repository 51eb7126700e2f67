#include "fitt/ring.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fitt;

namespace {

RingElement random_element(const ContextPtr& ctx, std::mt19937& rng, int max_deg, int terms) {
    RingElement r(ctx);
    std::uniform_int_distribution<GroupIndex> g(0, static_cast<GroupIndex>(ctx->group_order() - 1));
    std::uniform_int_distribution<int> d(0, max_deg);
    std::uniform_int_distribution<std::uint64_t> c(1, ctx->mod().q - 1);
    for (int i = 0; i < terms; ++i) r += RingElement::monomial(ctx, g(rng), d(rng), static_cast<std::int64_t>(c(rng)));
    return r;
}

}  // namespace

TEST(PGroup, TrivialGroupHasOneElement) {
    PGroup g(3, {});
    EXPECT_EQ(group_elements(g).size(), 1u);
    EXPECT_EQ(g.element_string(0), "()");
}

TEST(PGroup, LexicographicEnumeration) {
    PGroup g(3, {3, 3});
    auto els = group_elements(g);
    ASSERT_EQ(els.size(), 9u);
    EXPECT_EQ(g.exponents(els.front()), (std::vector<std::uint64_t>{0, 0}));
    EXPECT_EQ(g.exponents(els.back()), (std::vector<std::uint64_t>{2, 2}));
    EXPECT_EQ(g.exponents(els[1]), (std::vector<std::uint64_t>{0, 1}));
    EXPECT_EQ(group_elements(PGroup(3, {9, 3})).size(), 27u);
}

TEST(PGroup, RejectsBadOrders) {
    EXPECT_THROW(PGroup(4, {4}), Error);
    EXPECT_THROW(PGroup(3, {6}), Error);
    EXPECT_THROW(PGroup(3, {1}), Error);
}

TEST(Subgroup, Closure) {
    PGroup c9(3, {9});
    EXPECT_EQ(Subgroup(c9, {}).elements(), std::vector<GroupIndex>{0});
    Subgroup h(c9, {c9.index({3})});
    EXPECT_EQ(h.elements(), (std::vector<GroupIndex>{0, 3, 6}));
    PGroup g(3, {3, 3});
    EXPECT_EQ(Subgroup(g, {g.index({1, 0}), g.index({0, 1})}).order(), 9u);
    EXPECT_TRUE(Subgroup(g, {g.index({1, 1})}).is_cyclic());
    EXPECT_FALSE(Subgroup::whole(g).is_cyclic());
}

TEST(Subgroup, OrderDividesGroupOrder) {
    PGroup g(3, {9, 3});
    for (GroupIndex a = 0; a < g.order(); ++a)
        for (GroupIndex b = 0; b < g.order(); b += 5) {
            Subgroup h(g, {a, b});
            EXPECT_EQ(g.order() % h.order(), 0u);
            for (auto x : h.elements())
                for (auto y : h.elements()) EXPECT_TRUE(h.contains(g.mul(x, y)));
        }
}

TEST(Cosets, Transversal) {
    PGroup c9(3, {9});
    EXPECT_EQ(coset_transversal(c9, Subgroup::whole(c9)), std::vector<GroupIndex>{0});
    EXPECT_EQ(coset_transversal(c9, Subgroup::trivial(c9)).size(), 9u);
    Subgroup h(c9, {3});
    auto reps = coset_transversal(c9, h);
    EXPECT_EQ(reps, (std::vector<GroupIndex>{0, 1, 2}));
    // brute-force partition: x ~ y iff x - y in h
    for (GroupIndex x = 0; x < 9; ++x) {
        int hits = 0;
        for (auto r : reps)
            if (h.contains(c9.mul(x, c9.inverse(r)))) ++hits;
        EXPECT_EQ(hits, 1);
    }
}

TEST(Context, Guards) {
    EXPECT_THROW(make_context(PGroup(2, {2}), 2, 2), Error);
    EXPECT_NO_THROW(make_context(PGroup(2, {2}), 2, 2, true));
    EXPECT_THROW(make_context(PGroup(3, {3}), 2, 0), Error);
}

TEST(Ring, IdentityAndZero) {
    auto ctx = make_context(PGroup(3, {3}), 2, 4);
    std::mt19937 rng(1);
    auto x = random_element(ctx, rng, 3, 5);
    EXPECT_EQ(RingElement::one(ctx) * x, x);
    EXPECT_TRUE((RingElement::zero(ctx) * x).is_zero());
    EXPECT_EQ(x - x, RingElement::zero(ctx));
}

TEST(Ring, NormTimesTauVanishes) {
    auto ctx = make_context(PGroup(3, {3, 9}), 3, 3);
    const auto& g = ctx->group();
    for (GroupIndex s = 0; s < g.order(); ++s) {
        auto m = g.element_order(s);
        auto tau = minus_one(s, ctx);
        auto nu = geometric_sum(s, m, ctx);
        EXPECT_TRUE((tau * nu).is_zero());
        Subgroup h(g, {s});
        EXPECT_EQ(norm_element(h, ctx), nu);
    }
}

TEST(Ring, ProductMatchesDoubleLoopOracle) {
    auto ctx = make_context(PGroup(3, {3}), 2, 4);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = random_element(ctx, rng, 2, 2);
        auto y = random_element(ctx, rng, 2, 2);
        std::vector<std::uint64_t> oracle(3 * 5, 0);
        for (GroupIndex a = 0; a < 3; ++a)
            for (std::size_t i = 0; i < 3; ++i)
                for (GroupIndex b = 0; b < 3; ++b)
                    for (std::size_t j = 0; j < 3; ++j) {
                        auto k = (i + j) * 3 + (a + b) % 3;
                        oracle[k] = (oracle[k] + x.coeff(a, i) * y.coeff(b, j)) % 9;
                    }
        auto z = x * y;
        for (GroupIndex g = 0; g < 3; ++g)
            for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(z.coeff(g, j), oracle[j * 3 + g]);
    }
}

TEST(Ring, CommutativeAssociativeAugmentationMultiplicative) {
    auto ctx = make_context(PGroup(3, {3, 3}), 3, 4);
    std::mt19937 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = random_element(ctx, rng, 2, 4);
        auto y = random_element(ctx, rng, 2, 4);
        auto z = random_element(ctx, rng, 2, 4);
        EXPECT_EQ(x * y, y * x);
        EXPECT_EQ((x * y) * z, x * (y * z));
        EXPECT_EQ(x * (y + z), x * y + x * z);
        EXPECT_EQ((x * y).augmentation(), ctx->mod().mul(x.augmentation(), y.augmentation()));
    }
}

TEST(Ring, NormAugmentation) {
    auto ctx = make_context(PGroup(3, {9}), 2, 2);
    auto nu = norm_element(Subgroup::whole(ctx->group()), ctx);
    EXPECT_EQ(nu.augmentation(), 0u);  // 9 mod 9
    auto ctx3 = make_context(PGroup(3, {3}), 2, 2);
    auto n3 = norm_element(Subgroup::whole(ctx3->group()), ctx3);
    EXPECT_EQ(n3.augmentation(), 3u);
    EXPECT_EQ(norm_element(Subgroup::trivial(ctx3->group()), ctx3), RingElement::one(ctx3));
    auto prod = minus_one(1, ctx3) * minus_one(2, ctx3);
    EXPECT_EQ(prod.augmentation(), 0u);
    EXPECT_EQ(minus_one(1, ctx3).augmentation(), 0u);
}

TEST(Ring, GammaPowerPoly) {
    auto ctx = make_context(PGroup(3, {3}), 2, 8);
    EXPECT_EQ(gamma_power_poly(0, ctx), RingElement::t_power(ctx, 1));
    auto w1 = gamma_power_poly(1, ctx);
    // binomial oracle: (1+T)^3 - 1 = 3T + 3T^2 + T^3
    auto expect = RingElement::monomial(ctx, 0, 1, 3) + RingElement::monomial(ctx, 0, 2, 3) +
                  RingElement::t_power(ctx, 3);
    EXPECT_EQ(w1, expect);
    EXPECT_EQ(w1.t_degree(), 3);
    EXPECT_EQ(w1.augmentation(), 0u);
    // composition: substituting T -> (1+T)^p - 1 into w_{n-1} gives w_n
    for (unsigned n = 1; n <= 3; ++n)
        EXPECT_EQ(substitute_t(gamma_power_poly(n - 1, ctx), gamma_power_poly(1, ctx)), gamma_power_poly(n, ctx));
}

TEST(Ring, InverseOfUnit) {
    auto ctx = make_context(PGroup(3, {3, 3}), 3, 1);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_element(ctx, rng, 0, 4) + RingElement::one(ctx);
        if (!x.is_unit()) continue;
        EXPECT_EQ(x * x.inverse_t_free(), RingElement::one(ctx));
    }
    EXPECT_THROW(minus_one(1, ctx).inverse_t_free(), Error);
}

TEST(Ring, RenderingIsSignedAndOrdered) {
    auto ctx = make_context(PGroup(3, {3, 3}), 2, 4);
    auto x = RingElement::group_element(ctx, ctx->group().index({1, 2})) - RingElement::one(ctx) +
             RingElement::monomial(ctx, 0, 2, 4);
    EXPECT_EQ(x.to_string(), "-1 + g1*g2^2 + 4*T^2");
    EXPECT_EQ(RingElement::zero(ctx).to_string(), "0");
}

TEST(Ring, ContextMismatch) {
    auto a = make_context(PGroup(3, {3}), 2, 4);
    auto b = make_context(PGroup(3, {3}), 3, 4);
    EXPECT_THROW(RingElement::one(a) + RingElement::one(b), Error);
}
