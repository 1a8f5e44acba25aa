#include <gtest/gtest.h>

#include <symknot/refined.hpp>

#include "oracles.hpp"

using namespace symknot;
using oracle::from_pd;

namespace {

bilaurent sh(int a, long long c = 1) { return bilaurent::monomial(c, a, 0); }

diagram axis_kink(bool positive) {
    return positive ? from_pd({{0, 0, 1, 1}}, {{0, 0}}) : from_pd({{0, 1, 1, 0}}, {{0, 0}});
}

diagram unlink(int m) {
    std::string s = "{\"free_loops\":[";
    for (int i = 0; i < m; ++i) s += std::string(i ? "," : "") + "{\"crosses_axis\":true}";
    return parse_sud(s + "],\"crossings\":[]}");
}

// one axis crossing at a time, recursively
ratfunc w_recursive(const diagram& d) {
    auto axes = axis_order(d);
    if (axes.empty()) return refined_base(d);
    int x = axes.back();
    int idx = *d.crossings[x].axis_index;
    int sg = d.sign(x);
    return ratfunc(axis_weight(sg, 0)) * w_recursive(resolve_axis_crossing(d, idx, 0)) +
           ratfunc(axis_weight(sg, 1)) * w_recursive(resolve_axis_crossing(d, idx, 1));
}

} // namespace

TEST(Refined, ResolveAxisWithoutAxisCrossings) {
    auto st = resolve_axis(from_pd({{1, 5, 2, 4}, {3, 1, 4, 6}, {5, 3, 6, 2}}));
    ASSERT_EQ(st.size(), 1u);
    EXPECT_EQ(st[0].coeff, bilaurent(1));
}

TEST(Refined, ResolveAxisKink) {
    auto st = resolve_axis(axis_kink(true));
    ASSERT_EQ(st.size(), 2u);
    EXPECT_EQ(st[0].coeff, sh(-1, -1));
    EXPECT_EQ(components(st[0].resolved).count, 2);
    EXPECT_EQ(st[1].coeff, sh(-2, -1));
    EXPECT_EQ(components(st[1].resolved).count, 1);
    for (auto& s : st) EXPECT_EQ(s.resolved.axis_count(), 0);
    auto neg = resolve_axis(axis_kink(false));
    EXPECT_EQ(neg[0].coeff, sh(1, -1));
    EXPECT_EQ(neg[1].coeff, sh(2, -1));
}

TEST(Refined, D4HasSixteenStates) {
    auto st = resolve_axis(oracle::load("D4.sud"));
    EXPECT_EQ(st.size(), 16u);
    for (auto& s : st) EXPECT_EQ(s.resolved.axis_count(), 0);
}

TEST(Refined, AxisCap) {
    EXPECT_THROW(resolve_axis(oracle::load("D4.sud"), 3), state_space_too_large);
}

TEST(Refined, Unlinks) {
    for (int m = 1; m <= 4; ++m) {
        auto w = refined_W(unlink(m));
        ASSERT_TRUE(w.is_laurent());
        EXPECT_EQ(w.to_laurent(), (-sh(1) - sh(-1)).pow(m - 1));
    }
}

TEST(Refined, AxisKinkIsOne) {
    EXPECT_EQ(refined_W(axis_kink(true)), ratfunc(1));
    EXPECT_EQ(refined_W(axis_kink(false)), ratfunc(1));
}

TEST(Refined, NoAxisCrossingsIsBaseFormula) {
    auto one = resolve_axis_crossing(oracle::load("D4prime.sud"), 0, 1);
    auto d = resolve_axis_crossing(one, *one.crossings[axis_order(one)[0]].axis_index, 0);
    ASSERT_EQ(d.axis_count(), 0);
    EXPECT_EQ(refined_W(d), refined_base(d));
}

TEST(Refined, D4EqualsD4PrimeAndIsLaurent) {
    auto a = refined_W(oracle::load("D4.sud"));
    auto b = refined_W(oracle::load("D4prime.sud"));
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.is_laurent());
}

TEST(Refined, ExpansionOrderDoesNotMatter) {
    auto d = oracle::load("D4prime.sud");
    EXPECT_EQ(w_recursive(d), refined_W(d));
    auto k = axis_kink(true);
    EXPECT_EQ(w_recursive(k), refined_W(k));
}

TEST(Refined, ThreadCountDoesNotMatter) {
    auto d = oracle::load("D4.sud");
    refined_options one, many;
    one.threads = 1;
    many.threads = 5;
    EXPECT_EQ(refined_W(d, one), refined_W(d, many));
}

TEST(Skein, RefinedCoefficientsPass) {
    auto r = check_skein_conditions(refined_skein_coefficients());
    EXPECT_TRUE(r.pass());
    EXPECT_TRUE(r.residual_b.is_zero());
    EXPECT_TRUE(r.residual_loop.is_zero());
}

TEST(Skein, PottsCoefficientsPass) { EXPECT_TRUE(check_skein_conditions(potts_skein_coefficients()).pass()); }

TEST(Skein, TrivialCoefficientsFail) {
    ratfunc one(1);
    auto r = check_skein_conditions({one, one, one, one, one, one});
    EXPECT_FALSE(r.pass());
    EXPECT_TRUE(r.residual_b.is_zero());
    EXPECT_EQ(r.residual_loop, ratfunc(3));
}
