#include <gtest/gtest.h>

#include <symknot/bracket.hpp>
#include <symknot/refined.hpp>
#include <symknot/twist.hpp>

#include "oracles.hpp"

using namespace symknot;

namespace {

const diagram& d4() {
    static diagram d = oracle::load("D4.sud");
    return d;
}
const diagram& d4p() {
    static diagram d = oracle::load("D4prime.sud");
    return d;
}

int top_index(const diagram& d) { return *d.crossings[axis_extremes(d).first].axis_index; }
int bottom_index(const diagram& d) { return *d.crossings[axis_extremes(d).second].axis_index; }

} // namespace

TEST(Twist, OneIsIdentity) {
    EXPECT_TRUE(same_diagram(twist(d4(), 1), d4()));
    EXPECT_TRUE(same_diagram(twist(d4p(), 1), d4p()));
    EXPECT_EQ(jones(twist(d4(), 1)), jones(d4()));
}

TEST(Twist, AxisCountScales) {
    for (int h = -4; h <= 4; ++h) {
        EXPECT_EQ(twist(d4(), h).axis_count(), std::abs(h) * 4);
        EXPECT_EQ(twist(d4p(), h).axis_count(), std::abs(h) * 2);
    }
}

TEST(Twist, ZeroAgrees) { EXPECT_TRUE(same_diagram(twist(d4(), 0), twist(d4p(), 0))); }

TEST(Twist, OutputsAreSymmetricUnions) {
    for (int h = -4; h <= 4; ++h)
        for (auto* d : {&d4(), &d4p()}) {
            auto t = twist(*d, h);
            auto r = validate_symmetric_union(t);
            EXPECT_TRUE(r.ok()) << "h=" << h << " " << (r.ok() ? "" : r.failures[0].message);
            EXPECT_EQ(components(t).count, 1);
        }
}

TEST(Twist, NegativeSwitchesAxisSigns) {
    auto t = twist(d4(), -1);
    auto w = writhe(d4()), wt = writhe(t);
    EXPECT_EQ(wt.p_axis, w.n_axis);
    EXPECT_EQ(wt.n_axis, w.p_axis);
    auto t2 = twist(d4(), 2);
    EXPECT_EQ(writhe(t2).p_axis, 2 * w.p_axis);
}

TEST(TwistPartial, Identities) {
    EXPECT_TRUE(same_diagram(twist_partial(d4(), 1, 1, 1), d4()));
    EXPECT_TRUE(same_diagram(twist_partial(d4(), 0, 1, 0), d4p()));
    EXPECT_TRUE(same_diagram(twist_partial(d4(), 2, 2, 2), twist(d4(), 2)));
    EXPECT_TRUE(same_diagram(twist_partial(d4(), 0, 2, 0), twist(d4p(), 2)));
}

TEST(TwistPartial, Errors) {
    EXPECT_THROW(twist_partial(d4(), -1, 1, 1), invalid_designation);
    EXPECT_THROW(twist_partial(d4(), 1, 0, 1), invalid_designation);
    auto kink = oracle::from_pd({{0, 0, 1, 1}}, {{0, 0}});
    EXPECT_THROW(twist_partial(kink, 1, 1, 1), invalid_designation);
}

TEST(Resolve, TopZeroBottomOne) {
    auto d = twist_partial(d4(), 2, 1, 2);
    int top = top_index(d), bot = bottom_index(d);
    auto r = resolve_axis_crossing(resolve_axis_crossing(d, top, 0), bot, 1);
    EXPECT_EQ(components(r).count, 2);
    EXPECT_NO_THROW(validate(r));
}

TEST(Resolve, BothZeroGivesThreeComponents) {
    auto d = twist_partial(d4(), 1, 1, 1);
    int top = top_index(d), bot = bottom_index(d);
    auto r = resolve_axis_crossing(resolve_axis_crossing(d, top, 0), bot, 0);
    EXPECT_EQ(components(r).count, 3);
}

TEST(Resolve, BothOneDropsACrossing) {
    for (int k = 1; k <= 2; ++k)
        for (int h = 1; h <= 2; ++h) {
            auto d = twist_partial(d4(), k, h, k);
            int top = top_index(d), bot = bottom_index(d);
            auto r = resolve_axis_crossing(resolve_axis_crossing(d, top, 1), bot, 1);
            EXPECT_TRUE(same_diagram(r, twist_partial(d4(), k - 1, h, k - 1))) << k << "," << h;
        }
}

TEST(Resolve, BadIndex) {
    EXPECT_THROW(resolve_axis_crossing(d4(), 99, 0), bad_index);
    EXPECT_THROW(resolve_axis_crossing(d4(), 0, 2), bad_index);
}

TEST(Twist, RefinedAgreesAtMinusOne) {
    EXPECT_EQ(refined_W(twist(d4(), -1)), refined_W(twist(d4p(), -1)));
}
