#include <gtest/gtest.h>

#include <symknot/moves.hpp>
#include <symknot/refined.hpp>
#include <symknot/spin.hpp>
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

diagram kink_unknot() { return template_closure({move_kind::S1minus}, false); }

diagram circle() {
    return parse_sud("{\"free_loops\":[{\"crosses_axis\":true}],\"crossings\":[]}");
}

struct invariants {
    bilaurent j;
    ratfunc w;
    spin_value i;
};

invariants compute(const diagram& d) {
    bracket_options bo;
    bo.method = bracket_method::contraction;
    refined_options ro;
    ro.bracket = bo;
    partition_options po;
    po.method = partition_method::elimination;
    static const spin_model m = potts_model(4, 1, 0, spin_backend::exact);
    return {jones(d, bo), refined_W(d, ro), normalized_I(m, d, po)};
}

void expect_same_invariants(const invariants& a, const diagram& d, const std::string& what, bool weak) {
    auto b = compute(d);
    EXPECT_EQ(a.j, b.j) << what;
    if (!weak) return;
    EXPECT_EQ(a.w, b.w) << what;
    EXPECT_TRUE(a.i.equals(b.i)) << what << ": " << a.i.str() << " vs " << b.i.str();
}

std::vector<move_spec> elementary_specs() {
    std::vector<move_spec> v;
    for (auto k : class_kinds(move_class::weak)) v.push_back({k});
    return v;
}

int count_kind(const move_script& s, move_kind k) {
    return static_cast<int>(std::count_if(s.steps.begin(), s.steps.end(), [k](auto& st) { return st.spec.kind == k; }));
}

} // namespace

TEST(MoveSpec, ParseAndPrint) {
    for (std::string s : {"R1sym", "S2v", "S4mn(2,3)", "S4mn(-1,-2)", "S2pmn(-,2)", "S2pmn(+,-3)"})
        EXPECT_EQ(parse_move_spec(s).str(), s);
    EXPECT_THROW(parse_move_spec("S5"), parse_error);
    EXPECT_THROW(parse_move_spec("S4mn"), parse_error);
    EXPECT_THROW(parse_move_spec("S2pmn(x,1)"), parse_error);
    EXPECT_THROW(parse_move_spec("R1sym(1,1)"), parse_error);
}

TEST(MoveSpec, Classes) {
    EXPECT_FALSE(in_class(move_kind::S2v, move_class::symmetric));
    EXPECT_TRUE(in_class(move_kind::S2v, move_class::weak));
    EXPECT_TRUE(in_class(move_kind::S4, move_class::symmetric));
    EXPECT_FALSE(in_class(move_kind::S4mn, move_class::weak));
    EXPECT_EQ(class_kinds(move_class::weak).size(), class_kinds(move_class::symmetric).size() + 1);
}

TEST(MoveTemplates, InterfacesAgree) {
    for (auto& sp : elementary_specs()) {
        auto& T = get_template(sp);
        ASSERT_FALSE(T.variants.empty()) << sp.str();
        for (auto& V : T.variants) {
            EXPECT_EQ(V.lhs.t.boundary.size(), V.rhs.t.boundary.size()) << sp.str() << " " << V.tag;
            EXPECT_EQ(V.lhs.t.boundary_pos, V.rhs.t.boundary_pos) << sp.str() << " " << V.tag;
        }
    }
}

// Both closures of each template are the same knot: the Jones polynomial is
// checked against the state-tracing oracle on both sides.
TEST(MoveTemplates, ClosuresAgree) {
    std::vector<move_spec> specs = elementary_specs();
    for (std::string s : {"S4mn(2,1)", "S4mn(1,-1)", "S4mn(-2,-2)", "S2pmn(-,-2)", "S2pmn(+,2)", "S2pmn(-,3)"})
        specs.push_back(parse_move_spec(s));
    for (auto& sp : specs) {
        diagram l = template_closure(sp, false), r = template_closure(sp, true);
        validate(l);
        validate(r);
        EXPECT_TRUE(validate_symmetric_union(l).ok()) << sp.str();
        EXPECT_TRUE(validate_symmetric_union(r).ok()) << sp.str();
        EXPECT_GE(l.num_crossings(), r.num_crossings()) << sp.str();
        auto jl = oracle::jones_by_tracing(l);
        EXPECT_EQ(jl, oracle::jones_by_tracing(r)) << sp.str();
        EXPECT_EQ(jones(l), jl) << sp.str();
        bool hit = false;
        for (auto& site : enumerate_sites(l, sp, move_direction::forward)) hit = hit || same_diagram(apply_move(l, site), r);
        EXPECT_TRUE(hit) << sp.str();
    }
}

TEST(MoveTemplates, WeakMovesKeepRefinedInvariants) {
    for (auto& sp : elementary_specs()) {
        diagram l = template_closure(sp, false), r = template_closure(sp, true);
        EXPECT_EQ(refined_W(l), refined_W(r)) << sp.str();
        auto m = potts_model(4, -1, 1, spin_backend::exact);
        EXPECT_TRUE(normalized_I(m, l).equals(normalized_I(m, r))) << sp.str();
    }
}

TEST(MoveTemplates, KinkSigns) {
    // the axis kink of each S1 template has the oriented sign its name says
    for (auto [k, sg] : {std::pair{move_kind::S1plus, 1}, std::pair{move_kind::S1minus, -1}}) {
        diagram l = template_closure({k}, false);
        ASSERT_EQ(l.num_crossings(), 1);
        EXPECT_EQ(l.sign(0), sg);
    }
}

TEST(MoveSites, KinkUnknot) {
    diagram u = kink_unknot();
    auto sites = enumerate_sites(u, {move_kind::S1minus}, move_direction::forward);
    ASSERT_EQ(sites.size(), 1u);
    diagram r = apply_move(u, sites[0]);
    EXPECT_EQ(r.num_crossings(), 0);
    ASSERT_EQ(r.free_loops.size(), 1u);
    EXPECT_TRUE(r.free_loops[0].crosses_axis);
    EXPECT_TRUE(same_diagram(r, circle()));
    EXPECT_TRUE(enumerate_sites(u, {move_kind::S1plus}, move_direction::forward).empty());
}

TEST(MoveSites, CircleHasOnlyInsertions) {
    diagram c = circle();
    EXPECT_TRUE(enumerate_sites(c, {move_kind::R2sym}, move_direction::forward).empty());
    auto ins = enumerate_sites(c, {move_kind::R2sym}, move_direction::reverse);
    EXPECT_FALSE(ins.empty());
    for (auto& s : ins) {
        diagram r = apply_move(c, s);
        EXPECT_EQ(r.num_crossings(), 4);
        EXPECT_TRUE(validate_symmetric_union(r).ok());
        EXPECT_EQ(oracle::jones_by_tracing(r), jones(c));
    }
}

TEST(MoveSites, S4OnD4) {
    // two adjacent axis crossings of D4 form the simple side of an S4 move
    auto sites = enumerate_sites(d4(), {move_kind::S4}, move_direction::reverse);
    ASSERT_GE(sites.size(), 1u);
    auto j = jones(d4());
    for (auto& s : sites) {
        diagram r = apply_move(d4(), s);
        EXPECT_EQ(r.axis_count(), d4().axis_count());
        EXPECT_EQ(r.num_crossings(), d4().num_crossings() + 8);
        bracket_options bo;
        bo.method = bracket_method::contraction;
        EXPECT_EQ(jones(r, bo), j);
    }
}

TEST(MoveSites, FingerprintRoundTrip) {
    for (auto& sp : elementary_specs())
        for (auto dir : {move_direction::forward, move_direction::reverse})
            for (auto& s : enumerate_sites(d4(), sp, dir)) {
                auto t = site_from_fingerprint(sp, dir, s.fingerprint());
                EXPECT_EQ(t.fingerprint(), s.fingerprint());
                EXPECT_TRUE(same_diagram(apply_move(d4(), t), apply_move(d4(), s)));
            }
}

TEST(MoveSites, WrongSiteThrows) {
    auto s = enumerate_sites(d4(), {move_kind::S3}, move_direction::forward).at(0);
    EXPECT_THROW(apply_move(d4p(), s), site_mismatch);
    EXPECT_THROW(apply_move(d4(), {move_kind::S3}, move_direction::forward, "i/0.0,"), site_mismatch);
    EXPECT_THROW(apply_move(d4(), {move_kind::S3}, move_direction::forward, "q/0.0,"), site_mismatch);
    EXPECT_THROW(apply_move(d4(), {move_kind::S3}, move_direction::forward, "nonsense"), parse_error);
}

TEST(MoveSites, ApplyThenUndo) {
    for (const diagram* d : {&d4(), &d4p()}) {
        std::string orig = canonical_form(*d);
        for (auto& sp : elementary_specs())
            for (auto dir : {move_direction::forward, move_direction::reverse})
                for (auto& s : enumerate_sites(*d, sp, dir)) {
                    diagram r = apply_move(*d, s);
                    validate(r);
                    EXPECT_TRUE(validate_symmetric_union(r).ok()) << sp.str();
                    EXPECT_TRUE(find_step(r, sp, orig, {opposite(dir)})) << sp.str() << " " << s.fingerprint();
                }
    }
}

TEST(MoveSites, S2vExchangesStrands) {
    diagram two = template_closure({move_kind::S2v}, true);
    auto sites = enumerate_sites(two, {move_kind::S2v}, move_direction::reverse);
    ASSERT_FALSE(sites.empty());
    auto w = refined_W(two);
    for (auto& s : sites) {
        diagram r = apply_move(two, s);
        EXPECT_EQ(r.axis_count(), 2);
        EXPECT_EQ(refined_W(r), w);
    }
}

// Every site on the kink unknot and on D4: Jones for all moves, W and I for
// weak-class moves (all of the elementary catalogue).
TEST(MoveInvariance, Fixtures) {
    for (const diagram* d : {&d4()}) {
        auto base = compute(*d);
        for (auto& sp : elementary_specs())
            for (auto dir : {move_direction::forward, move_direction::reverse})
                for (auto& s : enumerate_sites(*d, sp, dir))
                    expect_same_invariants(base, apply_move(*d, s), sp.str() + " " + s.fingerprint(), true);
    }
    diagram u = kink_unknot();
    auto base = compute(u);
    for (auto& sp : elementary_specs())
        for (auto dir : {move_direction::forward, move_direction::reverse})
            for (auto& s : enumerate_sites(u, sp, dir, false)) {
                diagram r = apply_move(u, s);
                EXPECT_EQ(oracle::jones_by_tracing(r), base.j);
                expect_same_invariants(base, r, sp.str(), true);
            }
}

TEST(Composite, S4Scripts) {
    auto one = expand_composite(move_spec{move_kind::S4mn, 1, 1});
    ASSERT_EQ(one.script.steps.size(), 1u);
    EXPECT_EQ(one.script.steps[0].spec.kind, move_kind::S4);
    for (int m : {1, 2, 3}) {
        auto zero = expand_composite(move_spec{move_kind::S4mn, m, 0});
        EXPECT_EQ(zero.script.steps.size(), 2u);
        EXPECT_EQ(count_kind(zero.script, move_kind::R2sym), 2);
    }
    EXPECT_THROW(expand_composite(move_spec{move_kind::S4mn, 2, -1}), unsupported_signs);
}

TEST(Composite, S4Decompositions) {
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n)
            for (int sg : {1, -1}) {
                move_spec sp{move_kind::S4mn, sg * m, sg * n};
                auto run = expand_composite(sp);
                for (auto& d : run.script.states) {
                    validate(d);
                    EXPECT_TRUE(validate_symmetric_union(d).ok()) << sp.str();
                }
                for (auto& st : run.script.steps) EXPECT_FALSE(is_composite(st.spec.kind));
                EXPECT_TRUE(same_diagram(run.script.states.back(), run.expected)) << sp.str();
                EXPECT_TRUE(same_diagram(replay(run.start, run.script.steps), run.expected)) << sp.str();
                // S4 moves count m * n boxes of one crossing each
                EXPECT_EQ(count_kind(run.script, move_kind::S4), m * n) << sp.str();
            }
}

TEST(Composite, S2Decompositions) {
    for (int n = 1; n <= 3; ++n)
        for (int sg : {1, -1})
            for (int nsg : {1, -1}) {
                move_spec sp{move_kind::S2pmn, sg, nsg * n};
                auto run = expand_composite(sp);
                for (auto& d : run.script.states) EXPECT_TRUE(validate_symmetric_union(d).ok()) << sp.str();
                EXPECT_TRUE(same_diagram(run.script.states.back(), run.expected)) << sp.str();
                EXPECT_EQ(count_kind(run.script, move_kind::S2pm), n) << sp.str();
            }
    auto two = expand_composite(parse_move_spec("S2pmn(-,-2)"));
    EXPECT_EQ(count_kind(two.script, move_kind::S2pm), 2);
}

TEST(Composite, ReverseDirection) {
    // twisted axis crossings of D4(3) and D4(2) carry the simple sides
    for (auto [h, text] : {std::pair{3, "S4mn(2,1)"}, std::pair{2, "S2pmn(-,-2)"}}) {
        diagram d = twist(d4(), h);
        auto sp = parse_move_spec(text);
        auto sites = enumerate_sites(d, sp, move_direction::reverse);
        ASSERT_FALSE(sites.empty()) << text;
        auto script = expand_composite(d, sites[0]);
        for (auto& st : script.states) EXPECT_TRUE(validate_symmetric_union(st).ok()) << text;
        EXPECT_TRUE(same_diagram(script.states.back(), apply_move(d, sites[0]))) << text;
        EXPECT_GT(script.states.back().num_crossings(), d.num_crossings());
    }
}

TEST(Scramble, UnknotKeepsW) {
    diagram u = circle();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto res = scramble(u, seed, 5, move_class::weak);
        EXPECT_EQ(res.log.size(), 5u);
        EXPECT_EQ(refined_W(res.result), ratfunc(1));
        EXPECT_TRUE(same_diagram(replay_inverse(res.result, res.log), u));
    }
}

TEST(Scramble, D4KeepsI) {
    auto m = potts_model(3, 1, 0);
    partition_options po;
    po.method = partition_method::elimination;
    auto base = normalized_I(m, d4(), po);
    auto res = scramble(d4(), 7, 8, move_class::weak);
    EXPECT_EQ(res.log.size(), 8u);
    EXPECT_LE(res.result.num_crossings(), 40);
    EXPECT_TRUE(normalized_I(m, res.result, po).equals(base));
    std::vector<move_step> steps;
    for (auto& e : res.log) steps.push_back(e.step);
    EXPECT_TRUE(same_diagram(replay(d4(), steps), res.result));
    EXPECT_TRUE(same_diagram(replay_inverse(res.result, res.log), d4()));
}

TEST(Scramble, LogJsonRoundTrip) {
    auto res = scramble(kink_unknot(), 11, 4, move_class::symmetric);
    auto j = scramble_log_json(res.log);
    auto back = scramble_log_from_json(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(back.size(), res.log.size());
    for (auto& e : back) EXPECT_NE(e.step.spec.kind, move_kind::S2v);
    EXPECT_TRUE(same_diagram(replay_inverse(res.result, back), kink_unknot()));
    EXPECT_THROW(scramble_log_from_json(nlohmann::json::parse("{}")), parse_error);
    EXPECT_THROW(scramble_log_from_json(nlohmann::json::parse("[{\"kind\":\"R1sym\"}]")), parse_error);
}

TEST(Scramble, Deterministic) {
    auto a = scramble(d4p(), 5, 3, move_class::weak), b = scramble(d4p(), 5, 3, move_class::weak);
    EXPECT_EQ(scramble_log_json(a.log), scramble_log_json(b.log));
}

TEST(Scramble, Budget) {
    auto res = scramble(d4(), 3, 6, move_class::symmetric, 17);
    EXPECT_LE(res.result.num_crossings(), 17);
}
