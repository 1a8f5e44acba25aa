#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagram.hpp"
#include "errors.hpp"
#include "rewrite.hpp"
#include "sketch.hpp"

namespace symknot {

enum class move_kind { R1sym, R2sym, R3sym, S1plus, S1minus, S2h, S2v, S2pm, S3, S4, S4mn, S2pmn };
enum class move_direction { forward, reverse };
enum class move_class { symmetric, weak };

inline const std::vector<std::pair<move_kind, std::string>>& move_kind_names() {
    static const std::vector<std::pair<move_kind, std::string>> v{
        {move_kind::R1sym, "R1sym"}, {move_kind::R2sym, "R2sym"},     {move_kind::R3sym, "R3sym"},
        {move_kind::S1plus, "S1plus"}, {move_kind::S1minus, "S1minus"}, {move_kind::S2h, "S2h"},
        {move_kind::S2v, "S2v"},     {move_kind::S2pm, "S2pm"},       {move_kind::S3, "S3"},
        {move_kind::S4, "S4"},       {move_kind::S4mn, "S4mn"},       {move_kind::S2pmn, "S2pmn"}};
    return v;
}

inline std::string to_string(move_kind k) {
    for (auto& [kk, s] : move_kind_names())
        if (kk == k) return s;
    return "?";
}

inline std::string to_string(move_direction d) { return d == move_direction::forward ? "forward" : "reverse"; }

inline move_direction opposite(move_direction d) {
    return d == move_direction::forward ? move_direction::reverse : move_direction::forward;
}

inline bool is_composite(move_kind k) { return k == move_kind::S4mn || k == move_kind::S2pmn; }

inline bool in_class(move_kind k, move_class c) {
    if (is_composite(k)) return false;
    return k != move_kind::S2v || c == move_class::weak;
}

inline std::vector<move_kind> class_kinds(move_class c) {
    std::vector<move_kind> v;
    for (auto& [k, s] : move_kind_names())
        if (in_class(k, c)) v.push_back(k);
    return v;
}

// m and n are the box labels of S4mn; for S2pmn, m is the sign (+1 or -1).
struct move_spec {
    move_kind kind = move_kind::R1sym;
    int m = 0, n = 0;

    std::string str() const {
        if (kind == move_kind::S4mn) return "S4mn(" + std::to_string(m) + "," + std::to_string(n) + ")";
        if (kind == move_kind::S2pmn) return std::string("S2pmn(") + (m > 0 ? "+" : "-") + "," + std::to_string(n) + ")";
        return to_string(kind);
    }
    friend bool operator==(const move_spec&, const move_spec&) = default;
    friend auto operator<=>(const move_spec&, const move_spec&) = default;
};

inline move_spec parse_move_spec(const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s += c;
    auto open = s.find('(');
    std::string name = s.substr(0, open);
    move_spec r;
    bool found = false;
    for (auto& [k, nm] : move_kind_names())
        if (nm == name) r.kind = k, found = true;
    if (!found) throw parse_error("unknown move kind '" + name + "'");
    if (!is_composite(r.kind)) {
        if (open != std::string::npos) throw parse_error("move " + name + " takes no parameters");
        return r;
    }
    if (open == std::string::npos || s.back() != ')') throw parse_error(name + " needs parameters, e.g. " + name + "(1,2)");
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    auto comma = inner.find(',');
    if (comma == std::string::npos) throw parse_error("expected two parameters in '" + text + "'");
    std::string a = inner.substr(0, comma), b = inner.substr(comma + 1);
    try {
        if (r.kind == move_kind::S2pmn) {
            if (a == "+") r.m = 1;
            else if (a == "-") r.m = -1;
            else throw parse_error("S2pmn sign must be + or -");
        } else {
            r.m = std::stoi(a);
        }
        r.n = std::stoi(b);
    } catch (const std::logic_error&) {
        throw parse_error("bad parameters in '" + text + "'");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Drawings of the moves.

struct move_drawing {
    sketch lhs, rhs;
    sketch closure; // arcs joining the frame points outside the frame
};

namespace detail {

using fpt = std::array<double, 2>;
constexpr double fig_unit = 3600;
constexpr int fig_samples = 25;
constexpr long long off_axis_shift = -100;

inline ipt fig_pt(fpt p) { return {std::llround(p[0] * fig_unit), std::llround(p[1] * fig_unit)}; }

inline std::vector<ipt> fig_poly(std::initializer_list<fpt> pts) {
    std::vector<ipt> v;
    for (auto& p : pts) v.push_back(fig_pt(p));
    return v;
}

// controls are relative to the start and to the end point
inline std::vector<ipt> fig_curve(fpt a, fpt da, fpt db, fpt b) {
    return bezier(a, {a[0] + da[0], a[1] + da[1]}, {b[0] + db[0], b[1] + db[1]}, b, fig_samples, fig_unit);
}

inline std::vector<ipt> joined(std::vector<ipt> a, const std::vector<ipt>& b) {
    for (std::size_t i = 0; i < b.size(); ++i)
        if (i > 0 || a.empty() || a.back() != b[0]) a.push_back(b[i]);
    return a;
}

inline std::vector<ipt> mirrored(std::vector<ipt> v) {
    for (auto& q : v) q.x = -q.x;
    return v;
}

inline void add_pair(sketch& s, const std::vector<ipt>& pts, int z, int z_mirror) {
    s.add(pts, z);
    s.add(mirrored(pts), z_mirror);
}
inline void add_pair(sketch& s, const std::vector<ipt>& pts, int z) { add_pair(s, pts, z, z); }

inline std::array<long long, 4> fig_frame(double x, double y) {
    return {std::llround(-x * fig_unit), std::llround(x * fig_unit), std::llround(-y * fig_unit), std::llround(y * fig_unit)};
}

// twist box with ports (+-w, top) and (+-w, bottom), in figure units
inline void fig_box(sketch& s, double w, double top, double bottom, int m) {
    long long t = std::llround(top * fig_unit), b = std::llround(bottom * fig_unit);
    int k = std::max(std::abs(m), 1);
    if ((t - b) % k) throw error("twist box height not divisible by " + std::to_string(k));
    add_box(s, 0, t, std::llround(w * fig_unit), (t - b) / k, m, 10);
}

// Closure of an off-axis tangle drawn left of the axis, joined to its mirror
// image by nested arcs.
inline sketch off_axis_arcs(const sketch& lhs) {
    tangle t = build_tangle(lhs);
    auto f = *lhs.frame;
    std::vector<std::array<long long, 2>> top, bottom, right, left;
    for (auto& p : t.boundary_pos) {
        std::array<long long, 2> q{std::llround(p[0]), std::llround(p[1])};
        if (q[1] == f[3]) top.push_back(q);
        else if (q[1] == f[2]) bottom.push_back(q);
        else if (q[0] == f[1]) right.push_back(q);
        else left.push_back(q);
    }
    sketch c;
    auto by_x_desc = [](auto& a, auto& b) { return a[0] > b[0]; };
    std::sort(top.begin(), top.end(), by_x_desc);
    std::sort(bottom.begin(), bottom.end(), by_x_desc);
    for (std::size_t i = 0; i < top.size(); ++i) {
        long long x = top[i][0], h = f[3] + 1 + static_cast<long long>(i);
        c.add({{x, f[3]}, {x, h}, {-x, h}, {-x, f[3]}});
    }
    for (std::size_t i = 0; i < bottom.size(); ++i) {
        long long x = bottom[i][0], h = f[2] - 1 - static_cast<long long>(i);
        c.add({{x, f[2]}, {x, h}, {-x, h}, {-x, f[2]}});
    }
    for (auto& q : right) c.add({{q[0], q[1]}, {-q[0], q[1]}});
    std::sort(left.begin(), left.end(), [](auto& a, auto& b) { return a[1] > b[1]; });
    long long H = f[3] + 2 + static_cast<long long>(top.size());
    for (std::size_t j = 0; j < left.size(); ++j) {
        long long x = f[0] - 1 - static_cast<long long>(j), h = H + static_cast<long long>(j), y = left[j][1];
        c.add({{f[0], y}, {x, y}, {x, h}, {-x, h}, {-x, y}, {-f[0], y}});
    }
    return c;
}

inline move_drawing r1_master() {
    move_drawing d;
    d.lhs.add({{-2, -6}, {-2, -2}, {3, 2}}, 1);
    d.lhs.add({{3, 2}, {3, -2}, {-2, 2}, {-2, 6}}, 0);
    d.rhs.add({{-2, -6}, {-2, 6}});
    d.lhs.frame = d.rhs.frame = std::array<long long, 4>{-6, 6, -6, 6};
    return d;
}

inline move_drawing r2_master() {
    move_drawing d;
    d.lhs.add({{-3, -6}, {-3, -3}, {5, 0}, {-3, 3}, {-3, 6}}, 1);
    d.lhs.add({{3, -6}, {3, 6}}, 0);
    d.rhs.add({{-3, -6}, {-3, 6}});
    d.rhs.add({{3, -6}, {3, 6}});
    d.lhs.frame = d.rhs.frame = std::array<long long, 4>{-6, 6, -6, 6};
    return d;
}

inline move_drawing r3_master() {
    move_drawing d;
    for (sketch* s : {&d.lhs, &d.rhs}) {
        s->add({{-4, -6}, {4, 6}}, 1);
        s->add({{4, -6}, {-4, 6}}, 0);
        s->frame = std::array<long long, 4>{-6, 6, -6, 6};
    }
    d.lhs.add({{-6, 2}, {6, 2}}, 2);
    d.rhs.add({{-6, 2}, {-5, -3}, {5, -3}, {6, 2}}, 2);
    return d;
}

inline move_drawing s1_master() {
    move_drawing d;
    d.lhs.add({{-4, -6}, {2, 2}}, 1);
    d.lhs.add({{2, 2}, {1, 5}, {-1, 5}, {-2, 2}}, 0);
    d.lhs.add({{-2, 2}, {4, -6}}, 0);
    d.rhs.add({{-4, -6}, {-2, -2}, {2, -2}, {4, -6}});
    d.lhs.frame = d.rhs.frame = std::array<long long, 4>{-6, 6, -6, 6};
    d.closure.add({{4, -6}, {5, -8}, {-5, -8}, {-4, -6}});
    return d;
}

inline move_drawing s2h_master() {
    move_drawing d;
    d.lhs.add({{-6, 1}, {-2, 1}, {-1, -3}, {1, -3}, {2, 1}, {6, 1}}, 1);
    d.rhs.add({{-6, 1}, {6, 1}}, 1);
    for (sketch* s : {&d.lhs, &d.rhs}) {
        s->add({{-6, -1}, {6, -1}}, 0);
        s->frame = std::array<long long, 4>{-6, 6, -6, 6};
    }
    d.closure.add({{-6, 1}, {-7, 1}, {-7, -1}, {-6, -1}});
    d.closure.add({{6, 1}, {7, 1}, {7, -1}, {6, -1}});
    return d;
}

inline move_drawing s2v_master() {
    move_drawing d;
    d.lhs.add({{-4, -6}, {2, 0}, {-4, 6}}, 1);
    d.lhs.add({{4, -6}, {-2, 0}, {4, 6}}, 0);
    d.rhs.add({{-4, -6}, {-2, 0}, {-4, 6}});
    d.rhs.add({{4, -6}, {2, 0}, {4, 6}});
    d.lhs.frame = d.rhs.frame = std::array<long long, 4>{-6, 6, -6, 6};
    d.closure.add({{-4, 6}, {-4, 8}, {4, 8}, {4, 6}});
    d.closure.add({{-4, -6}, {-4, -8}, {4, -8}, {4, -6}});
    return d;
}

inline move_drawing s3_master() {
    move_drawing d;
    for (sketch* s : {&d.lhs, &d.rhs}) {
        s->add({{-4, -6}, {4, 6}}, 1);
        s->add({{4, -6}, {-4, 6}}, 0);
        s->frame = std::array<long long, 4>{-6, 6, -6, 6};
    }
    d.lhs.add({{-6, 2}, {6, 2}}, 2);
    d.rhs.add({{-6, 2}, {-5, -2}, {5, -2}, {6, 2}}, 2);
    d.closure.add({{4, 6}, {4, 7}, {-4, 7}, {-4, 6}});
    d.closure.add({{4, -6}, {4, -7}, {-4, -7}, {-4, -6}});
    d.closure.add({{-6, 2}, {-8, 2}, {-8, 9}, {8, 9}, {8, 2}, {6, 2}});
    return d;
}

// Closure arcs for drawings with frame points at (+-3.5, +-1) and (+-3.5, +-2.5).
inline sketch s4_arcs() {
    sketch c;
    for (double sy : {1.0, -1.0}) {
        c.add(fig_poly({{3.5, 2.5 * sy}, {3.7, 2.5 * sy}, {3.7, 3.5 * sy}, {-3.7, 3.5 * sy}, {-3.7, 2.5 * sy}, {-3.5, 2.5 * sy}}));
        c.add(fig_poly({{3.5, 1 * sy}, {3.9, 1 * sy}, {3.9, 4 * sy}, {-3.9, 4 * sy}, {-3.9, 1 * sy}, {-3.5, 1 * sy}}));
    }
    return c;
}

// Frame points at the corners (+-2, +-2).
inline sketch s2_arcs() {
    sketch c;
    c.add(fig_poly({{-2, 2}, {-2.3, 2.5}, {2.3, 2.5}, {2, 2}}));
    c.add(fig_poly({{-2, -2}, {-2.3, -2.5}, {2.3, -2.5}, {2, -2}}));
    return c;
}

// The S4(m, n) tangles: box m above box n on the left, swapped on the right.
inline move_drawing s4mn_master(int m, int n) {
    move_drawing d;
    // m strands come in from the lower frame points, n strands (over) from the upper ones
    add_pair(d.lhs, fig_curve({3.5, -1}, {-1.5, 0}, {.5, 0}, {.5, 2.5}), 0);
    add_pair(d.lhs, fig_curve({3.5, -2.5}, {-1.5, 0}, {.5, 0}, {.5, 1}), 0);
    add_pair(d.lhs, fig_curve({3.5, 2.5}, {-1.5, 0}, {.5, 0}, {.5, -1}), 1);
    add_pair(d.lhs, fig_curve({3.5, 1}, {-1.5, 0}, {.5, 0}, {.5, -2.5}), 1);
    fig_box(d.lhs, .5, 2.5, 1, m);
    fig_box(d.lhs, .5, -1, -2.5, n);
    for (double y : {2.5, 1.0, -1.0, -2.5}) add_pair(d.rhs, fig_poly({{3.5, y}, {.5, y}}), 0);
    fig_box(d.rhs, .5, 2.5, 1, n);
    fig_box(d.rhs, .5, -1, -2.5, m);
    d.lhs.frame = d.rhs.frame = fig_frame(3.5, 3);
    d.closure = s4_arcs();
    return d;
}

// Intermediate tangles of the S4(m, k) decomposition, m >= 2: the lowest
// crossing X of box m is split off and pulled through box k.
inline sketch s4mn_stage(int m, int k, int stage) {
    sketch s;
    bool below = stage == 2; // X below box k
    double xy0 = below ? -2.25 : 1, xy1 = below ? -1.75 : 1.5;
    // strand entering at the lower right, through X (under), fingered to the left of box m-1
    add_pair(s, fig_curve({3.5, -2.5}, {-1.5, 0}, {.5, 0}, {.5, xy0}), 0, 1);
    add_pair(s, fig_curve({.5, xy0}, {-.5, 0}, {.5, 0}, {-.5, xy1}), 0, 1);
    add_pair(s,
             joined(fig_curve({-.5, xy1}, {-.25, 0}, {.125, -.125}, {-2.5, -1.25}),
                    fig_curve({-2.5, -1.25}, {-.125, .125}, {-.25, 0}, {-.5, 1.75})),
             0, 1);
    add_pair(s, fig_curve({-.5, 3}, {-.5, 0}, {1.5, 0}, {-3.5, -1}), 0, 1);
    fig_box(s, .5, 3, 1.75, m - 1);
    if (!below) {
        add_pair(s, fig_curve({3.5, 1}, {-1.5, 0}, {.5, 0}, {.5, -2.5}), 2);
        add_pair(s, fig_curve({3.5, 2.5}, {-1.5, 0}, {.5, 0}, {.5, -1}), 2);
        fig_box(s, .5, -1, -2.5, k);
    } else {
        add_pair(s, fig_curve({3.5, 1}, {-1.5, 0}, {.5, 0}, {.5, .25}), 2);
        add_pair(s, fig_curve({3.5, 2.5}, {-1.5, 0}, {.5, 0}, {.5, 1.55}), 2);
        fig_box(s, .5, 1.55, .25, k);
    }
    // box m - 1 reaches y = 3, so the frame sits a little higher
    s.frame = fig_frame(3.5, 3.25);
    return s;
}

// S2(-, n): a clasp on each side of box n.
inline move_drawing s2pmn_minus_master(int n) {
    move_drawing d;
    add_pair(d.lhs, fig_curve({-2, -2}, {.5, .5}, {-1.5, 1.5}, {-.25, .5}), 0);
    add_pair(d.lhs, fig_curve({-2, 2}, {.5, -.5}, {-1.5, -1.5}, {-.25, -.5}), 1);
    fig_box(d.lhs, .25, .5, -.5, n);
    add_pair(d.rhs, fig_curve({-2, 2}, {.5, -.25}, {0, 1}, {-.25, .5}), 0);
    add_pair(d.rhs, fig_curve({-2, -2}, {.5, .25}, {0, -1}, {-.25, -.5}), 0);
    fig_box(d.rhs, .25, .5, -.5, n);
    d.lhs.frame = d.rhs.frame = fig_frame(2, 2);
    d.closure = s2_arcs();
    return d;
}

// Intermediate tangles of the S2(-, n) decomposition, n <= -2; stage 0..3.
inline sketch s2pmn_stage(int n, int stage) {
    sketch s;
    if (stage == 0) {
        add_pair(s,
                 joined(fig_curve({-1, -1.5}, {.25, 0}, {-.5, 0}, {-.35, .75}),
                        fig_curve({-.35, .75}, {.125, 0}, {0, .125}, {-.25, .5})),
                 0);
        add_pair(s, fig_curve({-1, -1.5}, {-.5, 0}, {-.5, 0}, {-.5, .95}), 0);
        add_pair(s, fig_curve({.5, 1.25}, {-.25, 0}, {.125, 0}, {-.5, .95}), 0, 1);
        add_pair(s, fig_curve({-2, -2}, {.5, .5}, {-1.5, 0}, {-.5, 1.25}), 0);
        add_pair(s, fig_curve({-2, 2}, {.5, -.5}, {-1.5, -1.5}, {-.25, -.5}), 2);
    } else if (stage == 1) {
        add_pair(s, fig_curve({-2, -2}, {1, 1}, {-1, 2}, {-1, .2}), 0);
        add_pair(s, fig_curve({-1, .2}, {1.5, -2.5}, {-1, -2}, {1.25, .2}), 1, 0);
        add_pair(s, fig_curve({-1.25, .2}, {-.15, .25}, {-1, 1}, {-.25, .5}), 2);
        add_pair(s, fig_curve({-2, 2}, {.5, -.5}, {-1.5, -1.5}, {-.25, -.5}), 3);
    } else if (stage == 2) {
        add_pair(s, fig_curve({-2, -2}, {.5, 1}, {-1, 2}, {-1.3, .2}), 0);
        add_pair(s, fig_curve({-1.3, .2}, {1.5, -2.5}, {-1, -2}, {1.5, .2}), 1, 0);
        add_pair(s, fig_curve({-1.5, .2}, {-.15, .25}, {-1, 1}, {-.25, .5}), 2);
        add_pair(s, fig_curve({-2, 2}, {2, -.5}, {-1, -1}, {-.25, -.5}), 3);
    } else {
        add_pair(s, fig_curve({-2, -2}, {.5, 1}, {-1, 2}, {-1.3, .2}), 0);
        add_pair(s, fig_curve({-1.3, .2}, {1.5, -2.5}, {.25, -.5}, {1, -1}), 1, 0);
        add_pair(s, fig_curve({-1, -1}, {.15, .25}, {-.5, -.5}, {-.25, -.5}), 2);
        add_pair(s, fig_curve({-2, 2}, {.5, 0}, {-1, 1}, {-.25, .5}), 0);
    }
    fig_box(s, .25, .5, -.5, n + 1);
    s.frame = fig_frame(2, 2);
    return s;
}

inline move_drawing transformed(const move_drawing& d, bool xf, bool yf, bool sw) {
    return {symknot::transformed(d.lhs, xf, yf, sw), symknot::transformed(d.rhs, xf, yf, sw),
            symknot::transformed(d.closure, xf, yf, sw)};
}

} // namespace detail

inline bool off_axis_kind(move_kind k) {
    return k == move_kind::R1sym || k == move_kind::R2sym || k == move_kind::R3sym;
}

inline move_drawing master_drawing(const move_spec& spec) {
    using namespace detail;
    switch (spec.kind) {
    case move_kind::R1sym: return r1_master();
    case move_kind::R2sym: return r2_master();
    case move_kind::R3sym: return r3_master();
    case move_kind::S1plus: return detail::transformed(s1_master(), false, false, true);
    case move_kind::S1minus: return s1_master();
    case move_kind::S2h: return s2h_master();
    case move_kind::S2v: return s2v_master();
    case move_kind::S2pm: return s2pmn_minus_master(1);
    case move_kind::S3: return s3_master();
    case move_kind::S4: return s4mn_master(1, 1);
    case move_kind::S4mn: return s4mn_master(spec.m, spec.n);
    case move_kind::S2pmn:
        if (spec.m < 0) return s2pmn_minus_master(spec.n);
        return detail::transformed(s2pmn_minus_master(-spec.n), false, false, true);
    }
    throw error("unknown move kind");
}

// A closed symmetric drawing containing one side of the move.
inline sketch closed_drawing(const move_spec& spec, bool rhs_side) {
    move_drawing d = master_drawing(spec);
    sketch side = rhs_side ? d.rhs : d.lhs;
    sketch out;
    if (off_axis_kind(spec.kind)) {
        sketch l = shifted(d.lhs, detail::off_axis_shift, 0);
        sketch arcs = detail::off_axis_arcs(l);
        sketch t = shifted(side, detail::off_axis_shift, 0);
        out.append(t);
        out.append(transformed(t, true, false, false));
        out.append(arcs);
    } else {
        out.append(side);
        out.append(d.closure);
    }
    return out;
}

inline diagram template_closure(const move_spec& spec, bool rhs_side) {
    return sketch_diagram(closed_drawing(spec, rhs_side));
}

// ---------------------------------------------------------------------------
// Templates: every picture variant of a move, ready for matching.

struct move_variant {
    std::string tag;
    std::array<bool, 3> tf{}; // x flip, y flip, crossing switch
    int master = 0;           // index into move_template::masters
    pattern lhs, rhs;
    // off-axis moves: mirror images of both sides, with node correspondences
    pattern lhs_m, rhs_m;
    tangle_mirror lhs_c, rhs_c;
};

struct move_template {
    move_spec spec;
    bool off_axis = false;
    std::vector<move_drawing> masters;
    std::vector<move_variant> variants;
};

namespace detail {

inline std::string tf_tag(const std::array<bool, 3>& tf) {
    std::string s;
    if (tf[0]) s += "x";
    if (tf[1]) s += "y";
    if (tf[2]) s += "s";
    return s.empty() ? "i" : s;
}

inline int axis_kink_sign(const sketch& closed) {
    diagram d = sketch_diagram(closed);
    for (int x = 0; x < d.num_crossings(); ++x)
        if (d.crossings[x].on_axis) return d.sign(x);
    throw error("S1 drawing without an axis crossing");
}

inline move_template build_template(const move_spec& spec) {
    move_template T;
    T.spec = spec;
    T.off_axis = off_axis_kind(spec.kind);
    if (spec.kind == move_kind::S4) {
        T.masters = {s4mn_master(1, 1), s4mn_master(1, -1)};
    } else {
        T.masters = {master_drawing(spec)};
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (int mi = 0; mi < static_cast<int>(T.masters.size()); ++mi)
        for (int bits = 0; bits < 8; ++bits) {
            std::array<bool, 3> tf{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0};
            move_drawing md = transformed(T.masters[mi], tf[0], tf[1], tf[2]);
            if (spec.kind == move_kind::S1plus || spec.kind == move_kind::S1minus) {
                sketch c = md.lhs;
                c.frame.reset();
                c.append(md.closure);
                int sg = axis_kink_sign(c);
                if ((sg > 0) != (spec.kind == move_kind::S1plus)) continue;
            }
            if (T.off_axis) {
                md.lhs = shifted(md.lhs, off_axis_shift, 0);
                md.rhs = shifted(md.rhs, off_axis_shift, 0);
            }
            tangle lt = build_tangle(md.lhs), rt = build_tangle(md.rhs);
            auto key = std::make_pair(tangle_signature(lt), tangle_signature(rt));
            if (!seen.insert(key).second) continue;
            move_variant v;
            v.tag = (T.masters.size() > 1 ? std::to_string(mi) : std::string()) + tf_tag(tf);
            v.tf = tf;
            v.master = mi;
            v.lhs = make_pattern(lt, !T.off_axis);
            v.rhs = make_pattern(rt, !T.off_axis);
            if (T.off_axis) {
                tangle lm = build_tangle(symknot::transformed(md.lhs, true, false, false));
                tangle rm = build_tangle(symknot::transformed(md.rhs, true, false, false));
                auto lc = mirror_between(lt, lm), rc = mirror_between(rt, rm);
                if (!lc || !rc) throw error("mirror correspondence failed for " + spec.str());
                v.lhs_c = *lc;
                v.rhs_c = *rc;
                v.lhs_m = make_pattern(lm, false);
                v.rhs_m = make_pattern(rm, false);
            }
            T.variants.push_back(std::move(v));
        }
    return T;
}

} // namespace detail

// Largest box label accepted in S4mn and S2pmn.
inline constexpr int composite_bound = 4;

inline const move_template& get_template(const move_spec& spec) {
    static std::mutex mu;
    static std::map<move_spec, std::unique_ptr<move_template>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(spec);
    if (it != cache.end()) return *it->second;
    if (spec.kind == move_kind::S4mn && (std::abs(spec.m) > composite_bound || std::abs(spec.n) > composite_bound))
        throw error("S4mn box labels are limited to |m|, |n| <= " + std::to_string(composite_bound));
    if (spec.kind == move_kind::S2pmn && (std::abs(spec.n) > composite_bound || (spec.m != 1 && spec.m != -1)))
        throw error("S2pmn needs sign + or - and |n| <= " + std::to_string(composite_bound));
    auto t = std::make_unique<move_template>(detail::build_template(spec));
    auto& ref = *t;
    cache[spec] = std::move(t);
    return ref;
}

// ---------------------------------------------------------------------------
// Sites.

struct move_site {
    move_spec spec;
    move_direction dir = move_direction::forward;
    int variant = 0;
    embedding emb;

    std::string fingerprint() const;
};

namespace detail {

inline const pattern& site_pattern(const move_template& T, const move_site& s) {
    auto& V = T.variants.at(s.variant);
    return s.dir == move_direction::forward ? V.lhs : V.rhs;
}

inline std::vector<int> footprint(const pattern& p, const embedding& e) {
    std::vector<int> v;
    for (int t = 0; t < p.t.num_nodes(); ++t) v.push_back(p.is_marker(t) ? -1 - e.g[t] : e.g[t]);
    std::sort(v.begin(), v.end());
    return v;
}

// The embedding of the mirrored pattern at the mirror image of e.
inline std::optional<embedding> mirror_embedding(const pattern& p, const pattern& pm, const tangle_mirror& c,
                                                 const host_graph& g, const embedding& e) {
    int n = p.t.num_nodes();
    embedding f;
    f.g.assign(n, -1);
    f.r.assign(n, 0);
    auto rho_seg = [&](int sg) { return g.seg_of[g.rho_slot(g.segs[sg].a)]; };
    for (int t = 0; t < n; ++t) {
        int t2 = c.node[t];
        if (p.is_marker(t)) {
            auto& S = g.segs[e.g[t]];
            int sg2 = rho_seg(e.g[t]);
            auto& S2 = g.segs[sg2];
            f.g[t2] = sg2;
            int found = -1;
            for (int r = 0; r < 2 && found < 0; ++r) {
                bool ok = true;
                for (int q = 0; q < 2; ++q) {
                    int end = (e.r[t] == 0) == (q == 0) ? S.a : S.b;
                    int q2 = c.port[t][q];
                    int end2 = (r == 0) == (q2 == 0) ? S2.a : S2.b;
                    if (end2 != g.rho_slot(end)) ok = false;
                }
                if (ok) found = r;
            }
            if (found < 0) return std::nullopt;
            f.r[t2] = found;
            continue;
        }
        int h = e.g[t], h2 = g.rho_node[h];
        int v = p.t.nodes[t].valence();
        f.g[t2] = h2;
        int found = -1;
        for (int r = 0; r < v && found < 0; ++r) {
            bool ok = true;
            for (int q = 0; q < v; ++q)
                if (h2 * 4 + (c.port[t][q] + r) % v != g.rho_slot(h * 4 + (q + e.r[t]) % v)) ok = false;
            if (ok) found = r;
        }
        if (found < 0) return std::nullopt;
        f.r[t2] = found;
    }
    for (auto& [sg, ms] : e.on_seg) {
        int sg2 = rho_seg(sg);
        bool same = g.rho_slot(g.segs[sg].a) == g.segs[sg2].a;
        std::vector<int> v;
        for (int mk : ms) v.push_back(c.node[mk]);
        if (!same) std::reverse(v.begin(), v.end());
        f.on_seg[sg2] = v;
    }
    matcher mt(pm, g, matcher::mode::off_axis);
    if (!mt.verify(f)) return std::nullopt;
    return f;
}

inline diagram apply_site(const diagram& d, const host_graph& g, const move_template& T, const move_site& s) {
    auto& V = T.variants.at(s.variant);
    bool fw = s.dir == move_direction::forward;
    const pattern& P = fw ? V.lhs : V.rhs;
    const pattern& R = fw ? V.rhs : V.lhs;
    matcher mt(P, g, T.off_axis ? matcher::mode::off_axis : matcher::mode::symmetric);
    if (s.emb.g.size() != static_cast<std::size_t>(P.t.num_nodes()) || !mt.verify(s.emb))
        throw site_mismatch(s.spec.str() + " does not match at the given site");
    std::vector<placement> pls{{&P, &R.t, s.emb}};
    std::vector<std::array<int, 4>> pairs;
    if (T.off_axis) {
        const pattern& Pm = fw ? V.lhs_m : V.rhs_m;
        const pattern& Rm = fw ? V.rhs_m : V.lhs_m;
        auto me = mirror_embedding(P, Pm, fw ? V.lhs_c : V.rhs_c, g, s.emb);
        if (!me) throw site_mismatch(s.spec.str() + ": no mirror image of the site");
        pls.push_back({&Pm, &Rm.t, *me});
        auto& rc = fw ? V.rhs_c : V.lhs_c;
        for (int a = 0; a < R.t.num_nodes(); ++a)
            if (R.t.nodes[a].kind == tangle_node::crossing) pairs.push_back({0, a, 1, rc.node[a]});
    } else {
        auto& rho = *R.rho;
        for (int a = 0; a < R.t.num_nodes(); ++a)
            if (R.t.nodes[a].kind == tangle_node::crossing && !R.t.nodes[a].on_axis && a < rho.node[a])
                pairs.push_back({0, a, 0, rho.node[a]});
    }
    return rewrite(d, g, pls, pairs);
}

inline embedding parse_embedding(const std::string& key) {
    embedding e;
    std::size_t bar = key.find('|');
    std::string head = key.substr(0, bar);
    std::stringstream hs(head);
    std::string item;
    while (std::getline(hs, item, ',')) {
        if (item.empty()) continue;
        auto dot = item.find('.');
        if (dot == std::string::npos) throw parse_error("bad site fingerprint");
        e.g.push_back(std::stoi(item.substr(0, dot)));
        e.r.push_back(std::stoi(item.substr(dot + 1)));
    }
    while (bar != std::string::npos) {
        std::size_t nb = key.find('|', bar + 1);
        std::string part = key.substr(bar + 1, nb == std::string::npos ? std::string::npos : nb - bar - 1);
        auto colon = part.find(':');
        if (colon == std::string::npos) throw parse_error("bad site fingerprint");
        int sg = std::stoi(part.substr(0, colon));
        std::vector<int> ms;
        std::stringstream ps(part.substr(colon + 1));
        while (std::getline(ps, item, '.'))
            if (!item.empty()) ms.push_back(std::stoi(item));
        e.on_seg[sg] = ms;
        bar = nb;
    }
    return e;
}

} // namespace detail

inline std::string move_site::fingerprint() const {
    auto& T = get_template(spec);
    return T.variants.at(variant).tag + "/" + emb.key();
}

// All sites of a move in a diagram. With distinct set, sites giving the same
// diagram up to relabelling are reported once.
inline std::vector<move_site> enumerate_sites(const diagram& d, const move_spec& spec, move_direction dir,
                                              bool distinct = true) {
    auto& T = get_template(spec);
    host_graph g = make_host_graph(d);
    std::vector<move_site> out;
    if (!g.symmetric) return out;
    std::set<std::string> results;
    for (int vi = 0; vi < static_cast<int>(T.variants.size()); ++vi) {
        auto& V = T.variants[vi];
        bool fw = dir == move_direction::forward;
        const pattern& P = fw ? V.lhs : V.rhs;
        matcher mt(P, g, T.off_axis ? matcher::mode::off_axis : matcher::mode::symmetric);
        for (auto& e : mt.find_all()) {
            if (T.off_axis) {
                auto me = detail::mirror_embedding(P, fw ? V.lhs_m : V.rhs_m, fw ? V.lhs_c : V.rhs_c, g, e);
                if (!me) continue;
                if (detail::footprint(P, *me) < detail::footprint(P, e)) continue;
            }
            move_site s{spec, dir, vi, e};
            if (distinct) {
                std::string c = canonical_form(detail::apply_site(d, g, T, s));
                if (!results.insert(c).second) continue;
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

inline diagram apply_move(const diagram& d, const move_site& s) {
    auto& T = get_template(s.spec);
    return detail::apply_site(d, make_host_graph(d), T, s);
}

inline move_site site_from_fingerprint(const move_spec& spec, move_direction dir, const std::string& fp) {
    auto& T = get_template(spec);
    auto slash = fp.find('/');
    if (slash == std::string::npos) throw parse_error("bad site fingerprint '" + fp + "'");
    std::string tag = fp.substr(0, slash);
    move_site s;
    s.spec = spec;
    s.dir = dir;
    s.variant = -1;
    for (int i = 0; i < static_cast<int>(T.variants.size()); ++i)
        if (T.variants[i].tag == tag) s.variant = i;
    if (s.variant < 0) throw site_mismatch("unknown variant '" + tag + "' for " + spec.str());
    s.emb = detail::parse_embedding(fp.substr(slash + 1));
    return s;
}

inline diagram apply_move(const diagram& d, const move_spec& spec, move_direction dir, const std::string& fp) {
    return apply_move(d, site_from_fingerprint(spec, dir, fp));
}

// ---------------------------------------------------------------------------
// Move logs.

struct move_step {
    move_spec spec;
    move_direction dir = move_direction::forward;
    std::string site;

    nlohmann::json to_json() const { return {{"kind", spec.str()}, {"site", site}, {"direction", to_string(dir)}}; }
    static move_step from_json(const nlohmann::json& j) {
        move_step s;
        try {
            s.spec = parse_move_spec(j.at("kind").get<std::string>());
            s.site = j.at("site").get<std::string>();
            std::string dir = j.value("direction", std::string("forward"));
            if (dir != "forward" && dir != "reverse") throw parse_error("direction must be forward or reverse");
            s.dir = dir == "forward" ? move_direction::forward : move_direction::reverse;
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("move log entry: ") + e.what());
        }
        return s;
    }
};

inline diagram apply_step(const diagram& d, const move_step& s) { return apply_move(d, s.spec, s.dir, s.site); }

struct move_script {
    std::vector<move_step> steps;
    std::vector<diagram> states; // states[i] is the diagram after steps[i]
};

inline nlohmann::json script_json(const std::vector<move_step>& steps) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& s : steps) a.push_back(s.to_json());
    return a;
}

// A site of `spec` in either direction whose result is `target` (canonical form).
inline std::optional<std::pair<move_site, diagram>> find_step(const diagram& d, const move_spec& spec,
                                                             const std::string& target,
                                                             std::vector<move_direction> dirs = {move_direction::forward,
                                                                                                 move_direction::reverse}) {
    auto& T = get_template(spec);
    host_graph g = make_host_graph(d);
    if (!g.symmetric) return std::nullopt;
    for (auto dir : dirs)
        for (auto& s : enumerate_sites(d, spec, dir, false)) {
            diagram r = detail::apply_site(d, g, T, s);
            if (canonical_form(r) == target) return std::make_pair(s, r);
        }
    return std::nullopt;
}

namespace detail {

struct search_state {
    diagram d;
    int parent = -1;
    move_step via; // move from the parent to this state
};

inline const std::vector<std::pair<move_spec, move_direction>>& simplifying_moves() {
    static const std::vector<std::pair<move_spec, move_direction>> v{
        {{move_kind::R1sym}, move_direction::forward},
        {{move_kind::R2sym}, move_direction::forward},
        {{move_kind::R3sym}, move_direction::forward},
        {{move_kind::R3sym}, move_direction::reverse}};
    return v;
}

inline void expand_level(std::vector<search_state>& states, std::map<std::string, int>& index, std::size_t from,
                         std::size_t to, std::size_t cap) {
    for (std::size_t i = from; i < to && states.size() < cap; ++i)
        for (auto& [spec, dir] : simplifying_moves()) {
            diagram base = states[i].d;
            auto& T = get_template(spec);
            host_graph g = make_host_graph(base);
            for (auto& s : enumerate_sites(base, spec, dir, false)) {
                diagram r = apply_site(base, g, T, s);
                std::string c = canonical_form(r);
                if (index.count(c)) continue;
                index[c] = static_cast<int>(states.size());
                states.push_back({std::move(r), static_cast<int>(i), {spec, dir, s.fingerprint()}});
            }
        }
}

} // namespace detail

// Connects two diagrams by symmetric Reidemeister moves off the axis, meeting
// in the middle of simplifying moves from both ends.
inline std::optional<move_script> reidemeister_path(const diagram& from, const diagram& to, int depth = 3,
                                                    std::size_t cap = 4000) {
    using detail::search_state;
    std::vector<search_state> A{{from, -1, {}}}, B{{to, -1, {}}};
    std::map<std::string, int> ia{{canonical_form(from), 0}}, ib{{canonical_form(to), 0}};
    std::size_t fa = 0, fb = 0;
    auto meet = [&]() -> std::optional<std::pair<int, int>> {
        for (auto& [c, i] : ia)
            if (auto it = ib.find(c); it != ib.end()) return std::make_pair(i, it->second);
        return std::nullopt;
    };
    auto m = meet();
    for (int level = 0; !m && level < depth; ++level) {
        std::size_t ea = A.size();
        detail::expand_level(A, ia, fa, ea, cap);
        fa = ea;
        if ((m = meet())) break;
        std::size_t eb = B.size();
        detail::expand_level(B, ib, fb, eb, cap);
        fb = eb;
        m = meet();
    }
    if (!m) return std::nullopt;
    move_script out;
    std::vector<int> chain;
    for (int i = m->first; i > 0; i = A[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    for (int i : chain) {
        out.steps.push_back(A[i].via);
        out.states.push_back(A[i].d);
    }
    diagram cur = out.states.empty() ? from : out.states.back();
    for (int j = m->second; j > 0; j = B[j].parent) {
        auto& prev = B[B[j].parent];
        auto st = find_step(cur, B[j].via.spec, canonical_form(prev.d), {opposite(B[j].via.dir)});
        if (!st) return std::nullopt;
        out.steps.push_back({st->first.spec, st->first.dir, st->first.fingerprint()});
        cur = st->second;
        out.states.push_back(cur);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Composite moves.

namespace detail {

struct stage_plan {
    std::array<bool, 3> tf{};        // drawings below are transformed by this
    std::vector<sketch> stages;      // intermediate tangles, lhs and rhs excluded
    struct link {
        std::optional<move_spec> sub; // a single move, possibly composite
        bool reidemeister = false;    // followed (or replaced) by off-axis moves
    };
    std::vector<link> links;         // stages.size() + 1 of them
};

inline stage_plan plan_for(const move_spec& spec) {
    stage_plan p;
    auto sub = [](move_spec s) { return stage_plan::link{s, false}; };
    auto rsearch = stage_plan::link{std::nullopt, true};
    if (spec.kind == move_kind::S4mn) {
        int m = spec.m, n = spec.n;
        if (m == 0 || n == 0) {
            p.links = {rsearch};
            return p;
        }
        if ((m > 0) != (n > 0)) throw unsupported_signs("S4mn(" + std::to_string(m) + "," + std::to_string(n) +
                                                        ") with mixed signs has no transcribed decomposition");
        if (m < 0) {
            p = plan_for({move_kind::S4mn, -m, -n});
            p.tf[0] = !p.tf[0];
            return p;
        }
        if (m == 1 && n == 1) {
            p.links = {sub({move_kind::S4})};
            return p;
        }
        if (m == 1) {
            // the mirror picture of S4(n, 1) upside down with crossings switched
            p = plan_for({move_kind::S4mn, n, 1});
            p.tf = {p.tf[0], !p.tf[1], !p.tf[2]};
            return p;
        }
        p.stages = {s4mn_stage(m, n, 1), s4mn_stage(m, n, 2)};
        p.links = {rsearch, sub({move_kind::S4mn, 1, n}), sub({move_kind::S4mn, m - 1, n})};
        return p;
    }
    if (spec.kind == move_kind::S2pmn) {
        int s = spec.m, n = spec.n;
        if (n == 0) {
            p.links = {rsearch};
            return p;
        }
        if (n == 1 || n == -1) {
            p.links = {sub({move_kind::S2pm})};
            return p;
        }
        if (s > 0) {
            p = plan_for({move_kind::S2pmn, -1, -n});
            p.tf[2] = !p.tf[2];
            return p;
        }
        if (n > 0) {
            p = plan_for({move_kind::S2pmn, -1, -n});
            p.tf[0] = !p.tf[0];
            return p;
        }
        for (int st = 0; st < 4; ++st) p.stages.push_back(s2pmn_stage(n, st));
        p.links = {rsearch, {move_spec{move_kind::S4mn, -1, n + 1}, true}, rsearch, sub({move_kind::S2pmn, -1, n + 1}),
                   sub({move_kind::S2pm})};
        return p;
    }
    throw error(spec.str() + " is not a composite move");
}

} // namespace detail

// Rewrites a composite move at a site as a script of elementary moves. The
// last state equals apply_move(d, site) up to relabelling.
inline move_script expand_composite(const diagram& d, const move_site& site) {
    if (!is_composite(site.spec.kind)) {
        move_script s;
        s.steps.push_back({site.spec, site.dir, site.fingerprint()});
        s.states.push_back(apply_move(d, site));
        return s;
    }
    auto& T = get_template(site.spec);
    auto& V = T.variants.at(site.variant);
    detail::stage_plan plan = detail::plan_for(site.spec);
    host_graph g = make_host_graph(d);
    bool fw = site.dir == move_direction::forward;
    const pattern& P = fw ? V.lhs : V.rhs;
    // stage diagrams
    std::vector<diagram> targets;
    for (auto& st : plan.stages) {
        sketch s = symknot::transformed(st, plan.tf[0], plan.tf[1], plan.tf[2]);
        s = symknot::transformed(s, V.tf[0], V.tf[1], V.tf[2]);
        tangle t = build_tangle(s);
        auto rho = mirror_of(t);
        if (!rho) throw error("stage drawing of " + site.spec.str() + " is not symmetric");
        std::vector<std::array<int, 4>> pairs;
        for (int a = 0; a < t.num_nodes(); ++a)
            if (t.nodes[a].kind == tangle_node::crossing && !t.nodes[a].on_axis && a < rho->node[a])
                pairs.push_back({0, a, 0, rho->node[a]});
        targets.push_back(rewrite(d, g, {{&P, &t, site.emb}}, pairs));
    }
    targets.push_back(apply_move(d, site));
    auto links = plan.links;
    if (!fw) {
        std::reverse(targets.begin(), targets.end() - 1);
        std::reverse(links.begin(), links.end());
        // a reversed link runs its off-axis part first
    }
    move_script out;
    diagram cur = d;
    auto append = [&](const move_script& s) {
        for (std::size_t i = 0; i < s.steps.size(); ++i) {
            out.steps.push_back(s.steps[i]);
            out.states.push_back(s.states[i]);
        }
        if (!s.states.empty()) cur = s.states.back();
    };
    for (std::size_t li = 0; li < links.size(); ++li) {
        auto& L = links[li];
        std::string want = canonical_form(targets[li]);
        auto fail = [&]() {
            return error("decomposition of " + site.spec.str() + " failed at step " + std::to_string(li + 1));
        };
        if (!L.sub) {
            auto r = reidemeister_path(cur, targets[li], 4);
            if (!r) throw fail();
            append(*r);
            continue;
        }
        if (!L.reidemeister) {
            auto st = find_step(cur, *L.sub, want);
            if (!st) throw fail();
            append(expand_composite(cur, st->first));
            continue;
        }
        // a move plus off-axis moves, in the order given by the direction
        bool done = false;
        if (fw) {
            for (auto dir : {move_direction::forward, move_direction::reverse}) {
                for (auto& s : enumerate_sites(cur, *L.sub, dir, true)) {
                    diagram r = apply_move(cur, s);
                    if (!reidemeister_path(r, targets[li], 3)) continue;
                    append(expand_composite(cur, s));
                    auto rp = reidemeister_path(cur, targets[li], 3);
                    if (!rp) throw fail();
                    append(*rp);
                    done = true;
                    break;
                }
                if (done) break;
            }
        } else {
            diagram goal = targets[li];
            for (auto dir : {move_direction::forward, move_direction::reverse}) {
                for (auto& s : enumerate_sites(goal, *L.sub, dir, true)) {
                    diagram r = apply_move(goal, s);
                    auto rp = reidemeister_path(cur, r, 3);
                    if (!rp) continue;
                    append(*rp);
                    auto st = find_step(cur, *L.sub, want);
                    if (!st) throw fail();
                    append(expand_composite(cur, st->first));
                    done = true;
                    break;
                }
                if (done) break;
            }
        }
        if (!done) throw fail();
    }
    if (canonical_form(cur) != canonical_form(targets.back()))
        throw error("decomposition of " + site.spec.str() + " did not reach the move result");
    return out;
}

// The composite move on the closure of its own left-hand side.
struct composite_run {
    diagram start, expected;
    move_site site;
    move_script script;
};

inline composite_run expand_composite(const move_spec& spec) {
    composite_run run;
    run.start = template_closure(spec, false);
    run.expected = template_closure(spec, true);
    auto st = find_step(run.start, spec, canonical_form(run.expected), {move_direction::forward});
    if (!st) throw error("no " + spec.str() + " site on its own closure");
    run.site = st->first;
    run.script = expand_composite(run.start, run.site);
    return run;
}

// ---------------------------------------------------------------------------
// Random move sequences.

struct scramble_entry {
    move_step step;
    move_step inverse; // applies to the diagram after `step`
};

struct scramble_result {
    diagram result;
    std::vector<scramble_entry> log;
};

inline nlohmann::json scramble_log_json(const std::vector<scramble_entry>& log) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& e : log) {
        auto j = e.step.to_json();
        j["inverse"] = e.inverse.to_json();
        a.push_back(j);
    }
    return a;
}

inline std::vector<scramble_entry> scramble_log_from_json(const nlohmann::json& a) {
    if (!a.is_array()) throw parse_error("move log must be a JSON array");
    std::vector<scramble_entry> v;
    for (auto& j : a) {
        scramble_entry e;
        e.step = move_step::from_json(j);
        if (j.contains("inverse")) e.inverse = move_step::from_json(j.at("inverse"));
        v.push_back(e);
    }
    return v;
}

inline scramble_result scramble(const diagram& d, std::uint64_t seed, int length, move_class cls, int budget = 40) {
    std::mt19937_64 rng(seed);
    scramble_result out{d, {}};
    auto kinds = class_kinds(cls);
    for (int step = 0; step < length; ++step) {
        std::vector<std::pair<move_kind, move_direction>> options;
        for (auto k : kinds)
            for (auto dir : {move_direction::forward, move_direction::reverse}) options.push_back({k, dir});
        std::shuffle(options.begin(), options.end(), rng);
        bool moved = false;
        for (auto& [k, dir] : options) {
            move_spec spec{k};
            auto sites = enumerate_sites(out.result, spec, dir, false);
            std::shuffle(sites.begin(), sites.end(), rng);
            for (auto& s : sites) {
                diagram r = apply_move(out.result, s);
                if (r.num_crossings() > budget) continue;
                auto inv = find_step(r, spec, canonical_form(out.result), {opposite(dir)});
                if (!inv) continue;
                out.log.push_back({{spec, dir, s.fingerprint()}, {spec, inv->first.dir, inv->first.fingerprint()}});
                out.result = std::move(r);
                moved = true;
                break;
            }
            if (moved) break;
        }
        if (!moved) break;
    }
    return out;
}

inline diagram replay(const diagram& d, const std::vector<move_step>& steps) {
    diagram cur = d;
    for (auto& s : steps) cur = apply_step(cur, s);
    return cur;
}

inline diagram replay_inverse(const diagram& end, const std::vector<scramble_entry>& log) {
    diagram cur = end;
    for (auto it = log.rbegin(); it != log.rend(); ++it) cur = apply_step(cur, it->inverse);
    return cur;
}

} // namespace symknot
