#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "errors.hpp"
#include "net.hpp"

namespace symknot {

// ---------------------------------------------------------------------------
// Integer polyline drawings. The mirror axis is x = 0; a larger z is over.

struct ipt {
    long long x = 0, y = 0;
    friend auto operator<=>(const ipt&, const ipt&) = default;
};

struct sketch_piece {
    std::vector<ipt> pts;
    int z = 0;
};

// Pieces are glued at shared endpoints. With a frame, piece ends lying on the
// frame are the tangle ends; without one every end must be glued.
struct sketch {
    std::vector<sketch_piece> pieces;
    std::optional<std::array<long long, 4>> frame; // xmin, xmax, ymin, ymax

    void add(std::vector<ipt> pts, int z = 0) { pieces.push_back({std::move(pts), z}); }
    void append(const sketch& o) {
        for (auto& p : o.pieces) pieces.push_back(p);
    }
};

inline sketch transformed(const sketch& s, bool xf, bool yf, bool sw) {
    sketch r;
    for (auto p : s.pieces) {
        for (auto& q : p.pts) {
            if (xf) q.x = -q.x;
            if (yf) q.y = -q.y;
        }
        if (sw) p.z = -p.z;
        r.pieces.push_back(std::move(p));
    }
    if (s.frame) {
        auto f = *s.frame;
        if (xf) f = {-f[1], -f[0], f[2], f[3]};
        if (yf) f = {f[0], f[1], -f[3], -f[2]};
        r.frame = f;
    }
    return r;
}

inline sketch shifted(const sketch& s, long long dx, long long dy) {
    sketch r = s;
    for (auto& p : r.pieces)
        for (auto& q : p.pts) q.x += dx, q.y += dy;
    if (r.frame) {
        auto& f = *r.frame;
        f = {f[0] + dx, f[1] + dx, f[2] + dy, f[3] + dy};
    }
    return r;
}

struct box_ends {
    ipt nw, ne, sw, se;
};

// A vertical twist box of |m| crossings centred on x = cx, from y = top
// downward in steps of `step`. Box labels follow the twist-box convention:
// m > 0 puts the rising (SW-NE) diagonal over. m = 0 is two vertical strands.
inline box_ends add_box(sketch& s, long long cx, long long top, long long w, long long step, int m, int zlo = 0) {
    int n = std::abs(m);
    long long bot = top - step * std::max(n, 1);
    box_ends e{{cx - w, top}, {cx + w, top}, {cx - w, bot}, {cx + w, bot}};
    if (n == 0) {
        s.add({e.nw, e.sw}, zlo);
        s.add({e.ne, e.se}, zlo);
        return e;
    }
    for (int i = 0; i < n; ++i) {
        long long y0 = top - step * i, y1 = y0 - step;
        bool left_start = i % 2 == 0;
        // strand 1 falls from the left when i is even
        ipt a0{left_start ? cx - w : cx + w, y0}, a1{left_start ? cx + w : cx - w, y1};
        ipt b0{left_start ? cx + w : cx - w, y0}, b1{left_start ? cx - w : cx + w, y1};
        bool a_falls_right = a1.x > a0.x; // NW-SE diagonal
        bool a_over = (m > 0) != a_falls_right;
        s.add({a0, a1}, a_over ? zlo + 1 : zlo);
        s.add({b0, b1}, a_over ? zlo : zlo + 1);
    }
    return e;
}

// Samples a cubic Bezier; the points are scaled and rounded. Points landing
// on the axis are nudged off it.
inline std::vector<ipt> bezier(std::array<double, 2> p0, std::array<double, 2> c1, std::array<double, 2> c2,
                               std::array<double, 2> p3, int samples, double scale) {
    std::vector<ipt> out;
    for (int i = 0; i <= samples; ++i) {
        double t = static_cast<double>(i) / samples, u = 1 - t;
        double x = u * u * u * p0[0] + 3 * u * u * t * c1[0] + 3 * u * t * t * c2[0] + t * t * t * p3[0];
        double y = u * u * u * p0[1] + 3 * u * u * t * c1[1] + 3 * u * t * t * c2[1] + t * t * t * p3[1];
        ipt q{std::llround(x * scale), std::llround(y * scale)};
        if (q.x == 0 && i > 0 && i < samples) q.x = x >= 0 ? 1 : -1;
        if (out.empty() || out.back() != q) out.push_back(q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tangles: the combinatorial content of a drawing.

struct tangle_node {
    enum kind_t : int { crossing = 0, junction = 1, marker = 2 };
    kind_t kind = crossing;
    double x = 0, y = 0;
    bool on_axis = false;
    std::array<int, 4> link{-1, -1, -1, -1};
    std::array<std::array<double, 2>, 4> dir{}; // outward unit direction per port
    int valence() const { return kind == crossing ? 4 : 2; }
};

// Slots: node * 4 + port, or -(b + 1) for tangle end b. Crossing ports run
// counterclockwise from the incoming under-strand; junctions and markers
// have port 0 behind and port 1 ahead along the drawing direction.
struct tangle {
    std::vector<tangle_node> nodes;
    std::vector<int> boundary;                   // counterclockwise from the lower left corner
    std::vector<std::array<double, 2>> boundary_pos;
    int free_loops = 0;                          // closed strands with no nodes
    struct link_rec {
        int from, to, key;
    };
    std::vector<link_rec> links; // drawing direction from -> to

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int across(int slot) const {
        return slot >= 0 ? nodes[slot / 4].link[slot % 4] : boundary[-slot - 1];
    }
};

namespace detail {

struct rat {
    long long n, d; // d > 0
};

inline bool rat_less(rat a, rat b) { return static_cast<__int128>(a.n) * b.d < static_cast<__int128>(b.n) * a.d; }
inline bool rat_eq(rat a, rat b) { return static_cast<__int128>(a.n) * b.d == static_cast<__int128>(b.n) * a.d; }

inline long long cross2(long long ax, long long ay, long long bx, long long by) { return ax * by - ay * bx; }

struct sk_seg {
    ipt a, b;
    int z;
    int strand, index;
};

struct sk_event {
    rat t;
    int node;
    bool over = false;
};

inline double len(double x, double y) { return std::sqrt(x * x + y * y); }

} // namespace detail

inline tangle build_tangle(const sketch& sk) {
    using namespace detail;
    // glue pieces into strands
    std::map<ipt, std::vector<std::pair<int, int>>> ends; // point -> (piece, end)
    int np = static_cast<int>(sk.pieces.size());
    for (int i = 0; i < np; ++i) {
        auto& p = sk.pieces[i].pts;
        if (p.size() < 2) throw invalid_diagram("sketch piece with fewer than two points");
        for (auto& q : p)
            if (q.x == 0) throw invalid_diagram("sketch vertex on the axis");
        if (p.front() == p.back()) continue;
        ends[p.front()].push_back({i, 0});
        ends[p.back()].push_back({i, 1});
    }
    auto on_frame = [&](ipt q) {
        if (!sk.frame) return false;
        auto& f = *sk.frame;
        return q.x == f[0] || q.x == f[1] || q.y == f[2] || q.y == f[3];
    };
    for (auto& [q, v] : ends) {
        if (v.size() > 2) throw invalid_diagram("more than two pieces meet at a point");
        if (v.size() == 1 && !on_frame(q)) throw invalid_diagram("loose piece end");
        if (v.size() == 2 && on_frame(q)) throw invalid_diagram("glued point on the frame");
    }
    struct strand {
        std::vector<sk_seg> segs;
        bool closed = false;
        ipt start, finish;
    };
    std::vector<strand> strands;
    std::vector<bool> used(np, false);
    auto follow = [&](int piece, int from_end, strand& st) {
        int cur = piece, fe = from_end;
        while (true) {
            used[cur] = true;
            auto pts = sk.pieces[cur].pts;
            if (fe == 1) std::reverse(pts.begin(), pts.end());
            for (std::size_t k = 0; k + 1 < pts.size(); ++k) st.segs.push_back({pts[k], pts[k + 1], sk.pieces[cur].z, 0, 0});
            ipt last = pts.back();
            auto& v = ends[last];
            if (v.size() == 1) {
                st.finish = last;
                return;
            }
            auto nxt = v[0].first == cur && v[0].second == 1 - fe ? v[1] : v[0];
            if (used[nxt.first]) {
                st.closed = true;
                return;
            }
            cur = nxt.first;
            fe = nxt.second;
        }
    };
    for (auto& [q, v] : ends) {
        if (v.size() != 1 || used[v[0].first]) continue;
        strand st;
        st.start = q;
        follow(v[0].first, v[0].second, st);
        strands.push_back(std::move(st));
    }
    for (int i = 0; i < np; ++i) {
        if (used[i]) continue;
        strand st;
        if (sk.pieces[i].pts.front() == sk.pieces[i].pts.back()) {
            used[i] = true;
            auto& pts = sk.pieces[i].pts;
            for (std::size_t k = 0; k + 1 < pts.size(); ++k) st.segs.push_back({pts[k], pts[k + 1], sk.pieces[i].z, 0, 0});
            st.closed = true;
        } else {
            follow(i, 0, st);
            st.closed = true;
        }
        strands.push_back(std::move(st));
    }
    std::vector<sk_seg> segs;
    for (int s = 0; s < static_cast<int>(strands.size()); ++s)
        for (int k = 0; k < static_cast<int>(strands[s].segs.size()); ++k) {
            auto g = strands[s].segs[k];
            g.strand = s;
            g.index = k;
            segs.push_back(g);
        }
    int ns = static_cast<int>(segs.size());
    auto adjacent = [&](const sk_seg& a, const sk_seg& b) {
        if (a.strand != b.strand) return false;
        int n = static_cast<int>(strands[a.strand].segs.size());
        if (std::abs(a.index - b.index) == 1) return true;
        return strands[a.strand].closed && n > 2 && std::abs(a.index - b.index) == n - 1;
    };
    tangle t;
    std::vector<std::vector<sk_event>> ev(ns);
    std::vector<std::array<int, 2>> under_over; // per crossing node: segment indices
    for (int i = 0; i < ns; ++i)
        for (int j = i + 1; j < ns; ++j) {
            auto& A = segs[i];
            auto& B = segs[j];
            long long rx = A.b.x - A.a.x, ry = A.b.y - A.a.y, sx = B.b.x - B.a.x, sy = B.b.y - B.a.y;
            long long den = cross2(rx, ry, sx, sy);
            long long qx = B.a.x - A.a.x, qy = B.a.y - A.a.y;
            bool adj = adjacent(A, B);
            if (den == 0) {
                if (cross2(qx, qy, rx, ry) != 0) continue; // parallel, apart
                // collinear: overlap check by projection
                auto proj = [&](ipt p) { return (p.x - A.a.x) * rx + (p.y - A.a.y) * ry; };
                long long L = rx * rx + ry * ry;
                long long p0 = proj(B.a), p1 = proj(B.b);
                if (p0 > p1) std::swap(p0, p1);
                long long lo = std::max(0LL, p0), hi = std::min(L, p1);
                if (lo < hi || (!adj && lo == hi)) throw invalid_diagram("overlapping sketch segments");
                continue;
            }
            long long tn = cross2(qx, qy, sx, sy), sn = cross2(qx, qy, rx, ry);
            if (den < 0) den = -den, tn = -tn, sn = -sn;
            if (tn < 0 || tn > den || sn < 0 || sn > den) continue;
            bool interior = tn > 0 && tn < den && sn > 0 && sn < den;
            if (!interior) {
                if (adj) continue;
                throw invalid_diagram("sketch segments touch at a vertex near (" + std::to_string(A.a.x) + "," +
                                      std::to_string(A.a.y) + ")-(" + std::to_string(A.b.x) + "," +
                                      std::to_string(A.b.y) + ")");
            }
            if (A.z == B.z) throw invalid_diagram("crossing between pieces on the same level");
            int node = t.num_nodes();
            tangle_node nd;
            nd.kind = tangle_node::crossing;
            long long xn = A.a.x * den + tn * rx, yn = A.a.y * den + tn * ry;
            nd.x = static_cast<double>(xn) / den;
            nd.y = static_cast<double>(yn) / den;
            nd.on_axis = xn == 0;
            t.nodes.push_back(nd);
            bool a_over = A.z > B.z;
            ev[i].push_back({{tn, den}, node, a_over});
            ev[j].push_back({{sn, den}, node, !a_over});
            under_over.push_back(a_over ? std::array<int, 2>{j, i} : std::array<int, 2>{i, j});
        }
    // axis points away from crossings
    for (int i = 0; i < ns; ++i) {
        auto& A = segs[i];
        if (!((A.a.x < 0 && A.b.x > 0) || (A.a.x > 0 && A.b.x < 0))) continue;
        rat tt{A.a.x, A.a.x - A.b.x};
        if (tt.d < 0) tt.n = -tt.n, tt.d = -tt.d;
        bool at_crossing = false;
        for (auto& e : ev[i])
            if (e.node >= 0 && t.nodes[e.node].kind == tangle_node::crossing && rat_eq(e.t, tt)) at_crossing = true;
        if (at_crossing) continue;
        tangle_node nd;
        nd.kind = tangle_node::junction;
        nd.on_axis = true;
        nd.x = 0;
        nd.y = A.a.y + static_cast<double>(tt.n) / tt.d * (A.b.y - A.a.y);
        ev[i].push_back({tt, t.num_nodes(), false});
        t.nodes.push_back(nd);
    }
    for (auto& e : ev)
        std::sort(e.begin(), e.end(), [](const sk_event& a, const sk_event& b) { return rat_less(a.t, b.t); });
    // per strand event sequence, adding markers on bare open strands
    struct pass {
        int node;
        int seg;
        bool over;
    };
    std::vector<std::vector<pass>> seq(strands.size());
    int base = 0;
    for (int s = 0; s < static_cast<int>(strands.size()); ++s) {
        int n = static_cast<int>(strands[s].segs.size());
        for (int k = 0; k < n; ++k)
            for (auto& e : ev[base + k]) seq[s].push_back({e.node, base + k, e.over});
        if (seq[s].empty() && !strands[s].closed) {
            int k = n / 2;
            auto& g = segs[base + k];
            tangle_node nd;
            nd.kind = tangle_node::marker;
            nd.x = (g.a.x + g.b.x) / 2.0;
            nd.y = (g.a.y + g.b.y) / 2.0;
            seq[s].push_back({t.num_nodes(), base + k, false});
            t.nodes.push_back(nd);
        }
        if (seq[s].empty()) ++t.free_loops;
        base += n;
    }
    // ports: (node, passage before/after) -> port
    auto unit = [](const sk_seg& g, double sgn) {
        double dx = static_cast<double>(g.b.x - g.a.x), dy = static_cast<double>(g.b.y - g.a.y);
        double l = len(dx, dy);
        return std::array<double, 2>{sgn * dx / l, sgn * dy / l};
    };
    auto port_of = [&](int node, int seg, bool after) -> int {
        auto& nd = t.nodes[node];
        if (nd.kind != tangle_node::crossing) return after ? 1 : 0;
        auto uo = under_over[node];
        if (seg == uo[0]) return after ? 2 : 0;
        auto& U = segs[uo[0]];
        auto& O = segs[uo[1]];
        long long c = cross2(-(U.b.x - U.a.x), -(U.b.y - U.a.y), O.b.x - O.a.x, O.b.y - O.a.y);
        // port 1 is the over end counterclockwise next to the incoming under end
        bool after_is_1 = c > 0;
        return (after == after_is_1) ? 1 : 3;
    };
    for (int node = 0; node < t.num_nodes(); ++node) {
        auto& nd = t.nodes[node];
        if (nd.kind != tangle_node::crossing) continue;
        auto uo = under_over[node];
        for (bool after : {false, true}) {
            nd.dir[port_of(node, uo[0], after)] = unit(segs[uo[0]], after ? 1 : -1);
            nd.dir[port_of(node, uo[1], after)] = unit(segs[uo[1]], after ? 1 : -1);
        }
    }
    int key = 0;
    auto link = [&](int a, int b) {
        if (a >= 0) t.nodes[a / 4].link[a % 4] = b;
        if (b >= 0) t.nodes[b / 4].link[b % 4] = a;
        t.links.push_back({a, b, key++});
    };
    std::vector<std::pair<ipt, int>> bslots; // frame point, slot of attached end
    for (int s = 0; s < static_cast<int>(strands.size()); ++s) {
        auto& q = seq[s];
        if (q.empty()) continue;
        for (auto& ps : q)
            if (t.nodes[ps.node].kind != tangle_node::crossing) {
                t.nodes[ps.node].dir[0] = unit(segs[ps.seg], -1);
                t.nodes[ps.node].dir[1] = unit(segs[ps.seg], 1);
            }
        auto before = [&](const pass& p) { return p.node * 4 + port_of(p.node, p.seg, false); };
        auto after = [&](const pass& p) { return p.node * 4 + port_of(p.node, p.seg, true); };
        int nb = static_cast<int>(bslots.size());
        if (!strands[s].closed) {
            bslots.push_back({strands[s].start, before(q.front())});
            bslots.push_back({strands[s].finish, after(q.back())});
        }
        for (std::size_t k = 0; k + 1 < q.size(); ++k) link(after(q[k]), before(q[k + 1]));
        if (strands[s].closed) link(after(q.back()), before(q.front()));
        else {
            // boundary links are recorded once the ends are numbered
            t.links.push_back({-(nb + 1), before(q.front()), key++});
            t.links.push_back({after(q.back()), -(nb + 2), key++});
        }
    }
    if (!sk.frame) return t;
    auto& f = *sk.frame;
    long long W = f[1] - f[0], H = f[3] - f[2];
    auto perim = [&](ipt p) -> long long {
        if (p.y == f[2] && p.x > f[0]) return p.x - f[0];
        if (p.x == f[1] && p.y > f[2]) return W + (p.y - f[2]);
        if (p.y == f[3] && p.x < f[1]) return W + H + (f[1] - p.x);
        return 2 * W + H + (f[3] - p.y);
    };
    std::vector<int> order(bslots.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return perim(bslots[a].first) < perim(bslots[b].first); });
    std::vector<int> number(bslots.size());
    for (std::size_t i = 0; i < order.size(); ++i) number[order[i]] = static_cast<int>(i);
    t.boundary.resize(bslots.size());
    t.boundary_pos.resize(bslots.size());
    for (std::size_t i = 0; i < bslots.size(); ++i) {
        int b = number[i];
        t.boundary[b] = bslots[i].second;
        t.boundary_pos[b] = {static_cast<double>(bslots[i].first.x), static_cast<double>(bslots[i].first.y)};
        int sl = bslots[i].second;
        t.nodes[sl / 4].link[sl % 4] = -(b + 1);
    }
    for (auto& l : t.links) {
        if (l.from < 0) l.from = -(number[-l.from - 1] + 1);
        if (l.to < 0) l.to = -(number[-l.to - 1] + 1);
    }
    return t;
}

// Partner of every node and port under x -> -x, or nothing when the drawing
// is not symmetric.
struct tangle_mirror {
    std::vector<int> node;
    std::vector<std::array<int, 4>> port;
    std::vector<int> boundary;
};

// Correspondence between a and b where b is drawn as the reflection of a.
inline std::optional<tangle_mirror> mirror_between(const tangle& t, const tangle& u) {
    constexpr double eps = 1e-7;
    tangle_mirror m;
    int n = t.num_nodes();
    if (u.num_nodes() != n || u.boundary.size() != t.boundary.size()) return std::nullopt;
    m.node.assign(n, -1);
    m.port.assign(n, {-1, -1, -1, -1});
    for (int a = 0; a < n; ++a) {
        auto& A = t.nodes[a];
        for (int b = 0; b < n; ++b) {
            auto& B = u.nodes[b];
            if (A.kind != B.kind || std::abs(A.x + B.x) > eps || std::abs(A.y - B.y) > eps) continue;
            m.node[a] = b;
            for (int p = 0; p < A.valence(); ++p)
                for (int q = 0; q < B.valence(); ++q)
                    if (std::abs(A.dir[p][0] + B.dir[q][0]) < eps && std::abs(A.dir[p][1] - B.dir[q][1]) < eps)
                        m.port[a][p] = q;
        }
        if (m.node[a] < 0) return std::nullopt;
        for (int p = 0; p < A.valence(); ++p)
            if (m.port[a][p] < 0) return std::nullopt;
    }
    int nb = static_cast<int>(t.boundary.size());
    m.boundary.assign(nb, -1);
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b)
            if (std::abs(t.boundary_pos[a][0] + u.boundary_pos[b][0]) < eps &&
                std::abs(t.boundary_pos[a][1] - u.boundary_pos[b][1]) < eps)
                m.boundary[a] = b;
    for (int a = 0; a < nb; ++a)
        if (m.boundary[a] < 0) return std::nullopt;
    return m;
}

inline std::optional<tangle_mirror> mirror_of(const tangle& t) { return mirror_between(t, t); }

// Geometric fingerprint: equal for equal drawings up to piece subdivision.
inline std::string tangle_signature(const tangle& t) {
    auto r = [](double v) { return std::llround(v * 1e6); };
    std::vector<std::string> items;
    auto slot_str = [&](int s) {
        std::ostringstream o;
        if (s < 0) {
            auto& p = t.boundary_pos[-s - 1];
            o << "b" << r(p[0]) << "," << r(p[1]);
        } else {
            auto& nd = t.nodes[s / 4];
            o << "n" << r(nd.x) << "," << r(nd.y) << "/" << r(nd.dir[s % 4][0]) << "," << r(nd.dir[s % 4][1]);
        }
        return o.str();
    };
    for (int a = 0; a < t.num_nodes(); ++a) {
        auto& nd = t.nodes[a];
        std::ostringstream o;
        o << nd.kind << ":" << r(nd.x) << "," << r(nd.y);
        for (int p = 0; p < nd.valence(); ++p) o << "|" << slot_str(a * 4 + p) << ">" << slot_str(nd.link[p]);
        items.push_back(o.str());
    }
    std::sort(items.begin(), items.end());
    std::string s = std::to_string(t.free_loops);
    for (auto& i : items) s += ";" + i;
    return s;
}

// A closed drawing as a diagram. Orientation follows the drawing where the
// mirror rule allows; axis crossings are ranked from the top down.
inline diagram sketch_diagram(const sketch& sk) {
    if (sk.frame) throw invalid_diagram("sketch_diagram needs a closed drawing");
    tangle t = build_tangle(sk);
    net b;
    std::vector<int> id(t.num_nodes());
    for (int a = 0; a < t.num_nodes(); ++a) {
        auto& nd = t.nodes[a];
        if (nd.kind == tangle_node::crossing) id[a] = b.add_crossing(std::nullopt, nd.on_axis, -nd.y);
        else id[a] = b.add_junction(nd.on_axis);
    }
    for (int a = 0; a < t.num_nodes(); ++a) {
        auto& A = t.nodes[a];
        if (A.kind != tangle_node::crossing || A.on_axis) continue;
        for (int c = a + 1; c < t.num_nodes(); ++c) {
            auto& C = t.nodes[c];
            if (C.kind == tangle_node::crossing && std::abs(A.x + C.x) < 1e-7 && std::abs(A.y - C.y) < 1e-7) b.pair(id[a], id[c]);
        }
    }
    for (auto& l : t.links)
        b.connect({id[l.from / 4], l.from % 4}, {id[l.to / 4], l.to % 4}, net_hint{l.key, true});
    for (int i = 0; i < t.free_loops; ++i) b.add_free_loop(false);
    return b.finalize();
}

} // namespace symknot
