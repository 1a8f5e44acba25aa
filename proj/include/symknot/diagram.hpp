#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <compare>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace symknot {

// A slot position on a crossing. Slots run counterclockwise from the
// incoming under-strand: 0 and 2 are under, 1 and 3 are over.
struct dart {
    int x = -1;
    int s = 0;
    friend auto operator<=>(const dart&, const dart&) = default;
};

struct crossing {
    int id = 0;
    std::array<int, 4> edges{};
    bool on_axis = false;
    std::optional<int> axis_index;
    std::optional<int> mirror_partner; // crossing index, not id
};

struct free_loop {
    bool crosses_axis = false;
    friend bool operator==(const free_loop&, const free_loop&) = default;
};

// Edges are dense 0..E-1; tail[e] is the dart where e leaves its crossing.
struct diagram {
    std::vector<crossing> crossings;
    std::vector<free_loop> free_loops;
    std::vector<dart> tail;

    int num_crossings() const { return static_cast<int>(crossings.size()); }
    int num_edges() const { return static_cast<int>(tail.size()); }
    int edge_at(dart d) const { return crossings[d.x].edges[d.s]; }

    // positive iff the over-strand leaves through slot 1
    int sign(int x) const { return tail[crossings[x].edges[1]] == dart{x, 1} ? 1 : -1; }

    int axis_count() const {
        int n = 0;
        for (auto& c : crossings) n += c.on_axis;
        return n;
    }

    std::optional<int> index_of_id(int id) const {
        for (int x = 0; x < num_crossings(); ++x)
            if (crossings[x].id == id) return x;
        return std::nullopt;
    }
};

namespace detail {

struct dsu {
    std::vector<int> p;
    explicit dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int a) {
        while (p[a] != a) a = p[a] = p[p[a]];
        return a;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        p[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

inline int mod4(int v) { return ((v % 4) + 4) % 4; }

} // namespace detail

// Both ends of every edge, as darts.
class edge_table {
public:
    explicit edge_table(const diagram& d) : d_(&d), ends_(d.num_edges(), {dart{}, dart{}}) {
        std::vector<int> seen(d.num_edges(), 0);
        for (int x = 0; x < d.num_crossings(); ++x)
            for (int s = 0; s < 4; ++s) {
                int e = d.crossings[x].edges[s];
                if (e < 0 || e >= d.num_edges()) throw validation_error("edge index out of range");
                if (seen[e] >= 2) throw validation_error("edge " + std::to_string(e) + " appears more than twice");
                ends_[e][seen[e]++] = {x, s};
            }
        for (int e = 0; e < d.num_edges(); ++e)
            if (seen[e] != 2) throw validation_error("edge " + std::to_string(e) + " does not appear exactly twice");
    }
    const std::array<dart, 2>& ends(int e) const { return ends_[e]; }
    dart across(dart a) const {
        const auto& en = ends_[d_->edge_at(a)];
        return en[0] == a ? en[1] : en[0];
    }
    dart head(int e) const { return ends_[e][0] == d_->tail[e] ? ends_[e][1] : ends_[e][0]; }

private:
    const diagram* d_;
    std::vector<std::array<dart, 2>> ends_;
};

// Connected components of the crossing graph (free loops excluded).
inline std::vector<int> crossing_components(const diagram& d, int* count = nullptr) {
    detail::dsu u(d.num_crossings());
    edge_table et(d);
    for (int e = 0; e < d.num_edges(); ++e) u.unite(et.ends(e)[0].x, et.ends(e)[1].x);
    std::vector<int> label(d.num_crossings(), -1);
    int n = 0;
    std::map<int, int> root_label;
    for (int x = 0; x < d.num_crossings(); ++x) {
        auto [it, fresh] = root_label.try_emplace(u.find(x), n);
        if (fresh) ++n;
        label[x] = it->second;
    }
    if (count) *count = n;
    return label;
}

struct link_components {
    int count = 0;             // includes free loops
    std::vector<int> of_edge;  // component label per edge
};

inline link_components components(const diagram& d) {
    detail::dsu u(d.num_edges());
    for (auto& c : d.crossings) {
        u.unite(c.edges[0], c.edges[2]);
        u.unite(c.edges[1], c.edges[3]);
    }
    link_components r;
    r.of_edge.assign(d.num_edges(), -1);
    std::map<int, int> lab;
    for (int e = 0; e < d.num_edges(); ++e) {
        auto [it, fresh] = lab.try_emplace(u.find(e), r.count);
        if (fresh) ++r.count;
        r.of_edge[e] = it->second;
    }
    r.count += static_cast<int>(d.free_loops.size());
    return r;
}

struct writhe_split {
    int p_off = 0, n_off = 0, p_axis = 0, n_axis = 0;
    int total() const { return p_off + p_axis - n_off - n_axis; }
    friend bool operator==(const writhe_split&, const writhe_split&) = default;
};

inline writhe_split writhe(const diagram& d) {
    writhe_split w;
    for (int x = 0; x < d.num_crossings(); ++x) {
        bool pos = d.sign(x) > 0;
        if (d.crossings[x].on_axis)
            (pos ? w.p_axis : w.n_axis)++;
        else
            (pos ? w.p_off : w.n_off)++;
    }
    return w;
}

// Faces by rotation-system tracing. Dart (x,s) bounds the face on its left
// when walked away from x; that face also owns the corner between slots s
// and s+1 of x.
struct face_data {
    std::vector<std::vector<dart>> faces;
    std::vector<std::array<int, 4>> face_of; // per crossing, per slot
    std::vector<int> component;              // crossing component of each face
    std::vector<int> outer;                  // unbounded face per crossing component
};

inline face_data faces(const diagram& d) {
    edge_table et(d);
    face_data fd;
    fd.face_of.assign(d.num_crossings(), {-1, -1, -1, -1});
    for (int x = 0; x < d.num_crossings(); ++x)
        for (int s = 0; s < 4; ++s) {
            if (fd.face_of[x][s] >= 0) continue;
            int f = static_cast<int>(fd.faces.size());
            fd.faces.emplace_back();
            dart cur{x, s};
            while (fd.face_of[cur.x][cur.s] < 0) {
                fd.face_of[cur.x][cur.s] = f;
                fd.faces[f].push_back(cur);
                dart nx = et.across(cur);
                cur = {nx.x, detail::mod4(nx.s + 3)};
            }
            if (cur != dart{x, s}) throw validation_error("inconsistent rotation system");
        }
    int ncomp = 0;
    auto comp = crossing_components(d, &ncomp);
    std::vector<int> ccount(ncomp, 0), fcount(ncomp, 0);
    for (int x = 0; x < d.num_crossings(); ++x) ccount[comp[x]]++;
    fd.component.resize(fd.faces.size());
    fd.outer.assign(ncomp, -1);
    for (int f = 0; f < static_cast<int>(fd.faces.size()); ++f) {
        int c = comp[fd.faces[f][0].x];
        fd.component[f] = c;
        fcount[c]++;
        int& o = fd.outer[c];
        // faces are created in order of their lowest dart, so ties keep the first
        if (o < 0 || fd.faces[f].size() > fd.faces[o].size()) o = f;
    }
    for (int c = 0; c < ncomp; ++c)
        if (fcount[c] != ccount[c] + 2)
            throw validation_error("Euler check failed: component with " + std::to_string(ccount[c]) +
                                   " crossings has " + std::to_string(fcount[c]) + " faces");
    return fd;
}

// Each free loop adds an inner and an outer face of its own.
inline int face_count(const diagram& d, const face_data& fd) {
    return static_cast<int>(fd.faces.size() + 2 * d.free_loops.size());
}

// Chequerboard colouring with every unbounded face white.
struct coloring {
    std::vector<bool> black; // per face of face_data
};

inline coloring chequerboard(const diagram& d, const face_data& fd) {
    edge_table et(d);
    int nf = static_cast<int>(fd.faces.size());
    std::vector<std::vector<int>> adj(nf);
    for (int e = 0; e < d.num_edges(); ++e) {
        auto [a, b] = et.ends(e);
        int f = fd.face_of[a.x][a.s], g = fd.face_of[b.x][b.s];
        adj[f].push_back(g);
        adj[g].push_back(f);
    }
    std::vector<int> col(nf, -1);
    for (int o : fd.outer) {
        col[o] = 0;
        std::queue<int> q;
        q.push(o);
        while (!q.empty()) {
            int f = q.front();
            q.pop();
            for (int g : adj[f]) {
                if (col[g] < 0) {
                    col[g] = 1 - col[f];
                    q.push(g);
                } else if (col[g] == col[f]) {
                    throw non_bipartite_faces("faces " + std::to_string(f) + " and " + std::to_string(g));
                }
            }
        }
    }
    coloring c;
    c.black.resize(nf);
    for (int f = 0; f < nf; ++f) c.black[f] = col[f] == 1;
    return c;
}

inline coloring chequerboard(const diagram& d) { return chequerboard(d, faces(d)); }

// Orientation checks at every crossing: slot 0 in, slot 2 out, exactly one
// of slots 1 and 3 out.
inline void check_orientation(const diagram& d) {
    if (static_cast<int>(d.tail.size()) != d.num_edges()) throw validation_error("orientation size mismatch");
    edge_table et(d);
    for (int e = 0; e < d.num_edges(); ++e) {
        auto [a, b] = et.ends(e);
        if (d.tail[e] != a && d.tail[e] != b)
            throw validation_error("orientation of edge " + std::to_string(e) + " names a slot it does not occupy");
    }
    for (int x = 0; x < d.num_crossings(); ++x) {
        auto out = [&](int s) { return d.tail[d.crossings[x].edges[s]] == dart{x, s}; };
        std::string who = "crossing " + std::to_string(d.crossings[x].id);
        if (out(0)) throw validation_error(who + ": slot 0 must be the incoming under-strand");
        if (!out(2)) throw validation_error(who + ": slot 2 must be outgoing");
        if (out(1) == out(3)) throw validation_error(who + ": over-strand needs one incoming and one outgoing slot");
    }
}

// Orientation forced by the slot convention; strands that never pass under
// are oriented from their lowest dart.
inline std::vector<dart> orientation_from_slots(const diagram& d) {
    edge_table et(d);
    int E = d.num_edges();
    std::vector<dart> tail(E, dart{-1, 0});
    auto walk = [&](int e, dart t) {
        while (tail[e].x < 0) {
            tail[e] = t;
            dart h = et.across(t);
            t = {h.x, detail::mod4(h.s + 2)};
            e = d.edge_at(t);
        }
    };
    for (int x = 0; x < d.num_crossings(); ++x) walk(d.crossings[x].edges[2], {x, 2});
    for (int e = 0; e < E; ++e)
        if (tail[e].x < 0) walk(e, std::min(et.ends(e)[0], et.ends(e)[1]));
    return tail;
}

inline void validate(const diagram& d) {
    for (int x = 0; x < d.num_crossings(); ++x) {
        auto& c = d.crossings[x];
        if (c.on_axis != c.axis_index.has_value())
            throw validation_error("crossing " + std::to_string(c.id) + ": axis_index required iff on_axis");
        if (c.on_axis && c.mirror_partner)
            throw validation_error("crossing " + std::to_string(c.id) + ": on-axis crossing with a mirror partner");
        if (c.mirror_partner && (*c.mirror_partner < 0 || *c.mirror_partner >= d.num_crossings()))
            throw validation_error("crossing " + std::to_string(c.id) + ": mirror partner out of range");
    }
    std::set<int> idx;
    for (auto& c : d.crossings)
        if (c.axis_index && !idx.insert(*c.axis_index).second)
            throw validation_error("duplicate axis_index " + std::to_string(*c.axis_index));
    check_orientation(d);
    faces(d);
}

// ---------------------------------------------------------------------------
// Mirror involution on darts: rho(x, s) = (partner(x), k_x - s mod 4).

struct mirror_map {
    std::vector<int> cross;
    std::vector<int> k;
    std::vector<int> edge; // image of each edge

    dart operator()(dart a) const { return {cross[a.x], detail::mod4(k[a.x] - a.s)}; }
    bool fixes_edge(int e) const { return edge[e] == e; }
    // +1 when the SW-NE strand is over, -1 for NW-SE
    int axis_type(int x) const { return k[x] == 3 ? 1 : -1; }
};

namespace detail {

inline bool propagate_mirror(const diagram& d, const edge_table& et, int seed, int kseed, std::vector<int>& cross,
                             std::vector<int>& k, std::vector<int>& touched) {
    auto partner_ok = [&](int y, int yp, int ky) {
        auto& c = d.crossings[y];
        if (c.on_axis) return yp == y && (ky & 1);
        return c.mirror_partner && *c.mirror_partner == yp && !(ky & 1);
    };
    auto assign = [&](int y, int yp, int ky, std::queue<int>& q) {
        if (cross[y] >= 0) return cross[y] == yp && k[y] == ky;
        if (!partner_ok(y, yp, ky)) return false;
        if (cross[yp] >= 0) return false;
        cross[y] = yp;
        k[y] = ky;
        touched.push_back(y);
        q.push(y);
        if (yp != y) {
            if (!partner_ok(yp, y, ky)) return false;
            cross[yp] = y;
            k[yp] = ky;
            touched.push_back(yp);
            q.push(yp);
        }
        return true;
    };
    std::queue<int> q;
    int sp = d.crossings[seed].on_axis ? seed : *d.crossings[seed].mirror_partner;
    if (!assign(seed, sp, kseed, q)) return false;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int s = 0; s < 4; ++s) {
            dart a = et.across({x, s});
            dart b = et.across({cross[x], mod4(k[x] - s)});
            if (!assign(a.x, b.x, mod4(a.s + b.s), q)) return false;
        }
    }
    return true;
}

} // namespace detail

// Finds the mirror involution from the axis flags and mirror pairing. Each
// connected piece has two candidate maps; one that reverses the stored
// orientation is preferred.
inline std::optional<mirror_map> compute_mirror(const diagram& d) {
    int n = d.num_crossings();
    for (auto& c : d.crossings)
        if (!c.on_axis && !c.mirror_partner) return std::nullopt;
    edge_table et(d);
    auto lc = components(d);
    mirror_map m;
    m.cross.assign(n, -1);
    m.k.assign(n, -1);
    // only components mapped to themselves constrain the choice
    auto reverses = [&](const std::vector<int>& xs) {
        for (int x : xs)
            for (int s = 0; s < 4; ++s) {
                int e = d.crossings[x].edges[s];
                if (d.tail[e] != dart{x, s}) continue;
                dart img{m.cross[x], detail::mod4(m.k[x] - s)};
                int f = d.edge_at(img);
                if (lc.of_edge[f] != lc.of_edge[e]) continue;
                if (d.tail[f] == img) return false;
            }
        return true;
    };
    for (int x = 0; x < n; ++x) {
        if (m.cross[x] >= 0) continue;
        bool axis = d.crossings[x].on_axis;
        std::array<int, 2> ks = axis ? std::array<int, 2>{1, 3} : std::array<int, 2>{0, 2};
        std::optional<int> fallback;
        bool done = false;
        for (int kk : ks) {
            std::vector<int> touched;
            bool ok = detail::propagate_mirror(d, et, x, kk, m.cross, m.k, touched);
            if (ok && reverses(touched)) {
                done = true;
                break;
            }
            if (ok && !fallback) fallback = kk;
            for (int y : touched) m.cross[y] = m.k[y] = -1;
        }
        if (!done) {
            if (!fallback) return std::nullopt;
            std::vector<int> touched;
            detail::propagate_mirror(d, et, x, *fallback, m.cross, m.k, touched);
        }
    }
    m.edge.resize(d.num_edges());
    for (int e = 0; e < d.num_edges(); ++e) m.edge[e] = d.edge_at(m(et.ends(e)[0]));
    return m;
}

// Crossing change at x, keeping orientation and the slot convention.
inline diagram switch_crossing(diagram d, int x) {
    auto& c = d.crossings[x];
    // the incoming over-strand becomes slot 0
    int r = d.sign(x) > 0 ? 3 : 1;
    std::array<int, 4> old = c.edges;
    for (int s = 0; s < 4; ++s) c.edges[s] = old[detail::mod4(s + r)];
    for (auto& t : d.tail)
        if (t.x == x) t.s = detail::mod4(t.s - r);
    return d;
}

// ---------------------------------------------------------------------------
// Symmetric union checks.

struct symmetry_failure {
    char check; // 'a'..'d'
    std::string message;
};

struct symmetry_report {
    std::vector<symmetry_failure> failures;
    bool ok() const { return failures.empty(); }
    bool failed(char c) const {
        return std::any_of(failures.begin(), failures.end(), [c](auto& f) { return f.check == c; });
    }
};

// (a) mirror pairing is a fixed-point-free involution on off-axis crossings
// (b) paired crossings have opposite signs
// (c) every component meets the axis in exactly two non-crossing points
// (d) a mirror involution exists and reverses the orientation
inline symmetry_report validate_symmetric_union(const diagram& d) {
    symmetry_report r;
    auto fail = [&](char c, std::string m) { r.failures.push_back({c, std::move(m)}); };
    int n = d.num_crossings();
    for (int x = 0; x < n; ++x) {
        auto& c = d.crossings[x];
        std::string who = "crossing " + std::to_string(c.id);
        if (c.on_axis) continue;
        if (!c.mirror_partner) {
            fail('a', who + " has no mirror partner");
            continue;
        }
        int p = *c.mirror_partner;
        if (p < 0 || p >= n) {
            fail('a', who + " has an out-of-range partner");
            continue;
        }
        if (p == x) fail('a', who + " is paired with itself");
        else if (d.crossings[p].on_axis) fail('a', who + " is paired with an on-axis crossing");
        else if (d.crossings[p].mirror_partner != x) fail('a', who + ": pairing is not involutive");
        else if (x < p && d.sign(x) == d.sign(p)) fail('b', who + " and its partner have equal signs");
    }
    auto m = r.failed('a') ? std::nullopt : compute_mirror(d);
    if (!m) {
        fail('d', "no mirror involution is compatible with the diagram");
        fail('c', "axis points cannot be located");
        return r;
    }
    {
        bool rev = true;
        for (int e = 0; e < d.num_edges() && rev; ++e) {
            dart t = d.tail[e];
            dart img = (*m)(t);
            if (d.tail[d.edge_at(img)] == img) rev = false;
        }
        if (!rev) fail('d', "mirror involution does not reverse the orientation");
    }
    auto lc = components(d);
    int ncomp_edges = lc.count - static_cast<int>(d.free_loops.size());
    std::vector<int> pts(ncomp_edges, 0);
    for (int e = 0; e < d.num_edges(); ++e)
        if (m->fixes_edge(e)) pts[lc.of_edge[e]]++;
    for (int c = 0; c < ncomp_edges; ++c)
        if (pts[c] != 2)
            fail('c', "component " + std::to_string(c) + " meets the axis in " + std::to_string(pts[c]) +
                          " non-crossing points");
    for (std::size_t i = 0; i < d.free_loops.size(); ++i)
        if (!d.free_loops[i].crosses_axis) fail('c', "free loop " + std::to_string(i) + " misses the axis");
    return r;
}

// ---------------------------------------------------------------------------
// Canonical form: breadth-first relabelling per connected piece, minimised
// over start crossing and global orientation.

namespace detail {

inline std::vector<long long> encode_piece(const diagram& d, const edge_table& et, const std::vector<int>& comp,
                                           int start, int rot, bool axis_ranks) {
    std::map<int, int> label;
    std::vector<int> order;
    std::queue<int> q;
    label[start] = 0;
    order.push_back(start);
    q.push(start);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int s = 0; s < 4; ++s) {
            dart b = et.across({x, mod4(s + rot)});
            if (label.try_emplace(b.x, static_cast<int>(order.size())).second) {
                order.push_back(b.x);
                q.push(b.x);
            }
        }
    }
    std::vector<long long> code;
    code.push_back(static_cast<long long>(order.size()));
    for (int x : order) {
        auto& c = d.crossings[x];
        code.push_back(c.on_axis);
        code.push_back(d.sign(x));
        long long pc = -1;
        if (c.mirror_partner) {
            int p = *c.mirror_partner;
            pc = comp[p] == comp[x] ? label.at(p) : -2;
        }
        code.push_back(pc);
        for (int s = 0; s < 4; ++s) {
            dart b = et.across({x, mod4(s + rot)});
            code.push_back(label.at(b.x));
            code.push_back(mod4(b.s - rot));
        }
    }
    if (axis_ranks) {
        std::vector<std::pair<int, int>> ax;
        for (int x : order)
            if (d.crossings[x].on_axis) ax.push_back({*d.crossings[x].axis_index, label.at(x)});
        std::sort(ax.begin(), ax.end());
        for (auto& [i, l] : ax) code.push_back(l);
    }
    return code;
}

} // namespace detail

inline std::vector<long long> canonical_code(const diagram& d, bool axis_ranks = false) {
    edge_table et(d);
    int nc = 0;
    auto comp = crossing_components(d, &nc);
    std::vector<std::vector<long long>> pieces(nc);
    for (int x = 0; x < d.num_crossings(); ++x)
        for (int rot : {0, 2}) {
            auto code = detail::encode_piece(d, et, comp, x, rot, axis_ranks);
            auto& best = pieces[comp[x]];
            if (best.empty() || code < best) best = std::move(code);
        }
    std::sort(pieces.begin(), pieces.end());
    std::vector<long long> out;
    out.push_back(nc);
    for (auto& p : pieces) out.insert(out.end(), p.begin(), p.end());
    std::vector<int> loops;
    for (auto& f : d.free_loops) loops.push_back(f.crosses_axis);
    std::sort(loops.begin(), loops.end());
    out.push_back(static_cast<long long>(loops.size()));
    out.insert(out.end(), loops.begin(), loops.end());
    return out;
}

// The diagram renumbered in canonical order: crossings in the breadth-first
// order of the minimal code, edges by first appearance, ids = indices. A
// piece coded from slot 2 has its orientation reversed so slot 0 stays the
// incoming under-strand. Diagrams with equal canonical codes come out equal
// up to orientation and axis ranks.
inline diagram canonical_relabel(const diagram& d) {
    edge_table et(d);
    int nc = 0;
    auto comp = crossing_components(d, &nc);
    struct best_t {
        std::vector<long long> code;
        int start = -1, rot = 0;
    };
    std::vector<best_t> best(nc);
    for (int x = 0; x < d.num_crossings(); ++x)
        for (int rot : {0, 2}) {
            auto code = detail::encode_piece(d, et, comp, x, rot, false);
            auto& b = best[comp[x]];
            if (b.start < 0 || code < b.code) b = {std::move(code), x, rot};
        }
    std::sort(best.begin(), best.end(), [](const best_t& a, const best_t& b) { return a.code < b.code; });
    std::vector<int> newx(d.num_crossings(), -1), rot_of(d.num_crossings(), 0), order;
    for (auto& b : best) {
        std::queue<int> q;
        newx[b.start] = static_cast<int>(order.size());
        order.push_back(b.start);
        q.push(b.start);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            rot_of[x] = b.rot;
            for (int s = 0; s < 4; ++s) {
                dart a = et.across({x, detail::mod4(s + b.rot)});
                if (newx[a.x] < 0) {
                    newx[a.x] = static_cast<int>(order.size());
                    order.push_back(a.x);
                    q.push(a.x);
                }
            }
        }
    }
    diagram out;
    std::vector<int> newe(d.num_edges(), -1);
    int ne = 0;
    for (int x : order) {
        auto& c = d.crossings[x];
        crossing n;
        n.id = newx[x];
        n.on_axis = c.on_axis;
        n.axis_index = c.axis_index;
        if (c.mirror_partner) n.mirror_partner = newx[*c.mirror_partner];
        for (int s = 0; s < 4; ++s) {
            int e = c.edges[detail::mod4(s + rot_of[x])];
            if (newe[e] < 0) newe[e] = ne++;
            n.edges[s] = newe[e];
        }
        out.crossings.push_back(n);
    }
    out.tail.resize(d.num_edges());
    for (int e = 0; e < d.num_edges(); ++e) {
        dart t = d.tail[e];
        if (rot_of[t.x] == 2) t = et.head(e);
        out.tail[newe[e]] = {newx[t.x], detail::mod4(t.s - rot_of[t.x])};
    }
    out.free_loops = d.free_loops;
    std::sort(out.free_loops.begin(), out.free_loops.end(),
              [](const free_loop& a, const free_loop& b) { return a.crosses_axis < b.crosses_axis; });
    return out;
}

inline std::string canonical_form(const diagram& d, bool axis_ranks = false) {
    std::string s;
    for (auto v : canonical_code(d, axis_ranks)) {
        if (!s.empty()) s += ',';
        s += std::to_string(v);
    }
    return s;
}

inline bool same_diagram(const diagram& a, const diagram& b, bool axis_ranks = false) {
    return canonical_code(a, axis_ranks) == canonical_code(b, axis_ranks);
}

// ---------------------------------------------------------------------------
// SUD (JSON) format.

namespace detail {

template <class T>
T field(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw parse_error(path + "." + key + ": missing");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw parse_error(path + "." + key + ": wrong type");
    }
}

inline std::optional<int> opt_int(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number_integer()) throw parse_error(path + "." + key + ": expected integer or null");
    return j.at(key).get<int>();
}

} // namespace detail

inline diagram parse_sud(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(e.what());
    }
    if (!j.is_object()) throw parse_error("top level must be an object");
    diagram d;
    if (j.contains("free_loops")) {
        if (!j["free_loops"].is_array()) throw parse_error("free_loops: expected array");
        int i = 0;
        for (auto& f : j["free_loops"])
            d.free_loops.push_back({detail::field<bool>(f, "crosses_axis", "free_loops[" + std::to_string(i++) + "]")});
    }
    if (!j.contains("crossings") || !j["crossings"].is_array()) throw parse_error("crossings: expected array");
    struct raw {
        int id;
        std::array<int, 4> edges;
        bool on_axis;
        std::optional<int> axis_index, partner;
    };
    std::vector<raw> rs;
    int i = 0;
    for (auto& c : j["crossings"]) {
        std::string path = "crossings[" + std::to_string(i++) + "]";
        raw r;
        r.id = detail::field<int>(c, "id", path);
        auto ev = detail::field<std::vector<int>>(c, "edges", path);
        if (ev.size() != 4) throw parse_error(path + ".edges: expected 4 entries");
        std::copy(ev.begin(), ev.end(), r.edges.begin());
        r.on_axis = c.contains("on_axis") ? detail::field<bool>(c, "on_axis", path) : false;
        r.axis_index = detail::opt_int(c, "axis_index", path);
        r.partner = detail::opt_int(c, "mirror_partner", path);
        rs.push_back(r);
    }
    std::sort(rs.begin(), rs.end(), [](auto& a, auto& b) { return a.id < b.id; });
    std::map<int, int> xid, eid;
    for (auto& r : rs) {
        if (!xid.try_emplace(r.id, static_cast<int>(xid.size())).second)
            throw validation_error("duplicate crossing id " + std::to_string(r.id));
        for (int e : r.edges) eid.emplace(e, 0);
    }
    int ne = 0;
    for (auto& [e, v] : eid) v = ne++;
    for (auto& r : rs) {
        crossing c;
        c.id = r.id;
        for (int s = 0; s < 4; ++s) c.edges[s] = eid[r.edges[s]];
        c.on_axis = r.on_axis;
        c.axis_index = r.axis_index;
        if (r.partner) {
            auto it = xid.find(*r.partner);
            if (it == xid.end())
                throw validation_error("crossing " + std::to_string(r.id) + ": unknown mirror partner " +
                                       std::to_string(*r.partner));
            c.mirror_partner = it->second;
        }
        d.crossings.push_back(c);
    }
    d.tail.assign(ne, dart{-1, 0});
    edge_table et(d);
    if (j.contains("orientation") && !j["orientation"].is_null()) {
        if (!j["orientation"].is_array()) throw parse_error("orientation: expected array");
        i = 0;
        for (auto& o : j["orientation"]) {
            std::string path = "orientation[" + std::to_string(i++) + "]";
            int e = detail::field<int>(o, "edge", path);
            int cid = detail::field<int>(o, "from_crossing", path);
            int s = detail::field<int>(o, "from_slot", path);
            if (!eid.count(e)) throw validation_error(path + ": unknown edge " + std::to_string(e));
            if (!xid.count(cid)) throw validation_error(path + ": unknown crossing " + std::to_string(cid));
            if (s < 0 || s > 3) throw validation_error(path + ": slot out of range");
            dart t{xid[cid], s};
            int de = eid[e];
            if (d.edge_at(t) != de) throw validation_error(path + ": edge does not occupy that slot");
            if (d.tail[de].x >= 0) throw validation_error(path + ": edge oriented twice");
            d.tail[de] = t;
        }
        for (int e = 0; e < ne; ++e)
            if (d.tail[e].x < 0) throw validation_error("orientation missing for an edge");
    } else {
        d.tail = orientation_from_slots(d);
    }
    validate(d);
    return d;
}

inline nlohmann::json to_json(const diagram& d) {
    nlohmann::json j;
    j["free_loops"] = nlohmann::json::array();
    for (auto& f : d.free_loops) j["free_loops"].push_back({{"crosses_axis", f.crosses_axis}});
    std::vector<int> order(d.num_crossings());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d.crossings[a].id < d.crossings[b].id; });
    j["crossings"] = nlohmann::json::array();
    for (int x : order) {
        auto& c = d.crossings[x];
        nlohmann::json cj;
        cj["id"] = c.id;
        cj["edges"] = c.edges;
        cj["on_axis"] = c.on_axis;
        cj["axis_index"] = c.axis_index ? nlohmann::json(*c.axis_index) : nlohmann::json(nullptr);
        cj["mirror_partner"] =
            c.mirror_partner ? nlohmann::json(d.crossings[*c.mirror_partner].id) : nlohmann::json(nullptr);
        j["crossings"].push_back(cj);
    }
    j["orientation"] = nlohmann::json::array();
    for (int e = 0; e < d.num_edges(); ++e)
        j["orientation"].push_back(
            {{"edge", e}, {"from_crossing", d.crossings[d.tail[e].x].id}, {"from_slot", d.tail[e].s}});
    return j;
}

inline std::string serialize_sud(const diagram& d) { return to_json(d).dump(1) + "\n"; }

} // namespace symknot
