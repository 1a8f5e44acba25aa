#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "errors.hpp"
#include "net.hpp"
#include "sketch.hpp"

namespace symknot {

// ---------------------------------------------------------------------------
// Host graph: the diagram as a plane graph with a node at every crossing, at
// every point where an edge meets the axis, and on every free loop. Slots are
// node * 4 + port; a slot doubles as the face corner between its port and
// the next one counterclockwise.

struct host_graph {
    enum kind_t : int { crossing = 0, junction = 1, loop = 3 };
    struct node {
        kind_t kind = crossing;
        int cross = -1;
        bool on_axis = false;
        int valence = 4;
    };
    struct segment {
        int a, b;     // slots
        int key;      // orientation hint
        bool forward; // the strand runs from a to b
    };
    std::vector<node> nodes;
    std::vector<int> nbr;    // per slot
    std::vector<int> seg_of; // per slot
    std::vector<segment> segs;
    bool symmetric = false;
    std::vector<int> rho_node;
    std::vector<std::array<int, 4>> rho_port;
    std::vector<int> face_of;
    std::vector<std::vector<int>> faces;
    std::vector<int> pos;
    std::vector<int> rho_face;
    std::vector<std::vector<int>> fixed; // per face: positions of axis points

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int val(int slot) const { return nodes[slot / 4].valence; }
    int next(int slot) const {
        int t = nbr[slot];
        int v = val(t);
        return (t / 4) * 4 + (t % 4 + v - 1) % v;
    }
    int rho_slot(int slot) const { return rho_node[slot / 4] * 4 + rho_port[slot / 4][slot % 4]; }
    // corner image under the mirror: (n, c) -> (rho n, rho(c + 1))
    int rho_corner(int slot) const {
        int n = slot / 4, v = val(slot);
        return rho_node[n] * 4 + rho_port[n][(slot % 4 + 1) % v];
    }
};

inline host_graph make_host_graph(const diagram& d) {
    host_graph g;
    int nx = d.num_crossings();
    edge_table et(d);
    auto m = compute_mirror(d);
    for (int x = 0; x < nx; ++x) g.nodes.push_back({host_graph::crossing, x, d.crossings[x].on_axis, 4});
    auto add_node = [&](host_graph::kind_t k, bool axis) {
        g.nodes.push_back({k, -1, axis, 2});
        return g.num_nodes() - 1;
    };
    // slot a, slot b, key, strand runs a -> b; a is the lower slot so that
    // the graph does not depend on the orientation
    std::vector<std::array<int, 4>> links;
    for (int e = 0; e < d.num_edges(); ++e) {
        dart t = d.tail[e], h = et.head(e);
        int a = t.x * 4 + t.s, b = h.x * 4 + h.s, fw = 1;
        if (b < a) std::swap(a, b), fw = 0;
        if (m && m->fixes_edge(e)) {
            int j = add_node(host_graph::junction, true);
            links.push_back({a, j * 4 + 0, e, fw});
            links.push_back({j * 4 + 1, b, e, fw});
        } else {
            links.push_back({a, b, e, fw});
        }
    }
    int key = d.num_edges();
    for (auto& fl : d.free_loops) {
        if (fl.crosses_axis) {
            int j1 = add_node(host_graph::junction, true), j2 = add_node(host_graph::junction, true);
            links.push_back({j1 * 4 + 1, j2 * 4 + 0, key, 1});
            links.push_back({j2 * 4 + 1, j1 * 4 + 0, key, 1});
        } else {
            int l = add_node(host_graph::loop, false);
            links.push_back({l * 4 + 1, l * 4 + 0, key, 1});
        }
        ++key;
    }
    int S = g.num_nodes() * 4;
    g.nbr.assign(S, -1);
    g.seg_of.assign(S, -1);
    for (auto& [a, b, k, fw] : links) {
        g.nbr[a] = b;
        g.nbr[b] = a;
        g.seg_of[a] = g.seg_of[b] = static_cast<int>(g.segs.size());
        g.segs.push_back({a, b, k, fw != 0});
    }
    // mirror
    if (m) {
        g.symmetric = true;
        g.rho_node.assign(g.num_nodes(), -1);
        g.rho_port.assign(g.num_nodes(), {-1, -1, -1, -1});
        for (int x = 0; x < nx; ++x) {
            g.rho_node[x] = m->cross[x];
            for (int s = 0; s < 4; ++s) g.rho_port[x][s] = detail::mod4(m->k[x] - s);
        }
        for (int n = nx; n < g.num_nodes(); ++n) {
            if (g.nodes[n].kind != host_graph::junction) continue;
            g.rho_node[n] = n;
            g.rho_port[n] = {1, 0, -1, -1};
        }
        for (int n = nx; n < g.num_nodes(); ++n)
            if (g.nodes[n].kind == host_graph::loop) g.symmetric = false;
    }
    // faces
    g.face_of.assign(S, -1);
    g.pos.assign(S, -1);
    for (int n = 0; n < g.num_nodes(); ++n)
        for (int p = 0; p < g.nodes[n].valence; ++p) {
            int s0 = n * 4 + p;
            if (g.face_of[s0] >= 0) continue;
            int f = static_cast<int>(g.faces.size());
            g.faces.emplace_back();
            for (int s = s0; g.face_of[s] < 0; s = g.next(s)) {
                g.face_of[s] = f;
                g.pos[s] = static_cast<int>(g.faces[f].size());
                g.faces[f].push_back(s);
            }
        }
    g.fixed.assign(g.faces.size(), {});
    if (g.symmetric) {
        g.rho_face.assign(g.faces.size(), -1);
        for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
            g.rho_face[f] = g.face_of[g.rho_corner(g.faces[f][0])];
            for (int s : g.faces[f])
                if (g.rho_corner(s) == s) g.fixed[f].push_back(g.pos[s]);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Patterns: a tangle with its regions precomputed.

struct pattern {
    tangle t;
    std::optional<tangle_mirror> rho;
    std::vector<int> comp; // component of each node (node-to-node links)
    int ncomp = 0;
    struct region {
        std::vector<std::vector<int>> runs; // darts (slots) between visits to the frame
        bool internal = false;
    };
    std::vector<region> regions;
    std::vector<int> region_of; // per slot

    int val(int slot) const { return t.nodes[slot / 4].valence(); }
    bool is_marker(int node) const { return t.nodes[node].kind == tangle_node::marker; }
};

inline pattern make_pattern(tangle t, bool symmetric) {
    pattern p;
    p.t = std::move(t);
    if (symmetric) {
        p.rho = mirror_of(p.t);
        if (!p.rho) throw invalid_diagram("symmetric template drawing is not mirror symmetric");
    }
    int n = p.t.num_nodes();
    detail::dsu u(n);
    for (int a = 0; a < n; ++a)
        for (int q = 0; q < p.t.nodes[a].valence(); ++q) {
            int l = p.t.nodes[a].link[q];
            if (l >= 0) u.unite(a, l / 4);
        }
    std::map<int, int> cid;
    p.comp.resize(n);
    for (int a = 0; a < n; ++a) {
        int r = u.find(a);
        if (!cid.count(r)) cid[r] = static_cast<int>(cid.size());
        p.comp[a] = cid[r];
    }
    p.ncomp = static_cast<int>(cid.size());
    int k = static_cast<int>(p.t.boundary.size());
    // walk: returns next dart and whether the frame was visited
    auto step = [&](int s) -> std::pair<int, bool> {
        int l = p.t.nodes[s / 4].link[s % 4];
        bool fr = false;
        if (l < 0) {
            int b = -l - 1;
            l = p.t.boundary[(b + 1) % k];
            fr = true;
            if (l < 0) throw invalid_diagram("template with an arc between frame points");
        }
        int v = p.val(l);
        return {(l / 4) * 4 + (l % 4 + v - 1) % v, fr};
    };
    p.region_of.assign(n * 4, -1);
    for (int a = 0; a < n; ++a)
        for (int q = 0; q < p.t.nodes[a].valence(); ++q) {
            int s0 = a * 4 + q;
            if (p.region_of[s0] >= 0) continue;
            std::vector<std::pair<int, bool>> walk; // dart, frame visited after it
            int s = s0;
            do {
                auto [nx, fr] = step(s);
                walk.push_back({s, fr});
                s = nx;
            } while (s != s0);
            pattern::region r;
            int rid = static_cast<int>(p.regions.size());
            auto first_fr = std::find_if(walk.begin(), walk.end(), [](auto& w) { return w.second; });
            r.internal = first_fr == walk.end();
            if (r.internal) {
                r.runs.emplace_back();
                for (auto& w : walk) r.runs.back().push_back(w.first);
            } else {
                std::rotate(walk.begin(), first_fr + 1, walk.end());
                std::vector<int> cur;
                for (auto& w : walk) {
                    cur.push_back(w.first);
                    if (w.second) {
                        r.runs.push_back(cur);
                        cur.clear();
                    }
                }
            }
            for (auto& w : walk) p.region_of[w.first] = rid;
            p.regions.push_back(std::move(r));
        }
    return p;
}

// ---------------------------------------------------------------------------
// Embeddings of a pattern into a host graph.

struct embedding {
    std::vector<int> g; // node -> host node, or host segment for markers
    std::vector<int> r; // rotation, or marker direction (0: port 0 faces segment end a)
    std::map<int, std::vector<int>> on_seg; // host segment -> markers from end a to end b

    std::string key() const {
        std::string s;
        for (std::size_t i = 0; i < g.size(); ++i) s += std::to_string(g[i]) + "." + std::to_string(r[i]) + ",";
        for (auto& [sg, ms] : on_seg) {
            s += "|" + std::to_string(sg) + ":";
            for (int m : ms) s += std::to_string(m) + ".";
        }
        return s;
    }
};

class matcher {
public:
    enum class mode { symmetric, off_axis };

    matcher(const pattern& p, const host_graph& g, mode md) : p_(p), g_(g), mode_(md) {}

    int img(const embedding& e, int slot) const {
        int t = slot / 4, q = slot % 4;
        if (p_.is_marker(t)) {
            auto& S = g_.segs[e.g[t]];
            bool to_a = (e.r[t] == 0) == (q == 0);
            // leaving toward end a is the host dart at end b
            return to_a ? S.b : S.a;
        }
        return e.g[t] * 4 + (q + e.r[t]) % p_.val(slot);
    }

    // host slot at the segment end that marker port q faces
    int marker_end(const embedding& e, int t, int q) const {
        auto& S = g_.segs[e.g[t]];
        return (e.r[t] == 0) == (q == 0) ? S.a : S.b;
    }

    std::vector<embedding> find_all() const {
        std::vector<embedding> out;
        if (p_.t.num_nodes() == 0) return out;
        embedding e;
        e.g.assign(p_.t.num_nodes(), -1);
        e.r.assign(p_.t.num_nodes(), 0);
        std::vector<bool> done(p_.ncomp, false);
        std::set<std::string> seen;
        search(e, done, out, seen);
        return out;
    }

    bool verify(const embedding& e) const {
        int n = p_.t.num_nodes();
        std::set<int> used;
        for (int t = 0; t < n; ++t) {
            if (e.g[t] < 0) return false;
            if (p_.is_marker(t)) continue;
            if (!used.insert(e.g[t]).second) return false;
            if (!kind_ok(t, e.g[t])) return false;
            // internal links
            for (int q = 0; q < p_.t.nodes[t].valence(); ++q) {
                int l = p_.t.nodes[t].link[q];
                if (l >= 0 && !p_.is_marker(l / 4) && g_.nbr[img(e, t * 4 + q)] != img(e, l)) return false;
            }
        }
        for (auto& [sg, ms] : e.on_seg)
            for (int m : ms)
                if (e.g[m] != sg) return false;
        // regions
        std::vector<int> face(p_.regions.size(), -1);
        for (std::size_t ri = 0; ri < p_.regions.size(); ++ri) {
            auto& R = p_.regions[ri];
            if (R.internal) {
                int s0 = img(e, R.runs[0][0]);
                int f = g_.face_of[s0];
                if (g_.faces[f].size() != R.runs[0].size()) return false;
                face[ri] = f;
                continue;
            }
            if (R.runs.size() < 2) continue;
            int f = g_.face_of[img(e, R.runs[0][0])];
            std::vector<long long> keys;
            for (auto& run : R.runs)
                for (int s : run) {
                    int hs = img(e, s);
                    if (g_.face_of[hs] != f) return false;
                    keys.push_back(cyc_key(e, s, hs));
                }
            int desc = 0;
            for (std::size_t i = 0; i < keys.size(); ++i) {
                long long a = keys[i], b = keys[(i + 1) % keys.size()];
                if (a == b) return false;
                if (b < a) ++desc;
            }
            if (desc != 1) return false;
            face[ri] = f;
        }
        // chords in one face must not interleave
        for (std::size_t r1 = 0; r1 < p_.regions.size(); ++r1)
            for (std::size_t r2 = r1 + 1; r2 < p_.regions.size(); ++r2) {
                if (face[r1] < 0 || face[r1] != face[r2] || p_.regions[r1].internal) continue;
                std::vector<std::pair<long long, int>> ks;
                for (int which : {0, 1}) {
                    auto& R = p_.regions[which ? r2 : r1];
                    for (auto& run : R.runs)
                        for (int s : run) ks.push_back({cyc_key(e, s, img(e, s)), which});
                }
                std::sort(ks.begin(), ks.end());
                int changes = 0;
                for (std::size_t i = 0; i < ks.size(); ++i)
                    if (ks[i].second != ks[(i + 1) % ks.size()].second) ++changes;
                if (changes > 2) return false;
            }
        if (mode_ == mode::symmetric) return verify_symmetric(e, face);
        return verify_off_axis(e, face);
    }

private:
    bool kind_ok(int t, int h) const {
        auto& tn = p_.t.nodes[t];
        auto& hn = g_.nodes[h];
        if (tn.kind == tangle_node::crossing) return hn.kind == host_graph::crossing && hn.on_axis == tn.on_axis;
        if (tn.kind == tangle_node::junction) return hn.kind == host_graph::junction;
        return false;
    }

    // cyclic position of a pattern dart inside its host face
    long long cyc_key(const embedding& e, int s, int hs) const {
        long long k = static_cast<long long>(g_.pos[hs]) * 64;
        int t = s / 4;
        if (!p_.is_marker(t)) return k;
        auto& ms = e.on_seg.at(e.g[t]);
        int i = static_cast<int>(std::find(ms.begin(), ms.end(), t) - ms.begin());
        int L = static_cast<int>(ms.size());
        auto& S = g_.segs[e.g[t]];
        return k + 1 + (hs == S.a ? i : L - 1 - i);
    }

    bool verify_symmetric(const embedding& e, const std::vector<int>& face) const {
        if (!g_.symmetric || !p_.rho) return false;
        auto& rho = *p_.rho;
        for (int t = 0; t < p_.t.num_nodes(); ++t) {
            int t2 = rho.node[t];
            if (p_.is_marker(t)) {
                for (int q = 0; q < 2; ++q)
                    if (marker_end(e, t2, rho.port[t][q]) != g_.rho_slot(marker_end(e, t, q))) return false;
                // order along the segment must mirror
                auto& ms = e.on_seg.at(e.g[t]);
                auto& ms2 = e.on_seg.at(e.g[t2]);
                int i = static_cast<int>(std::find(ms.begin(), ms.end(), t) - ms.begin());
                int i2 = static_cast<int>(std::find(ms2.begin(), ms2.end(), t2) - ms2.begin());
                bool same_dir = g_.rho_slot(g_.segs[e.g[t]].a) == g_.segs[e.g[t2]].a;
                if (ms.size() != ms2.size() || i2 != (same_dir ? i : static_cast<int>(ms.size()) - 1 - i)) return false;
                continue;
            }
            if (e.g[t2] != g_.rho_node[e.g[t]]) return false;
            for (int q = 0; q < p_.t.nodes[t].valence(); ++q)
                if (img(e, t2 * 4 + rho.port[t][q]) != g_.rho_slot(img(e, t * 4 + q))) return false;
        }
        for (std::size_t ri = 0; ri < p_.regions.size(); ++ri) {
            if (face[ri] < 0) continue;
            auto& R = p_.regions[ri];
            int s = R.runs[0][0];
            int t = s / 4;
            int v = p_.val(s);
            int sc = rho.node[t] * 4 + rho.port[t][(s % 4 + 1) % v];
            int r2 = p_.region_of[sc];
            if (face[r2] != g_.rho_face[face[ri]]) return false;
        }
        return true;
    }

    bool verify_off_axis(const embedding& e, const std::vector<int>& face) const {
        if (!g_.symmetric) return false;
        std::set<int> nodes, segs;
        for (int t = 0; t < p_.t.num_nodes(); ++t) {
            if (p_.is_marker(t)) segs.insert(e.g[t]);
            else nodes.insert(e.g[t]);
        }
        for (int h : nodes) {
            if (g_.nodes[h].on_axis) return false;
            if (nodes.count(g_.rho_node[h])) return false;
        }
        for (int sg : segs)
            if (segs.count(g_.seg_of[g_.rho_slot(g_.segs[sg].a)])) return false;
        for (std::size_t ri = 0; ri < p_.regions.size(); ++ri) {
            int f = face[ri];
            if (f < 0 || p_.regions[ri].internal) continue;
            if (g_.rho_face[f] == f) {
                auto& fx = g_.fixed[f];
                if (fx.size() != 2) return false;
                long long lo = std::min(fx[0], fx[1]) * 64LL, hi = std::max(fx[0], fx[1]) * 64LL;
                int inside = 0, total = 0;
                for (auto& run : p_.regions[ri].runs)
                    for (int s : run) {
                        long long k = cyc_key(e, s, img(e, s));
                        ++total;
                        if (k >= lo && k < hi) ++inside;
                    }
                if (inside != 0 && inside != total) return false;
            }
        }
        return true;
    }

    bool assign(embedding& e, int t, int h, int rot) const {
        if (e.g[t] >= 0) return e.g[t] == h && e.r[t] == rot;
        if (!kind_ok(t, h)) return false;
        if (p_.t.nodes[t].kind == tangle_node::crossing && rot % 2) return false;
        e.g[t] = h;
        e.r[t] = rot;
        return true;
    }

    bool propagate(embedding& e, int t0) const {
        std::vector<int> stack{t0};
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int q = 0; q < p_.t.nodes[t].valence(); ++q) {
                int l = p_.t.nodes[t].link[q];
                if (l < 0 || p_.is_marker(l / 4)) continue;
                int hs = g_.nbr[img(e, t * 4 + q)];
                int t2 = l / 4, q2 = l % 4;
                int v = p_.t.nodes[t2].valence();
                if (g_.nodes[hs / 4].valence != v) return false;
                int rot = ((hs % 4 - q2) % v + v) % v;
                bool fresh = e.g[t2] < 0;
                if (!assign(e, t2, hs / 4, rot)) return false;
                if (fresh) stack.push_back(t2);
            }
        }
        return true;
    }

    // maps pattern dart s of an unplaced component onto host dart hs
    void anchor(const embedding& e, int s, int hs, std::vector<embedding>& out) const {
        int t = s / 4, q = s % 4;
        if (p_.is_marker(t)) {
            int sg = g_.seg_of[hs];
            auto& S = g_.segs[sg];
            // img(t, q) = hs
            bool to_a = hs == S.b;
            int dir = (to_a == (q == 0)) ? 0 : 1;
            auto base = e.on_seg.count(sg) ? e.on_seg.at(sg) : std::vector<int>{};
            for (std::size_t i = 0; i <= base.size(); ++i) {
                embedding x = e;
                x.g[t] = sg;
                x.r[t] = dir;
                auto v = base;
                v.insert(v.begin() + static_cast<long>(i), t);
                x.on_seg[sg] = v;
                out.push_back(std::move(x));
            }
            return;
        }
        int h = hs / 4;
        int v = p_.t.nodes[t].valence();
        if (g_.nodes[h].valence != v) return;
        int rot = ((hs % 4 - q) % v + v) % v;
        embedding x = e;
        if (!assign(x, t, h, rot)) return;
        if (!propagate(x, t)) return;
        out.push_back(std::move(x));
    }

    void search(embedding& e, std::vector<bool>& done, std::vector<embedding>& out, std::set<std::string>& seen) const {
        int nc = p_.ncomp;
        int pending = -1;
        for (int c = 0; c < nc; ++c)
            if (!done[c]) pending = c;
        if (pending < 0) {
            if (verify(e)) {
                auto k = e.key();
                if (seen.insert(k).second) out.push_back(e);
            }
            return;
        }
        std::vector<embedding> next;
        int cc = -1;
        bool first = std::none_of(done.begin(), done.end(), [](bool b) { return b; });
        if (first) {
            // first component: every host dart
            int t0 = -1;
            for (int t = 0; t < p_.t.num_nodes(); ++t)
                if (p_.comp[t] == 0) {
                    t0 = t;
                    break;
                }
            cc = 0;
            for (int hs = 0; hs < g_.num_nodes() * 4; ++hs)
                if (hs % 4 < g_.val(hs)) anchor(e, t0 * 4, hs, next);
        } else {
            // a component sharing a region with a placed one, anchored along that face
            for (auto& R : p_.regions) {
                if (R.runs.size() < 2) continue;
                int placed = -1, fresh = -1;
                for (auto& run : R.runs) {
                    int c = p_.comp[run[0] / 4];
                    if (done[c] && placed < 0) placed = run[0];
                    if (!done[c] && fresh < 0) fresh = run[0];
                }
                if (placed < 0 || fresh < 0) continue;
                cc = p_.comp[fresh / 4];
                int f = g_.face_of[img(e, placed)];
                for (int hs : g_.faces[f]) anchor(e, fresh, hs, next);
                break;
            }
            if (cc < 0) return;
        }
        done[cc] = true;
        for (auto& x : next) search(x, done, out, seen);
        done[cc] = false;
    }

    const pattern& p_;
    const host_graph& g_;
    mode mode_;
};

// ---------------------------------------------------------------------------
// Rewriting.

struct placement {
    const pattern* lhs;
    const tangle* rhs;
    embedding emb;
};

// Ranks axis crossings by walking the axis through the faces. Every mirror
// invariant face meets the axis in one chord; each piece of the diagram is
// cut open at its largest invariant face. Direction and piece order follow
// the old ranks in `key` where given.
inline void renumber_axis(diagram& d, const std::vector<std::optional<double>>& key) {
    host_graph g = make_host_graph(d);
    if (!g.symmetric) return;
    int nf = static_cast<int>(g.faces.size());
    for (int f = 0; f < nf; ++f)
        if (g.rho_face[f] == f && g.fixed[f].size() != 2) return;
    // adjacency: axis node -> its fixed corners
    std::vector<bool> visited(g.num_nodes(), false);
    struct piece {
        std::vector<int> xs;
        double first;
    };
    std::vector<piece> pieces;
    auto fixed_corners = [&](int n) {
        std::vector<int> v;
        for (int p = 0; p < g.nodes[n].valence; ++p)
            if (g.rho_corner(n * 4 + p) == n * 4 + p) v.push_back(n * 4 + p);
        return v;
    };
    for (int n0 = 0; n0 < g.num_nodes(); ++n0) {
        if (visited[n0] || !g.nodes[n0].on_axis || g.nodes[n0].kind == host_graph::loop) continue;
        // walk the cycle: node, corner, face, other corner, node ...
        std::vector<int> nodes, faces_between;
        int n = n0;
        int c = fixed_corners(n0).at(0);
        while (true) {
            visited[n] = true;
            nodes.push_back(n);
            int f = g.face_of[c];
            faces_between.push_back(f);
            auto& fx = g.fixed[f];
            int other = g.faces[f][fx[0]] == c ? g.faces[f][fx[1]] : g.faces[f][fx[0]];
            int n2 = other / 4;
            if (n2 == n0) break;
            auto fc = fixed_corners(n2);
            if (fc.size() != 2) return;
            c = fc[0] == other ? fc[1] : fc[0];
            n = n2;
        }
        // faces_between[i] lies between nodes[i] and nodes[i+1]; cut at the largest
        std::size_t L = nodes.size(), cut = 0;
        for (std::size_t i = 0; i < L; ++i)
            if (g.faces[faces_between[i]].size() > g.faces[faces_between[cut]].size()) cut = i;
        std::vector<int> xs;
        for (std::size_t i = 1; i <= L; ++i) {
            int nn = nodes[(cut + i) % L];
            if (g.nodes[nn].kind == host_graph::crossing) xs.push_back(g.nodes[nn].cross);
        }
        if (xs.empty()) continue;
        long agree = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i + 1; j < xs.size(); ++j)
                if (key[xs[i]] && key[xs[j]]) agree += *key[xs[i]] < *key[xs[j]] ? 1 : -1;
        if (agree < 0) std::reverse(xs.begin(), xs.end());
        double first = 1e300;
        for (int x : xs)
            if (key[x]) first = std::min(first, *key[x]);
        pieces.push_back({xs, first});
    }
    std::stable_sort(pieces.begin(), pieces.end(), [](const piece& a, const piece& b) { return a.first < b.first; });
    int idx = 0;
    for (auto& p : pieces)
        for (int x : p.xs) d.crossings[x].axis_index = idx++;
}

// Replaces the images of the placements by their right-hand sides. rhs_pairs
// lists mirror partners among new crossings as (placement, node) pairs.
inline diagram rewrite(const diagram& d, const host_graph& g, const std::vector<placement>& pls,
                       const std::vector<std::array<int, 4>>& rhs_pairs) {
    net b;
    int N = g.num_nodes();
    // host slot -> (placement, pattern slot) for image nodes
    std::vector<std::pair<int, int>> owner(N * 4, {-1, -1});
    std::vector<bool> removed(N, false);
    for (int pi = 0; pi < static_cast<int>(pls.size()); ++pi) {
        auto& pl = pls[pi];
        matcher mt(*pl.lhs, g, matcher::mode::symmetric);
        for (int t = 0; t < pl.lhs->t.num_nodes(); ++t) {
            if (pl.lhs->is_marker(t)) continue;
            if (removed[pl.emb.g[t]]) throw site_mismatch("placements overlap");
            removed[pl.emb.g[t]] = true;
            for (int q = 0; q < pl.lhs->t.nodes[t].valence(); ++q) owner[mt.img(pl.emb, t * 4 + q)] = {pi, t * 4 + q};
        }
    }
    std::vector<int> id(N, -1);
    std::vector<std::optional<double>> key_of_node; // per net node
    for (int n = 0; n < N; ++n) {
        if (removed[n]) continue;
        auto& hn = g.nodes[n];
        if (hn.kind == host_graph::crossing) {
            auto& c = d.crossings[hn.cross];
            id[n] = b.add_crossing(c.id, c.on_axis, c.axis_index ? *c.axis_index : 0);
        } else {
            id[n] = b.add_junction(hn.on_axis);
        }
    }
    for (int n = 0; n < N; ++n) {
        auto& hn = g.nodes[n];
        if (removed[n] || hn.kind != host_graph::crossing) continue;
        auto& c = d.crossings[hn.cross];
        if (c.mirror_partner && *c.mirror_partner > hn.cross && !removed[*c.mirror_partner])
            b.pair(id[n], id[*c.mirror_partner]);
    }
    // right-hand sides, with a plain junction at each frame point
    std::vector<std::vector<int>> rid(pls.size()), bj(pls.size());
    for (std::size_t pi = 0; pi < pls.size(); ++pi) {
        auto& R = *pls[pi].rhs;
        for (auto& nd : R.nodes) {
            if (nd.kind == tangle_node::crossing) rid[pi].push_back(b.add_crossing(std::nullopt, nd.on_axis, 0));
            else rid[pi].push_back(b.add_junction(nd.kind == tangle_node::junction));
        }
        for (std::size_t k = 0; k < R.boundary.size(); ++k) bj[pi].push_back(b.add_junction(false));
        for (int a = 0; a < R.num_nodes(); ++a)
            for (int q = 0; q < R.nodes[a].valence(); ++q) {
                int l = R.nodes[a].link[q];
                if (l < 0) b.connect({bj[pi][-l - 1], 1}, {rid[pi][a], q});
                else if (a * 4 + q < l) b.connect({rid[pi][a], q}, {rid[pi][l / 4], l % 4});
            }
    }
    for (auto& pr : rhs_pairs) b.pair(rid[pr[0]][pr[1]], rid[pr[2]][pr[3]]);
    // host segments
    auto end_port = [&](int slot) -> std::optional<net_port> {
        int n = slot / 4;
        if (!removed[n]) return net_port{id[n], slot % 4};
        auto [pi, ps] = owner[slot];
        int l = pls[pi].lhs->t.nodes[ps / 4].link[ps % 4];
        if (l >= 0) return std::nullopt; // inside the image
        return net_port{bj[pi][-l - 1], 0};
    };
    std::map<int, std::pair<int, const std::vector<int>*>> markers; // segment -> placement, order
    for (int pi = 0; pi < static_cast<int>(pls.size()); ++pi)
        for (auto& [sg, ms] : pls[pi].emb.on_seg) {
            if (markers.count(sg)) throw site_mismatch("placements overlap");
            markers[sg] = {pi, &ms};
        }
    for (int si = 0; si < static_cast<int>(g.segs.size()); ++si) {
        auto& S = g.segs[si];
        auto ea = end_port(S.a), eb = end_port(S.b);
        if (!ea || !eb) {
            if (markers.count(si)) throw site_mismatch("marker inside the image");
            continue;
        }
        net_hint h{S.key, S.forward};
        net_port cur = *ea;
        if (auto it = markers.find(si); it != markers.end()) {
            int pi = it->second.first;
            auto& pat = *pls[pi].lhs;
            for (int m : *it->second.second) {
                int toward_a = pls[pi].emb.r[m] == 0 ? 0 : 1;
                int la = pat.t.nodes[m].link[toward_a], lb = pat.t.nodes[m].link[1 - toward_a];
                b.connect(cur, {bj[pi][-la - 1], 0}, h);
                cur = {bj[pi][-lb - 1], 0};
            }
        }
        b.connect(cur, *eb, h);
    }
    std::vector<int> cx;
    diagram out = b.finalize(&cx);
    std::vector<std::optional<double>> key(out.num_crossings());
    for (int n = 0; n < N; ++n)
        if (id[n] >= 0 && g.nodes[n].kind == host_graph::crossing) {
            auto& c = d.crossings[g.nodes[n].cross];
            if (c.on_axis) key[cx[id[n]]] = *c.axis_index;
        }
    renumber_axis(out, key);
    return canonical_relabel(out);
}

} // namespace symknot
