#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <map>
#include <optional>
#include <vector>

#include "diagram.hpp"
#include "errors.hpp"

namespace symknot {

// Orientation hint on a connection: `key` ranks hints, `forward` says the
// strand runs from end a to end b.
struct net_hint {
    int key = 0;
    bool forward = true;
};

struct net_port {
    int node = -1;
    int port = 0;
    friend auto operator<=>(const net_port&, const net_port&) = default;
};

// Builder for diagrams out of 4-valent crossings and 2-valent junctions.
// Junctions are contracted when the diagram is finalised; cycles made only of
// junctions become free loops.
//
// Crossing ports are counterclockwise with 0 and 2 on the under-strand; the
// final slot numbering is rotated so slot 0 is the incoming under-strand.
class net {
public:
    struct node {
        bool is_crossing = false;
        std::optional<int> id;
        bool on_axis = false;
        double axis_key = 0;
        int partner = -1;
        std::array<int, 4> conn{-1, -1, -1, -1};
    };
    struct connection {
        net_port a, b;
        std::optional<net_hint> hint;
        int axis_points = 0;
    };

    int add_crossing(std::optional<int> id = std::nullopt, bool on_axis = false, double axis_key = 0) {
        node n;
        n.is_crossing = true;
        n.id = id;
        n.on_axis = on_axis;
        n.axis_key = axis_key;
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }
    // an axis junction marks a point where the strand crosses the axis
    int add_junction(bool axis = false) {
        node n;
        n.on_axis = axis;
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }
    void add_free_loop(bool crosses_axis) { loops_.push_back({crosses_axis}); }

    void pair(int a, int b) {
        nodes_[a].partner = b;
        nodes_[b].partner = a;
    }

    void connect(net_port a, net_port b, std::optional<net_hint> h = std::nullopt, int axis_points = 0) {
        int c = static_cast<int>(conns_.size());
        for (auto p : {a, b}) {
            int& slot = nodes_.at(p.node).conn.at(p.port);
            if (slot >= 0) throw invalid_diagram("port connected twice");
            slot = c;
        }
        if (a == b) throw invalid_diagram("port connected to itself");
        conns_.push_back({a, b, h, axis_points});
    }

    const std::vector<node>& nodes() const { return nodes_; }
    node& at(int n) { return nodes_[n]; }

    // Node index of every crossing in the finalised diagram.
    diagram finalize(std::vector<int>* crossing_of_node = nullptr) const;

private:
    int valence(int n) const { return nodes_[n].is_crossing ? 4 : 2; }
    net_port through(net_port p) const {
        return nodes_[p.node].is_crossing ? net_port{p.node, (p.port + 2) % 4} : net_port{p.node, 1 - p.port};
    }
    net_port other_end(int c, net_port p) const { return conns_[c].a == p ? conns_[c].b : conns_[c].a; }

    std::vector<node> nodes_;
    std::vector<connection> conns_;
    std::vector<free_loop> loops_;
};

// Reverses the orientation of every edge of one link component and restores
// the slot convention.
inline void reverse_edges(diagram& d, const std::vector<int>& edges) {
    edge_table et(d);
    std::vector<dart> heads;
    for (int e : edges) heads.push_back(et.head(e));
    for (std::size_t i = 0; i < edges.size(); ++i) d.tail[edges[i]] = heads[i];
}

// Rotates crossings whose slot 0 is outgoing.
inline void normalize_slots(diagram& d) {
    for (int x = 0; x < d.num_crossings(); ++x) {
        auto& c = d.crossings[x];
        if (d.tail[c.edges[0]] != dart{x, 0}) continue;
        // a loop edge on slots 0 and 2 cannot occur in a planar diagram
        std::array<int, 4> ne;
        for (int s = 0; s < 4; ++s) ne[s] = c.edges[(s + 2) % 4];
        std::array<bool, 4> out;
        for (int s = 0; s < 4; ++s) out[s] = d.tail[c.edges[s]] == dart{x, s};
        c.edges = ne;
        for (int s = 0; s < 4; ++s)
            if (out[(s + 2) % 4]) d.tail[ne[s]] = dart{x, s};
    }
}

// Orients each mirror pair of link components (C, rho C) so that rho reverses
// the orientation, taking the component with the smaller hint as reference.
inline void orient_mirror_pairs(diagram& d, const std::vector<int>& edge_hint) {
    auto m = compute_mirror(d);
    if (!m) return;
    edge_table et(d);
    auto lc = components(d);
    int nc = lc.count - static_cast<int>(d.free_loops.size());
    std::vector<int> best(nc, INT_MAX), rep(nc, -1);
    std::vector<std::vector<int>> members(nc);
    for (int e = 0; e < d.num_edges(); ++e) {
        int c = lc.of_edge[e];
        members[c].push_back(e);
        if (rep[c] < 0) rep[c] = e;
        if (edge_hint[e] < best[c]) best[c] = edge_hint[e];
    }
    bool changed = false;
    for (int c = 0; c < nc; ++c) {
        int c2 = lc.of_edge[m->edge[rep[c]]];
        if (c2 == c) continue;
        // c follows c2 when c2 ranks first
        bool c2_first = std::pair(best[c2], rep[c2]) < std::pair(best[c], rep[c]);
        if (!c2_first) continue;
        int e = rep[c];
        int f = m->edge[e];
        // reversal: rho(tail e) must be the head of f
        if ((*m)(d.tail[e]) == et.head(f)) continue;
        reverse_edges(d, members[c]);
        changed = true;
    }
    if (changed) normalize_slots(d);
}

inline diagram net::finalize(std::vector<int>* crossing_of_node) const {
    int N = static_cast<int>(nodes_.size());
    for (int n = 0; n < N; ++n)
        for (int p = 0; p < valence(n); ++p)
            if (nodes_[n].conn[p] < 0) throw invalid_diagram("unconnected port");
    int C = static_cast<int>(conns_.size());
    // Walk strand cycles. A step is (connection, from-port).
    std::vector<bool> used(C, false);
    struct run {
        net_port from, to; // crossing ports, or junction ports for free loops
        int min_hint = INT_MAX;
    };
    std::vector<run> runs;
    std::vector<free_loop> loops = loops_;
    for (int c0 = 0; c0 < C; ++c0) {
        if (used[c0]) continue;
        // collect the cycle in traversal order starting from end a of c0
        std::vector<std::pair<int, net_port>> steps; // (connection, starting port)
        net_port p = conns_[c0].a;
        int c = c0;
        do {
            used[c] = true;
            steps.push_back({c, p});
            net_port q = other_end(c, p);
            p = through(q);
            c = nodes_[p.node].conn[p.port];
        } while (c != c0 || p != conns_[c0].a);
        // orientation: the smallest hint decides
        int hk = INT_MAX;
        bool flip = false;
        for (auto& [cc, from] : steps) {
            auto& h = conns_[cc].hint;
            if (!h || h->key >= hk) continue;
            hk = h->key;
            bool along = from == conns_[cc].a;
            flip = along != h->forward;
        }
        if (flip) {
            std::reverse(steps.begin(), steps.end());
            for (auto& [cc, from] : steps) from = other_end(cc, from);
        }
        bool any_crossing = false;
        for (auto& [cc, from] : steps)
            if (nodes_[from.node].is_crossing) any_crossing = true;
        if (!any_crossing) {
            int ax = 0;
            for (auto& [cc, from] : steps) ax += conns_[cc].axis_points + nodes_[from.node].on_axis;
            loops.push_back({ax > 0});
            continue;
        }
        // rotate so the walk starts leaving a crossing
        std::size_t st = 0;
        while (!nodes_[steps[st].second.node].is_crossing) ++st;
        std::rotate(steps.begin(), steps.begin() + st, steps.end());
        run cur;
        bool open = false;
        for (auto& [cc, from] : steps) {
            if (nodes_[from.node].is_crossing) {
                cur = run{};
                cur.from = from;
                open = true;
            }
            if (conns_[cc].hint) cur.min_hint = std::min(cur.min_hint, conns_[cc].hint->key);
            net_port to = other_end(cc, from);
            if (nodes_[to.node].is_crossing && open) {
                cur.to = to;
                runs.push_back(cur);
                open = false;
            }
        }
    }
    // crossings in node order
    std::vector<int> xi(N, -1);
    int nx = 0, max_id = -1;
    for (int n = 0; n < N; ++n)
        if (nodes_[n].is_crossing) {
            xi[n] = nx++;
            if (nodes_[n].id) max_id = std::max(max_id, *nodes_[n].id);
        }
    std::map<net_port, int> edge_at_port;
    std::map<net_port, bool> port_out;
    for (int e = 0; e < static_cast<int>(runs.size()); ++e) {
        edge_at_port[runs[e].from] = e;
        edge_at_port[runs[e].to] = e;
        port_out[runs[e].from] = true;
        port_out[runs[e].to] = false;
    }
    diagram d;
    d.free_loops = loops;
    d.crossings.resize(nx);
    d.tail.resize(runs.size());
    std::vector<int> rot(N, 0);
    int fresh = max_id + 1;
    std::vector<std::pair<double, int>> axis;
    for (int n = 0; n < N; ++n) {
        if (!nodes_[n].is_crossing) continue;
        auto& nd = nodes_[n];
        int r = port_out.at({n, 0}) ? 2 : 0;
        if (port_out.at({n, r}) || !port_out.at({n, (r + 2) % 4}))
            throw invalid_diagram("under-strand is not oriented through its crossing");
        rot[n] = r;
        crossing& c = d.crossings[xi[n]];
        c.id = nd.id ? *nd.id : fresh++;
        c.on_axis = nd.on_axis;
        if (nd.on_axis) axis.push_back({nd.axis_key, xi[n]});
        if (nd.partner >= 0) c.mirror_partner = xi[nd.partner];
        for (int s = 0; s < 4; ++s) {
            net_port pp{n, (s + r) % 4};
            int e = edge_at_port.at(pp);
            c.edges[s] = e;
            if (port_out.at(pp)) d.tail[e] = dart{xi[n], s};
        }
    }
    std::stable_sort(axis.begin(), axis.end());
    for (std::size_t i = 0; i < axis.size(); ++i) d.crossings[axis[i].second].axis_index = static_cast<int>(i);
    std::vector<int> hints(runs.size());
    for (std::size_t e = 0; e < runs.size(); ++e) hints[e] = runs[e].min_hint;
    orient_mirror_pairs(d, hints);
    if (crossing_of_node) {
        crossing_of_node->assign(N, -1);
        for (int n = 0; n < N; ++n) (*crossing_of_node)[n] = xi[n];
    }
    return d;
}

// Rebuilds a diagram with some crossings replaced. `gadget(builder, x)`
// returns the ports standing in for the four slots of crossing x, or nothing
// to keep x as it is. Every old edge keeps its number as orientation hint.
template <class Gadget>
diagram rebuild(const diagram& d, Gadget&& gadget, std::vector<int>* node_of = nullptr) {
    net b;
    int n = d.num_crossings();
    std::vector<std::array<net_port, 4>> ports(n);
    std::vector<int> kept(n, -1);
    for (int x = 0; x < n; ++x) {
        auto g = gadget(b, x);
        if (g) {
            ports[x] = *g;
            continue;
        }
        auto& c = d.crossings[x];
        int nd = b.add_crossing(c.id, c.on_axis, c.axis_index ? *c.axis_index : 0);
        kept[x] = nd;
        for (int s = 0; s < 4; ++s) ports[x][s] = {nd, s};
    }
    for (int x = 0; x < n; ++x) {
        auto& c = d.crossings[x];
        if (kept[x] >= 0 && c.mirror_partner && kept[*c.mirror_partner] >= 0 && x < *c.mirror_partner)
            b.pair(kept[x], kept[*c.mirror_partner]);
    }
    auto m = compute_mirror(d);
    edge_table et(d);
    for (int e = 0; e < d.num_edges(); ++e) {
        auto [u, v] = et.ends(e);
        bool fwd = d.tail[e] == u;
        b.connect(ports[u.x][u.s], ports[v.x][v.s], net_hint{e, fwd}, m && m->fixes_edge(e) ? 1 : 0);
    }
    for (auto& f : d.free_loops) b.add_free_loop(f.crosses_axis);
    if (node_of) *node_of = kept;
    return b.finalize();
}

} // namespace symknot
