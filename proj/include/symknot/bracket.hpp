#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <thread>
#include <vector>

#include "bilaurent.hpp"
#include "diagram.hpp"
#include "errors.hpp"

namespace symknot {

enum class bracket_method { state_sum, contraction };

struct bracket_options {
    bracket_method method = bracket_method::state_sum;
    std::uint64_t state_cap = std::uint64_t(1) << 26;
    unsigned threads = 0; // 0: hardware concurrency
};

// delta = -A^2 - A^-2
inline laurent1 bracket_delta() { return laurent1::monomial(-1, 2) + laurent1::monomial(-1, -2); }

namespace detail {

// exact division by delta; the caller guarantees divisibility
inline laurent1 divide_by_delta(laurent1 p) {
    laurent1 q;
    while (!p.is_zero()) {
        auto [k, c] = *p.terms().rbegin();
        // leading term of delta is -A^2
        laurent1 m = laurent1::monomial(-c, k - 2);
        q += m;
        p -= m * bracket_delta();
        if (!p.is_zero() && p.terms().rbegin()->first >= k) throw not_divisible("bracket normalisation");
    }
    return q;
}

inline laurent1 delta_power(int n) { return bracket_delta().pow(static_cast<unsigned>(n)); }

// sum over (#A, loops) counts
inline laurent1 collect_counts(const std::vector<std::vector<std::int64_t>>& table, int n, int free_loops) {
    laurent1 r;
    int maxl = 0;
    for (auto& row : table) maxl = std::max(maxl, static_cast<int>(row.size()));
    std::vector<laurent1> dp(maxl + free_loops + 1);
    for (int l = 0; l < static_cast<int>(dp.size()); ++l) dp[l] = delta_power(l);
    for (int a = 0; a <= n; ++a)
        for (int l = 0; l < static_cast<int>(table[a].size()); ++l) {
            if (!table[a][l]) continue;
            r += laurent1::monomial(table[a][l], a - (n - a)) * dp[l + free_loops - 1];
        }
    return r;
}

inline laurent1 bracket_state_sum(const diagram& d, const bracket_options& opt) {
    int n = d.num_crossings();
    if (n >= 63 || (std::uint64_t(1) << n) > opt.state_cap)
        throw state_space_too_large(std::to_string(n) + " crossings exceed the state cap");
    int E = d.num_edges();
    std::uint64_t total = std::uint64_t(1) << n;
    unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    // fixed chunking keeps the reduction order independent of the thread count
    const std::uint64_t chunks = std::min<std::uint64_t>(total, 256);
    std::vector<std::vector<std::vector<std::int64_t>>> part(chunks,
                                                             std::vector<std::vector<std::int64_t>>(n + 1));
    auto run_chunk = [&](std::uint64_t c) {
        std::uint64_t lo = total * c / chunks, hi = total * (c + 1) / chunks;
        std::vector<int> par(E);
        auto find = [&](int a) {
            while (par[a] != a) a = par[a] = par[par[a]];
            return a;
        };
        auto& tab = part[c];
        for (std::uint64_t st = lo; st < hi; ++st) {
            for (int e = 0; e < E; ++e) par[e] = e;
            int loops = E, na = 0;
            for (int x = 0; x < n; ++x) {
                auto& ed = d.crossings[x].edges;
                bool a = (st >> x) & 1;
                na += a;
                int p1 = a ? 1 : 3, p2 = a ? 3 : 1;
                int u = find(ed[0]), v = find(ed[p1]);
                if (u != v) par[u] = v, --loops;
                u = find(ed[2]), v = find(ed[p2]);
                if (u != v) par[u] = v, --loops;
            }
            if (static_cast<int>(tab[na].size()) <= loops) tab[na].resize(loops + 1, 0);
            tab[na][loops]++;
        }
    };
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (unsigned t = 0; t < std::min<std::uint64_t>(nt, chunks); ++t)
        pool.emplace_back([&] {
            for (std::uint64_t c; (c = next++) < chunks;) run_chunk(c);
        });
    for (auto& th : pool) th.join();
    std::vector<std::vector<std::int64_t>> table(n + 1);
    for (auto& p : part)
        for (int a = 0; a <= n; ++a) {
            if (table[a].size() < p[a].size()) table[a].resize(p[a].size(), 0);
            for (std::size_t l = 0; l < p[a].size(); ++l) table[a][l] += p[a][l];
        }
    return collect_counts(table, n, static_cast<int>(d.free_loops.size()));
}

// Crossing-by-crossing contraction. The state is the pairing induced on the
// frontier edges by the smoothed part; closed loops are absorbed as delta.
inline laurent1 bracket_contraction(const diagram& d) {
    int n = d.num_crossings();
    edge_table et(d);
    std::vector<int> order;
    {
        std::vector<bool> done(n, false);
        std::vector<int> touch(n, 0);
        for (int step = 0; step < n; ++step) {
            int best = -1;
            for (int x = 0; x < n; ++x)
                if (!done[x] && (best < 0 || touch[x] > touch[best])) best = x;
            done[best] = true;
            order.push_back(best);
            for (int s = 0; s < 4; ++s) touch[et.across({best, s}).x]++;
        }
    }
    using state = std::vector<int>;
    std::vector<int> frontier; // edge ids
    std::map<state, laurent1> cur;
    cur[{}] = laurent1(1);
    std::vector<bool> processed(n, false);
    laurent1 delta = bracket_delta();
    for (int x : order) {
        auto& ed = d.crossings[x].edges;
        int F = static_cast<int>(frontier.size());
        // vertices: 0..F-1 frontier positions, F..F+3 slots of x
        std::array<int, 4> link{}; // per slot: frontier position, other slot (+F), or -1 for a new edge
        std::vector<bool> touched(F, false);
        std::vector<int> new_edges;
        std::array<int, 4> new_pos{-1, -1, -1, -1};
        for (int s = 0; s < 4; ++s) {
            int e = ed[s];
            auto it = std::find(frontier.begin(), frontier.end(), e);
            dart o = et.across({x, s});
            if (it != frontier.end()) {
                link[s] = static_cast<int>(it - frontier.begin());
                touched[link[s]] = true;
            } else if (o.x == x) {
                link[s] = F + o.s;
            } else {
                link[s] = -1;
                new_pos[s] = static_cast<int>(new_edges.size());
                new_edges.push_back(e);
            }
        }
        std::vector<int> keep;
        for (int i = 0; i < F; ++i)
            if (!touched[i]) keep.push_back(i);
        std::vector<int> next_frontier;
        for (int i : keep) next_frontier.push_back(frontier[i]);
        for (int e : new_edges) next_frontier.push_back(e);
        std::vector<int> old_to_new(F, -1);
        for (std::size_t i = 0; i < keep.size(); ++i) old_to_new[keep[i]] = static_cast<int>(i);
        int K = static_cast<int>(keep.size());

        std::map<state, laurent1> nxt;
        for (auto& [mate, val] : cur) {
            for (int smooth = 0; smooth < 2; ++smooth) {
                // A pairs (0,1),(2,3); B pairs (0,3),(1,2)
                std::array<int, 4> sp = smooth == 0 ? std::array<int, 4>{1, 0, 3, 2} : std::array<int, 4>{3, 2, 1, 0};
                state nm(K + new_edges.size(), -1);
                std::vector<bool> seen_pos(F, false), seen_slot(4, false);
                // walk from a terminal; returns the terminal reached
                auto walk_from_slot = [&](int s) {
                    // entering slot s from its edge side, leave through smoothing
                    for (;;) {
                        seen_slot[s] = true;
                        int t = sp[s];
                        seen_slot[t] = true;
                        int l = link[t];
                        if (l < 0) return std::pair<int, int>{1, new_pos[t]};
                        if (l >= F) {
                            s = l - F;
                            continue;
                        }
                        seen_pos[l] = true;
                        int m = mate[l];
                        seen_pos[m] = true;
                        if (!touched[m]) return std::pair<int, int>{0, m};
                        // m is touched: continue into the slot attached to it
                        int ns = -1;
                        for (int q = 0; q < 4; ++q)
                            if (link[q] == m) ns = q;
                        s = ns;
                    }
                };
                auto term_index = [&](std::pair<int, int> t) { return t.first ? K + t.second : old_to_new[t.second]; };
                // paths starting at kept frontier positions whose mate is touched
                for (int i : keep) {
                    int m = mate[i];
                    int a = old_to_new[i];
                    if (nm[a] >= 0) continue;
                    if (!touched[m]) {
                        nm[a] = old_to_new[m];
                        nm[old_to_new[m]] = a;
                        continue;
                    }
                    seen_pos[i] = seen_pos[m] = true;
                    int s = -1;
                    for (int q = 0; q < 4; ++q)
                        if (link[q] == m) s = q;
                    auto t = walk_from_slot(s);
                    int b = term_index(t);
                    nm[a] = b;
                    nm[b] = a;
                }
                // paths starting at new edges
                for (int s = 0; s < 4; ++s) {
                    if (link[s] != -1 || seen_slot[s]) continue;
                    auto t = walk_from_slot(s);
                    int a = K + new_pos[s];
                    int b = term_index(t);
                    nm[a] = b;
                    nm[b] = a;
                }
                // the remaining slots close into loops
                int loops = 0;
                for (int s = 0; s < 4; ++s) {
                    if (seen_slot[s]) continue;
                    int s0 = s;
                    int cur_s = s;
                    for (;;) {
                        seen_slot[cur_s] = true;
                        int t = sp[cur_s];
                        seen_slot[t] = true;
                        int l = link[t];
                        int ns;
                        if (l >= F) {
                            ns = l - F;
                        } else {
                            int m = mate[l];
                            ns = -1;
                            for (int q = 0; q < 4; ++q)
                                if (link[q] == m) ns = q;
                        }
                        if (ns == s0) break;
                        cur_s = ns;
                    }
                    ++loops;
                }
                laurent1 w = laurent1::monomial(1, smooth == 0 ? 1 : -1);
                if (loops) w *= delta.pow(loops);
                nxt[nm] += val * w;
            }
        }
        for (auto it = nxt.begin(); it != nxt.end();) {
            if (it->second.is_zero()) it = nxt.erase(it);
            else ++it;
        }
        cur = std::move(nxt);
        frontier = std::move(next_frontier);
        processed[x] = true;
    }
    laurent1 total = cur.count({}) ? cur[{}] : laurent1();
    int fl = static_cast<int>(d.free_loops.size());
    if (n == 0) return fl == 0 ? laurent1(1) : delta_power(fl - 1);
    if (fl) return total * delta_power(fl - 1);
    return divide_by_delta(total);
}

} // namespace detail

// Kauffman bracket in the variable A, normalised so one loop has value 1.
inline laurent1 kauffman_bracket(const diagram& d, const bracket_options& opt = {}) {
    if (d.num_crossings() == 0) {
        int fl = static_cast<int>(d.free_loops.size());
        return fl == 0 ? laurent1(1) : detail::delta_power(fl - 1);
    }
    if (opt.method == bracket_method::contraction) return detail::bracket_contraction(d);
    return detail::bracket_state_sum(d, opt);
}

// (-A^3)^k
inline laurent1 writhe_factor(int k) {
    return laurent1::monomial((k % 2 == 0) ? 1 : -1, 3 * k);
}

// A = t^{-1/4}: A^k becomes t^{-k/4}, k must be even.
inline bilaurent bracket_to_t(const laurent1& p) {
    bilaurent r;
    for (auto& [k, c] : p.terms()) {
        if (k % 2) throw error("bracket exponent not compatible with t^{1/2}");
        r.add_term({0, -k / 2}, c);
    }
    return r;
}

inline bilaurent jones_from_bracket(const laurent1& br, int writhe_total) {
    return bracket_to_t(writhe_factor(-writhe_total) * br);
}

// Jones polynomial in t^{1/2}, as a bilaurent with zero s-exponents.
inline bilaurent jones(const diagram& d, const bracket_options& opt = {}) {
    return jones_from_bracket(kauffman_bracket(d, opt), writhe(d).total());
}

} // namespace symknot
