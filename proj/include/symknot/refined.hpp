#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "bilaurent.hpp"
#include "bracket.hpp"
#include "diagram.hpp"
#include "ratfunc.hpp"
#include "twist.hpp"

namespace symknot {

struct axis_resolution_state {
    std::vector<int> choice; // per axis crossing in axis order: 0 horizontal, 1 vertical
    bilaurent coeff;         // in s^{1/2} only
    diagram resolved;
};

struct refined_options {
    bracket_options bracket{};
    int axis_cap = 24;
    unsigned threads = 0;
};

inline std::vector<int> axis_order(const diagram& d) {
    std::vector<int> xs;
    for (int x = 0; x < d.num_crossings(); ++x)
        if (d.crossings[x].on_axis) xs.push_back(x);
    std::sort(xs.begin(), xs.end(),
              [&](int a, int b) { return *d.crossings[a].axis_index < *d.crossings[b].axis_index; });
    return xs;
}

// Skein weights of an axis crossing: positive (-s^{-1/2}, -s^{-1}),
// negative (-s^{1/2}, -s).
inline bilaurent axis_weight(int sign, int choice) {
    int e = (choice == 0 ? 1 : 2) * (sign > 0 ? -1 : 1);
    return bilaurent::monomial(-1, e, 0);
}

inline axis_resolution_state resolve_axis_state(const diagram& d, const std::vector<int>& axes, std::uint64_t st) {
    axis_resolution_state r;
    r.coeff = bilaurent(1);
    std::map<int, int> pick;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        int c = (st >> i) & 1;
        r.choice.push_back(c);
        pick[axes[i]] = c;
        r.coeff = r.coeff * axis_weight(d.sign(axes[i]), c);
    }
    r.resolved = resolve_with(d, [&](int x) {
        auto it = pick.find(x);
        return it == pick.end() ? -1 : it->second;
    });
    return r;
}

inline std::vector<axis_resolution_state> resolve_axis(const diagram& d, int axis_cap = 24) {
    auto axes = axis_order(d);
    if (static_cast<int>(axes.size()) > axis_cap) throw state_space_too_large("too many axis crossings");
    std::vector<axis_resolution_state> out;
    for (std::uint64_t st = 0; st < (std::uint64_t(1) << axes.size()); ++st) out.push_back(resolve_axis_state(d, axes, st));
    return out;
}

// ((s^{1/2}+s^{-1/2}) / (t^{1/2}+t^{-1/2}))^{n-1} V(t)
inline ratfunc refined_base(const diagram& d, const bracket_options& opt = {}) {
    int n = components(d).count;
    bilaurent v = jones(d, opt);
    bilaurent sp = bilaurent::s_half(1) + bilaurent::s_half(-1);
    bilaurent tp = bilaurent::t_half(1) + bilaurent::t_half(-1);
    if (n == 0) return ratfunc(v);
    return ratfunc(sp.pow(n - 1) * v, tp.pow(n - 1));
}

// Sums P_n (s^{1/2}+s^{-1/2})^{n-1} / (t^{1/2}+t^{-1/2})^{n-1}, dividing out
// the denominator factor by factor.
inline ratfunc combine_by_components(const std::map<int, bilaurent>& by_n) {
    bilaurent sp = bilaurent::s_half(1) + bilaurent::s_half(-1);
    bilaurent tp = bilaurent::t_half(1) + bilaurent::t_half(-1);
    int top = 1;
    for (auto& [n, p] : by_n)
        if (!p.is_zero()) top = std::max(top, n);
    bilaurent num;
    for (auto& [n, p] : by_n) {
        if (p.is_zero()) continue;
        int k = std::max(n, 1);
        num += sp.pow(k - 1) * tp.pow(top - k) * p;
    }
    int den_pow = top - 1;
    while (den_pow > 0) {
        auto q = try_divide(num, tp);
        if (!q) break;
        num = *q;
        --den_pow;
    }
    if (den_pow == 0) return ratfunc(num);
    return ratfunc(num, tp.pow(den_pow));
}

// Refined Jones polynomial via the axis skein recursion.
inline ratfunc refined_W(const diagram& d, const refined_options& opt = {}) {
    auto axes = axis_order(d);
    if (static_cast<int>(axes.size()) > opt.axis_cap) throw state_space_too_large("too many axis crossings");
    std::uint64_t total = std::uint64_t(1) << axes.size();
    unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::uint64_t>(nt, total));
    bracket_options inner = opt.bracket;
    if (nt > 1) inner.threads = 1;
    std::vector<std::pair<int, bilaurent>> part(total);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        try {
            for (std::uint64_t st; (st = next++) < total;) {
                auto s = resolve_axis_state(d, axes, st);
                part[st] = {components(s.resolved).count, s.coeff * jones(s.resolved, inner)};
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(mu);
            if (!err) err = std::current_exception();
            next = total;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    std::map<int, bilaurent> by_n;
    for (auto& [n, p] : part) by_n[n] += p;
    return combine_by_components(by_n);
}

// ---------------------------------------------------------------------------
// Generic skein-map conditions: b+ b- = 1 and (a+ b- + a- b+) u2 + a+ a- u3 = 0.

struct skein_coefficients {
    ratfunc a_plus, a_minus, b_plus, b_minus, u2, u3;
};

struct skein_check {
    ratfunc residual_b;    // b+ b- - 1
    ratfunc residual_loop; // (a+ b- + a- b+) u2 + a+ a- u3
    bool pass() const { return residual_b.is_zero() && residual_loop.is_zero(); }
};

inline skein_check check_skein_conditions(const skein_coefficients& c) {
    skein_check r;
    r.residual_b = c.b_plus * c.b_minus - ratfunc(1);
    r.residual_loop = (c.a_plus * c.b_minus + c.a_minus * c.b_plus) * c.u2 + c.a_plus * c.a_minus * c.u3;
    return r;
}

// The coefficients realised by W.
inline skein_coefficients refined_skein_coefficients() {
    bilaurent sp = bilaurent::s_half(1) + bilaurent::s_half(-1);
    return {ratfunc(bilaurent::monomial(-1, -1, 0)), ratfunc(bilaurent::monomial(-1, 1, 0)),
            ratfunc(bilaurent::monomial(-1, -2, 0)), ratfunc(bilaurent::monomial(-1, 2, 0)),
            ratfunc(-sp), ratfunc(sp * sp)};
}

// Potts coefficients with xi written as s^{1/2}: a = -xi^{-+2}, b = -xi^{-+4},
// d = -xi^2 - xi^{-2}, u2 = d^2, u3 = d^3.
inline skein_coefficients potts_skein_coefficients() {
    auto xi = [](int k) { return bilaurent::monomial(1, k, 0); };
    bilaurent d = -xi(2) - xi(-2);
    return {ratfunc(-xi(-2)), ratfunc(-xi(2)), ratfunc(-xi(-4)), ratfunc(-xi(4)), ratfunc(d * d), ratfunc(d * d * d)};
}

} // namespace symknot
