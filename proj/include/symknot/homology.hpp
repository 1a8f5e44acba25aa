#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "bilaurent.hpp"
#include "errors.hpp"
#include "integer.hpp"
#include "matrix.hpp"

namespace symknot {

struct abelian_group {
    std::vector<integer> factors; // invariant factors > 1, each dividing the next
    int free_rank = 0;

    // 0 when infinite
    integer order() const {
        if (free_rank) return 0;
        integer r = 1;
        for (auto& f : factors) r *= f;
        return r;
    }
    std::string str() const {
        std::string s;
        for (auto& f : factors) s += (s.empty() ? "" : " ") + f.str();
        for (int i = 0; i < free_rank; ++i) s += (s.empty() ? "" : " ") + std::string("0");
        return s.empty() ? "1" : s;
    }
    friend bool operator==(const abelian_group&, const abelian_group&) = default;
};

inline abelian_group group_from_smith(const smith_result& s, std::size_t rows) {
    abelian_group g;
    for (auto& d : s.diagonal) {
        if (d == 0) ++g.free_rank;
        else if (d != 1) g.factors.push_back(d);
    }
    // rows without a diagonal slot are free generators
    if (rows > s.diagonal.size()) g.free_rank += static_cast<int>(rows - s.diagonal.size());
    return g;
}

inline void check_seifert(const int_matrix& v) {
    if (v.rows() != v.cols()) throw not_unimodular("Seifert matrix must be square");
    integer det = determinant(v.transpose() - v);
    if (abs(det) != 1) throw not_unimodular("|det(V^T - V)| = " + abs(det).str());
}

// Gamma = -V (V^T - V)^{-1}
inline int_matrix gamma(const int_matrix& v) {
    check_seifert(v);
    rat_matrix inv = inverse_exact(v.transpose() - v);
    rat_matrix g{-(v * inv.num), inv.den};
    g.reduce();
    if (!g.is_integral()) throw non_integral("Gamma has denominator " + g.den.str());
    return g.num;
}

// Gamma^k - (Gamma - I)^k presents H_1 of the k-fold cyclic branched cover.
inline int_matrix branched_presentation(const int_matrix& v, unsigned k) {
    if (k < 2) throw error("fold must be at least 2");
    int_matrix g = gamma(v);
    int_matrix id = int_matrix::identity(g.rows());
    return g.pow(k) - (g - id).pow(k);
}

inline abelian_group h1_branched_cover(const int_matrix& v, unsigned k) {
    int_matrix p = branched_presentation(v, k);
    return group_from_smith(smith_normal_form(p), p.rows());
}

// ---------------------------------------------------------------------------
// Integer polynomials, dense, lowest degree first.

using int_poly = std::vector<integer>;

namespace detail {

inline void trim(int_poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int_poly poly_mul(const int_poly& a, const int_poly& b) {
    if (a.empty() || b.empty()) return {};
    int_poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

inline int_poly poly_sub(int_poly a, const int_poly& b) {
    if (a.size() < b.size()) a.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}

// exact division in Z[t]
inline int_poly poly_div_exact(int_poly a, const int_poly& b) {
    if (b.empty()) throw not_divisible("division by zero polynomial");
    trim(a);
    if (a.empty()) return {};
    if (a.size() < b.size()) throw not_divisible("polynomial degree");
    int_poly q(a.size() - b.size() + 1);
    for (std::size_t i = q.size(); i-- > 0;) {
        const integer& top = a[i + b.size() - 1];
        if (top % b.back() != 0) throw not_divisible("polynomial coefficient");
        q[i] = top / b.back();
        for (std::size_t j = 0; j < b.size(); ++j) a[i + j] -= q[i] * b[j];
    }
    trim(a);
    if (!a.empty()) throw not_divisible("polynomial remainder");
    trim(q);
    return q;
}

// Bareiss over Z[t]
inline int_poly poly_det(std::vector<std::vector<int_poly>> m) {
    std::size_t n = m.size();
    if (n == 0) return {integer(1)};
    int sgn = 1;
    int_poly prev{integer(1)};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].empty()) {
            std::size_t r = k + 1;
            while (r < n && m[r][k].empty()) ++r;
            if (r == n) return {};
            std::swap(m[k], m[r]);
            sgn = -sgn;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = poly_div_exact(poly_sub(poly_mul(m[i][j], m[k][k]), poly_mul(m[i][k], m[k][j])), prev);
        prev = m[k][k];
    }
    int_poly r = m[n - 1][n - 1];
    if (sgn < 0)
        for (auto& c : r) c = -c;
    return r;
}

} // namespace detail

// det(tV - V^T), shifted to a symmetric Laurent polynomial with value 1 at t = 1.
inline laurent1 alexander_polynomial(const int_matrix& v) {
    check_seifert(v);
    std::size_t n = v.rows();
    std::vector<std::vector<int_poly>> m(n, std::vector<int_poly>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            int_poly p{-v(j, i), v(i, j)};
            detail::trim(p);
            m[i][j] = p;
        }
    int_poly p = detail::poly_det(m);
    std::size_t lo = 0;
    while (lo < p.size() && p[lo] == 0) ++lo;
    int_poly q(p.begin() + lo, p.end());
    integer at1 = 0;
    for (auto& c : q) at1 += c;
    int shift = -static_cast<int>((q.size() - 1) / 2);
    laurent1 r;
    for (std::size_t i = 0; i < q.size(); ++i) r.add_term(static_cast<int>(i) + shift, at1 < 0 ? integer(-q[i]) : q[i]);
    return r;
}

// Res(a, b) over Q by the Euclidean remainder sequence; inputs lowest degree first.
inline integer resultant(int_poly a, int_poly b) {
    using boost::multiprecision::cpp_rational;
    using qpoly = std::vector<cpp_rational>;
    detail::trim(a);
    detail::trim(b);
    if (a.empty() || b.empty()) return 0;
    qpoly A(a.begin(), a.end()), B(b.begin(), b.end());
    cpp_rational res = 1;
    auto deg = [](const qpoly& p) { return static_cast<long>(p.size()) - 1; };
    while (deg(B) > 0) {
        long da = deg(A), db = deg(B);
        // R = A mod B
        qpoly R = A;
        while (deg(R) >= db && !R.empty()) {
            cpp_rational f = R.back() / B.back();
            long sh = deg(R) - db;
            for (long j = 0; j <= db; ++j) R[sh + j] -= f * B[j];
            while (!R.empty() && R.back() == 0) R.pop_back();
        }
        if (R.empty()) return 0;
        // Res(A,B) = (-1)^{da db} lc(B)^{da - dr} Res(B, R)
        if ((da * db) % 2) res = -res;
        for (long i = 0; i < da - deg(R); ++i) res *= B.back();
        A = std::move(B);
        B = std::move(R);
    }
    // B is a nonzero constant: Res(A, c) = c^{deg A}
    for (long i = 0; i < deg(A); ++i) res *= B[0];
    if (boost::multiprecision::denominator(res) != 1) throw non_integral("resultant");
    return boost::multiprecision::numerator(res);
}

// |Res(Delta, 1 + t + ... + t^{k-1})|, the order of H_1 of the k-fold cover.
inline integer cover_order_by_resultant(const int_matrix& v, unsigned k) {
    laurent1 delta = alexander_polynomial(v);
    int lo = delta.terms().begin()->first;
    int_poly p(delta.terms().rbegin()->first - lo + 1);
    for (auto& [e, c] : delta.terms()) p[e - lo] = c;
    int_poly cyc(k, integer(1));
    return abs(resultant(p, cyc));
}

} // namespace symknot
