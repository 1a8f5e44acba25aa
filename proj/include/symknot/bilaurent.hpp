#pragma once

#include <algorithm>
#include <cctype>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"

namespace symknot {

// Laurent polynomial in s^{1/2}, t^{1/2} with integer coefficients.
// Exponents are stored in half-steps: key (a, b) means s^{a/2} t^{b/2}.
class bilaurent {
public:
    using exponent = std::pair<int, int>;
    using term_map = std::map<exponent, integer>;

    bilaurent() = default;
    bilaurent(long long c) { add_term({0, 0}, integer(c)); }
    bilaurent(const integer& c) { add_term({0, 0}, c); }

    static bilaurent monomial(const integer& c, int a, int b) {
        bilaurent p;
        p.add_term({a, b}, c);
        return p;
    }
    // s^{a/2}, t^{b/2}
    static bilaurent s_half(int a) { return monomial(1, a, 0); }
    static bilaurent t_half(int b) { return monomial(1, 0, b); }

    const term_map& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    bool is_monomial() const { return terms_.size() == 1; }
    bool is_unit() const {
        return terms_.size() == 1 && abs(terms_.begin()->second) == 1;
    }

    integer coeff(int a, int b) const {
        auto it = terms_.find({a, b});
        return it == terms_.end() ? integer(0) : it->second;
    }

    void add_term(exponent e, const integer& c) {
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    // lexicographic extremes on (s, t)
    exponent lead() const { return terms_.rbegin()->first; }
    exponent trail() const { return terms_.begin()->first; }
    const integer& lead_coeff() const { return terms_.rbegin()->second; }

    int min_s() const { return bound([](auto& e) { return e.first; }, true); }
    int max_s() const { return bound([](auto& e) { return e.first; }, false); }
    int min_t() const { return bound([](auto& e) { return e.second; }, true); }
    int max_t() const { return bound([](auto& e) { return e.second; }, false); }

    bilaurent operator-() const {
        bilaurent r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    bilaurent& operator+=(const bilaurent& o) {
        for (auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    bilaurent& operator-=(const bilaurent& o) {
        for (auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend bilaurent operator+(bilaurent a, const bilaurent& b) { return a += b; }
    friend bilaurent operator-(bilaurent a, const bilaurent& b) { return a -= b; }
    friend bilaurent operator*(const bilaurent& a, const bilaurent& b) {
        bilaurent r;
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_)
                r.add_term({ea.first + eb.first, ea.second + eb.second}, ca * cb);
        return r;
    }
    bilaurent& operator*=(const bilaurent& o) { return *this = *this * o; }
    friend bool operator==(const bilaurent& a, const bilaurent& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const bilaurent& a, const bilaurent& b) { return !(a == b); }
    friend bool operator<(const bilaurent& a, const bilaurent& b) { return a.terms_ < b.terms_; }

    bilaurent pow(unsigned k) const {
        bilaurent r(1), base = *this;
        while (k) {
            if (k & 1) r *= base;
            k >>= 1;
            if (k) base *= base;
        }
        return r;
    }

    // multiply every exponent pair by a monomial shift
    bilaurent shifted(int da, int db) const {
        bilaurent r;
        for (auto& [e, c] : terms_) r.terms_.emplace(exponent{e.first + da, e.second + db}, c);
        return r;
    }

    integer content() const {
        integer g = 0;
        for (auto& [e, c] : terms_) g = gcd(g, c);
        return g;
    }

    // substitute s^{1/2} -> x, t^{1/2} -> y
    std::complex<double> eval(std::complex<double> x, std::complex<double> y) const {
        std::complex<double> r = 0;
        for (auto& [e, c] : terms_)
            r += c.convert_to<double>() * std::pow(x, e.first) * std::pow(y, e.second);
        return r;
    }

    std::string str() const;
    static bilaurent parse(const std::string& text);

private:
    template <class F>
    int bound(F key, bool lo) const {
        int r = 0;
        bool first = true;
        for (auto& [e, c] : terms_) {
            int v = key(e);
            if (first || (lo ? v < r : v > r)) r = v;
            first = false;
        }
        return r;
    }

    term_map terms_;
};

namespace detail {

inline std::string half_str(int h) {
    if (h % 2 == 0) return std::to_string(h / 2);
    return std::to_string(h) + "/2";
}

inline void append_var(std::string& out, char v, int h) {
    if (h == 0) return;
    out += '*';
    out += v;
    if (h != 2) out += "^" + half_str(h);
}

} // namespace detail

inline std::string bilaurent::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto& [e, c] : terms_) {
        integer mag = c;
        if (!first) {
            out += c < 0 ? " - " : " + ";
            if (c < 0) mag = -c;
        }
        std::string term = mag.str();
        detail::append_var(term, 's', e.first);
        detail::append_var(term, 't', e.second);
        out += term;
        first = false;
    }
    return out;
}

// Accepts the output of str() plus bare variables ("t^2", "-s").
inline bilaurent bilaurent::parse(const std::string& text) {
    std::string src;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) src += ch;
    if (src.empty()) throw parse_error("empty polynomial");
    bilaurent out;
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw parse_error("polynomial '" + text + "' at offset " + std::to_string(i) + ": " + why);
    };
    auto read_int = [&]() {
        std::size_t j = i;
        if (j < src.size() && (src[j] == '-' || src[j] == '+')) ++j;
        std::size_t digits = j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j == digits) fail("expected integer");
        std::string tok = src.substr(i, j - i);
        i = j;
        return tok;
    };
    while (i < src.size()) {
        int sgn = 1;
        while (i < src.size() && (src[i] == '+' || src[i] == '-')) {
            if (src[i] == '-') sgn = -sgn;
            ++i;
        }
        integer c = 1;
        int a = 0, b = 0;
        bool have_factor = false;
        if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
            c = integer(read_int());
            have_factor = true;
        }
        while (i < src.size() && (src[i] == '*' || src[i] == 's' || src[i] == 't')) {
            if (src[i] == '*') {
                if (!have_factor) fail("dangling '*'");
                ++i;
            }
            if (i >= src.size() || (src[i] != 's' && src[i] != 't')) fail("expected variable");
            char v = src[i++];
            int h = 2;
            if (i < src.size() && src[i] == '^') {
                ++i;
                long num = std::stol(read_int());
                long den = 1;
                if (i < src.size() && src[i] == '/') {
                    ++i;
                    den = std::stol(read_int());
                }
                if (den == 1) h = static_cast<int>(2 * num);
                else if (den == 2) h = static_cast<int>(num);
                else fail("exponent denominator must be 1 or 2");
            }
            (v == 's' ? a : b) += h;
            have_factor = true;
        }
        if (!have_factor) fail("expected term");
        out.add_term({a, b}, sgn * c);
        if (i < src.size() && src[i] != '+' && src[i] != '-') fail("unexpected character");
    }
    return out;
}

// Exact division in the Laurent ring. Returns nullopt when b does not divide a.
inline std::optional<bilaurent> try_divide(const bilaurent& a, const bilaurent& b) {
    if (b.is_zero()) throw not_divisible("division by zero");
    if (a.is_zero()) return bilaurent();
    // any exact quotient has exponents confined to this box
    int lo_s = a.min_s() - b.min_s(), hi_s = a.max_s() - b.max_s();
    int lo_t = a.min_t() - b.min_t(), hi_t = a.max_t() - b.max_t();
    if (lo_s > hi_s || lo_t > hi_t) return std::nullopt;
    bilaurent q, r = a;
    auto [bs, bt] = b.lead();
    const integer& bc = b.lead_coeff();
    while (!r.is_zero()) {
        auto [rs, rt] = r.lead();
        int qs = rs - bs, qt = rt - bt;
        if (qs < lo_s || qs > hi_s || qt < lo_t || qt > hi_t) return std::nullopt;
        if (r.lead_coeff() % bc != 0) return std::nullopt;
        bilaurent m = bilaurent::monomial(r.lead_coeff() / bc, qs, qt);
        q += m;
        r -= m * b;
    }
    return q;
}

inline bilaurent divide_exact(const bilaurent& a, const bilaurent& b) {
    auto q = try_divide(a, b);
    if (!q) throw not_divisible();
    return *q;
}

namespace detail {

// Dense univariate polynomials over Z, index = degree, no trailing zeros.
using upoly = std::vector<integer>;

inline void up_trim(upoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline integer up_content(const upoly& p) {
    integer g = 0;
    for (auto& c : p) g = gcd(g, c);
    return g;
}

inline upoly up_mul(const upoly& a, const upoly& b) {
    if (a.empty() || b.empty()) return {};
    upoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    up_trim(r);
    return r;
}

inline upoly up_sub(upoly a, const upoly& b) {
    if (a.size() < b.size()) a.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    up_trim(a);
    return a;
}

inline upoly up_scale(upoly a, const integer& c) {
    for (auto& x : a) x *= c;
    up_trim(a);
    return a;
}

// exact division over Z; caller guarantees divisibility
inline upoly up_divexact(upoly a, const upoly& b) {
    if (a.empty()) return {};
    std::size_t db = b.size() - 1;
    if (a.size() < b.size()) throw not_divisible("univariate");
    upoly q(a.size() - db);
    for (std::size_t k = a.size(); k-- > db;) {
        if (a[k] == 0) continue;
        if (a[k] % b[db] != 0) throw not_divisible("univariate");
        integer c = a[k] / b[db];
        q[k - db] = c;
        for (std::size_t j = 0; j <= db; ++j) a[k - db + j] -= c * b[j];
    }
    up_trim(a);
    if (!a.empty()) throw not_divisible("univariate");
    up_trim(q);
    return q;
}

inline upoly up_pp(const upoly& p) {
    if (p.empty()) return p;
    integer c = up_content(p);
    if (p.back() < 0) c = -c;
    upoly r = p;
    for (auto& x : r) x /= c;
    return r;
}

inline upoly up_prem(upoly a, const upoly& b) {
    std::size_t db = b.size() - 1;
    while (!a.empty() && a.size() > db) {
        std::size_t k = a.size() - 1 - db;
        integer la = a.back();
        a = up_scale(a, b.back());
        upoly shifted(k, integer(0));
        shifted.insert(shifted.end(), b.begin(), b.end());
        a = up_sub(a, up_scale(shifted, la));
    }
    return a;
}

inline upoly up_gcd(upoly a, upoly b) {
    up_trim(a);
    up_trim(b);
    auto unit_normal = [](upoly p) { return !p.empty() && p.back() < 0 ? up_scale(p, -1) : p; };
    if (a.empty()) return unit_normal(b);
    if (b.empty()) return unit_normal(a);
    integer c = gcd(up_content(a), up_content(b));
    a = up_pp(a);
    b = up_pp(b);
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        upoly r = up_pp(up_prem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return up_scale(up_pp(a), c);
}

// Z[T][S]: index = S-degree, coefficients are upolys in T.
using bpoly = std::vector<upoly>;

inline void bp_trim(bpoly& p) {
    while (!p.empty() && p.back().empty()) p.pop_back();
}

inline upoly bp_content(const bpoly& p) {
    upoly g;
    for (auto& c : p) g = up_gcd(g, c);
    return g;
}

inline bpoly bp_divexact_coeff(bpoly p, const upoly& c) {
    for (auto& x : p) x = up_divexact(x, c);
    return p;
}

inline bpoly bp_pp(const bpoly& p) {
    if (p.empty()) return p;
    upoly c = bp_content(p);
    if (p.back().back() < 0) c = up_scale(c, -1);
    return bp_divexact_coeff(p, c);
}

inline bpoly bp_prem(bpoly a, const bpoly& b) {
    std::size_t db = b.size() - 1;
    while (!a.empty() && a.size() > db) {
        std::size_t k = a.size() - 1 - db;
        upoly la = a.back();
        for (auto& x : a) x = up_mul(x, b.back());
        for (std::size_t j = 0; j <= db; ++j) a[k + j] = up_sub(a[k + j], up_mul(la, b[j]));
        bp_trim(a);
    }
    return a;
}

inline bpoly bp_gcd(bpoly a, bpoly b) {
    bp_trim(a);
    bp_trim(b);
    auto unit_normal = [](bpoly p) {
        if (!p.empty() && p.back().back() < 0)
            for (auto& x : p) x = up_scale(x, -1);
        return p;
    };
    if (a.empty()) return unit_normal(b);
    if (b.empty()) return unit_normal(a);
    upoly c = up_gcd(bp_content(a), bp_content(b));
    a = bp_pp(a);
    b = bp_pp(b);
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        bpoly r = bp_prem(a, b);
        bp_trim(r);
        if (!r.empty()) r = bp_pp(r);
        a = std::move(b);
        b = std::move(r);
    }
    bpoly g = bp_pp(a);
    for (auto& x : g) x = up_mul(x, c);
    return g;
}

inline bpoly to_bpoly(const bilaurent& p, int s0, int t0) {
    bpoly r;
    for (auto& [e, c] : p.terms()) {
        std::size_t i = e.first - s0, j = e.second - t0;
        if (r.size() <= i) r.resize(i + 1);
        if (r[i].size() <= j) r[i].resize(j + 1);
        r[i][j] = c;
    }
    return r;
}

} // namespace detail

// gcd up to units (signed monomials); result has nonnegative exponents with zero minima
// and a positive lexicographically-leading coefficient.
inline bilaurent gcd(const bilaurent& a, const bilaurent& b) {
    if (a.is_zero() && b.is_zero()) return bilaurent();
    auto ga = detail::to_bpoly(a, a.is_zero() ? 0 : a.min_s(), a.is_zero() ? 0 : a.min_t());
    auto gb = detail::to_bpoly(b, b.is_zero() ? 0 : b.min_s(), b.is_zero() ? 0 : b.min_t());
    auto g = detail::bp_gcd(ga, gb);
    bilaurent r;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g[i].size(); ++j)
            r.add_term({static_cast<int>(i), static_cast<int>(j)}, g[i][j]);
    if (r.is_zero()) return r;
    r = r.shifted(-r.min_s(), -r.min_t());
    if (r.lead_coeff() < 0) r = -r;
    return r;
}

// Single-variable Laurent polynomial with integer exponents (the bracket variable A).
class laurent1 {
public:
    laurent1() = default;
    laurent1(long long c) { add_term(0, integer(c)); }
    static laurent1 monomial(const integer& c, int k) {
        laurent1 p;
        p.add_term(k, c);
        return p;
    }

    const std::map<int, integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(int k, const integer& c) {
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    integer coeff(int k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? integer(0) : it->second;
    }

    laurent1& operator+=(const laurent1& o) {
        for (auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    laurent1& operator-=(const laurent1& o) {
        for (auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    friend laurent1 operator+(laurent1 a, const laurent1& b) { return a += b; }
    friend laurent1 operator-(laurent1 a, const laurent1& b) { return a -= b; }
    laurent1 operator-() const {
        laurent1 r = *this;
        for (auto& [k, c] : r.terms_) c = -c;
        return r;
    }
    friend laurent1 operator*(const laurent1& a, const laurent1& b) {
        laurent1 r;
        for (auto& [i, x] : a.terms_)
            for (auto& [j, y] : b.terms_) r.add_term(i + j, x * y);
        return r;
    }
    laurent1& operator*=(const laurent1& o) { return *this = *this * o; }
    friend bool operator==(const laurent1& a, const laurent1& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const laurent1& a, const laurent1& b) { return !(a == b); }

    laurent1 pow(unsigned k) const {
        laurent1 r(1), base = *this;
        while (k) {
            if (k & 1) r *= base;
            k >>= 1;
            if (k) base *= base;
        }
        return r;
    }

    std::complex<double> eval(std::complex<double> x) const {
        std::complex<double> r = 0;
        for (auto& [k, c] : terms_) r += c.convert_to<double>() * std::pow(x, k);
        return r;
    }

    std::string str(const std::string& var = "A") const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto& [k, c] : terms_) {
            integer mag = c;
            if (!first) {
                out += c < 0 ? " - " : " + ";
                if (c < 0) mag = -c;
            }
            out += mag.str();
            if (k != 0) {
                out += "*" + var;
                if (k != 1) out += "^" + std::to_string(k);
            }
            first = false;
        }
        return out;
    }

private:
    std::map<int, integer> terms_;
};

} // namespace symknot
