#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "diagram.hpp"
#include "errors.hpp"
#include "integer.hpp"

namespace symknot {

// Gaussian integers over T (long long for hot loops, integer otherwise).
template <class T>
struct gauss {
    T re{}, im{};
    gauss() = default;
    gauss(T r, T i = T(0)) : re(std::move(r)), im(std::move(i)) {}
    friend gauss operator+(const gauss& a, const gauss& b) { return {a.re + b.re, a.im + b.im}; }
    friend gauss operator-(const gauss& a, const gauss& b) { return {a.re - b.re, a.im - b.im}; }
    friend gauss operator*(const gauss& a, const gauss& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    gauss& operator+=(const gauss& o) { return *this = *this + o; }
    gauss& operator*=(const gauss& o) { return *this = *this * o; }
    gauss operator-() const { return {-re, -im}; }
    gauss conj() const { return {re, -im}; }
    T norm() const { return re * re + im * im; }
    friend bool operator==(const gauss& a, const gauss& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const gauss& a, const gauss& b) { return !(a == b); }
};

using gauss_int = gauss<integer>;

// unit inverse; only units are ever inverted
template <class T>
gauss<T> unit_inverse(const gauss<T>& u) {
    if (u.norm() != 1) throw invalid_model("inverting a non-unit Gaussian integer");
    return u.conj();
}

// Exact value num / den in Q(i), den > 0.
struct gauss_rational {
    gauss_int num;
    integer den = 1;

    void normalize() {
        if (den < 0) {
            den = -den;
            num = -num;
        }
        integer g = gcd(gcd(num.re, num.im), den);
        if (g > 1) {
            num.re /= g;
            num.im /= g;
            den /= g;
        }
    }
    std::complex<double> value() const {
        double dd = den.convert_to<double>();
        return {num.re.convert_to<double>() / dd, num.im.convert_to<double>() / dd};
    }
    friend bool operator==(const gauss_rational& a, const gauss_rational& b) {
        return a.num.re * b.den == b.num.re * a.den && a.num.im * b.den == b.num.im * a.den;
    }
    friend gauss_rational operator*(const gauss_rational& a, const gauss_rational& b) {
        gauss_rational r{a.num * b.num, a.den * b.den};
        r.normalize();
        return r;
    }
    friend gauss_rational operator+(const gauss_rational& a, const gauss_rational& b) {
        gauss_rational r{a.num * gauss_int(b.den) + b.num * gauss_int(a.den), a.den * b.den};
        r.normalize();
        return r;
    }
    std::string str() const {
        std::string s = "(" + num.re.str() + (num.im < 0 ? " - " : " + ") + abs(num.im).str() + "i)";
        if (den != 1) s += "/" + den.str();
        return s;
    }
};

enum class spin_backend { exact, floating };

using cmatrix = std::vector<std::vector<std::complex<double>>>;
using gmatrix = std::vector<std::vector<gauss_int>>;

struct spin_model {
    int n = 0;
    spin_backend backend = spin_backend::floating;
    std::complex<double> d, xi;
    cmatrix Wplus, Wminus, Vplus, Vminus;
    // exact backend only: d is an integer, xi a unit in Z[i]
    integer d_exact = 0;
    gauss_int xi_exact;
    gmatrix Wplus_x, Wminus_x, Vplus_x, Vminus_x;
    double tol = 1e-9;
};

namespace detail {

inline bool close(std::complex<double> a, std::complex<double> b, double tol) {
    double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= tol * scale;
}

inline cmatrix potts_matrix(int n, std::complex<double> diag, std::complex<double> off) {
    cmatrix m(n, std::vector<std::complex<double>>(n, off));
    for (int i = 0; i < n; ++i) m[i][i] = diag;
    return m;
}

inline gmatrix potts_matrix_x(int n, const gauss_int& diag, const gauss_int& off) {
    gmatrix m(n, std::vector<gauss_int>(n, off));
    for (int i = 0; i < n; ++i) m[i][i] = diag;
    return m;
}

template <class T>
T upow(T base, int k, T one) {
    T r = one;
    for (int i = 0; i < k; ++i) r = r * base;
    return r;
}

} // namespace detail

// The four roots xi of d = -xi^2 - xi^{-2}: branch bit 1 picks the root u of
// u^2 + d u + 1 = 0, bit 0 the square root of u.
inline std::complex<double> xi_branch_value(double d, int branch) {
    if (branch < 0 || branch > 3) throw invalid_branch("branch must be 0..3");
    std::complex<double> disc = std::sqrt(std::complex<double>(d * d - 4.0, 0.0));
    std::complex<double> u = (-d + ((branch & 2) ? -disc : disc)) / 2.0;
    std::complex<double> xi = std::sqrt(u);
    return (branch & 1) ? -xi : xi;
}

inline bool check_type_II(const spin_model& m);
inline bool check_type_III(const spin_model& m);

// Potts-refined model: W+ = V+ = (-xi^{-3}) I + xi (J - I), W- = V- its
// entrywise inverse.
inline spin_model potts_model(int n, int d_sign, int xi_branch, spin_backend backend = spin_backend::floating,
                              double tol = 1e-9) {
    if (n < 2) throw invalid_model("n must be at least 2");
    if (d_sign != 1 && d_sign != -1) throw invalid_model("d sign must be +1 or -1");
    if (xi_branch < 0 || xi_branch > 3) throw invalid_branch("branch must be 0..3");
    spin_model m;
    m.n = n;
    m.tol = tol;
    m.backend = backend;
    double d = d_sign * std::sqrt(static_cast<double>(n));
    m.d = d;
    if (backend == spin_backend::exact) {
        if (n != 4) throw invalid_branch("the exact backend needs n = 4");
        m.d_exact = 2 * d_sign;
        // d = 2: xi^2 = -1; d = -2: xi^2 = 1
        gauss_int base = d_sign > 0 ? gauss_int(0, 1) : gauss_int(1, 0);
        m.xi_exact = (xi_branch & 1) ? -base : base;
        m.xi = {m.xi_exact.re.convert_to<double>(), m.xi_exact.im.convert_to<double>()};
        gauss_int xinv = unit_inverse(m.xi_exact);
        gauss_int xi3 = m.xi_exact * m.xi_exact * m.xi_exact;
        gauss_int xinv3 = xinv * xinv * xinv;
        m.Wplus_x = m.Vplus_x = detail::potts_matrix_x(n, -xinv3, m.xi_exact);
        m.Wminus_x = m.Vminus_x = detail::potts_matrix_x(n, -xi3, xinv);
    } else {
        m.xi = xi_branch_value(d, xi_branch);
    }
    auto x = m.xi;
    m.Wplus = m.Vplus = detail::potts_matrix(n, -std::pow(x, -3), x);
    m.Wminus = m.Vminus = detail::potts_matrix(n, -std::pow(x, 3), 1.0 / x);
    if (!detail::close(m.d, -x * x - 1.0 / (x * x), 1e-12)) throw invalid_branch("xi does not solve d = -xi^2 - xi^-2");
    if (!check_type_II(m) || !check_type_III(m)) throw invalid_model("Potts matrices fail the spin model equations");
    return m;
}

// User-supplied matrices (floating backend).
inline spin_model custom_model(const cmatrix& Wp, const cmatrix& Wm, std::complex<double> d, std::complex<double> xi,
                               double tol = 1e-9) {
    spin_model m;
    m.n = static_cast<int>(Wp.size());
    m.d = d;
    m.xi = xi;
    m.tol = tol;
    m.Wplus = Wp;
    m.Wminus = Wm;
    int n = m.n;
    m.Vplus = detail::potts_matrix(n, -std::pow(xi, -3), xi);
    m.Vminus = detail::potts_matrix(n, -std::pow(xi, 3), 1.0 / xi);
    if (!detail::close(std::complex<double>(n), d * d, tol)) throw invalid_model("d^2 must equal n");
    return m;
}

// W+ symmetric with nonzero entries and W+ o W- = J.
inline bool check_type_II(const spin_model& m) {
    int n = m.n;
    if (m.backend == spin_backend::exact) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (m.Wplus_x[a][b] != m.Wplus_x[b][a]) return false;
                if (m.Wplus_x[a][b] == gauss_int(0)) return false;
                if (m.Wplus_x[a][b] * m.Wminus_x[a][b] != gauss_int(1)) return false;
            }
        return true;
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (!detail::close(m.Wplus[a][b], m.Wplus[b][a], m.tol)) return false;
            if (std::abs(m.Wplus[a][b]) < m.tol) return false;
            if (!detail::close(m.Wplus[a][b] * m.Wminus[a][b], 1.0, m.tol)) return false;
        }
    return true;
}

// W+ Y_ab = d W-(a,b) Y_ab with Y_ab(x) = W+(x,a) / W+(x,b).
inline bool check_type_III(const spin_model& m) {
    int n = m.n;
    if (m.backend == spin_backend::exact) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                std::vector<gauss_int> y(n);
                for (int x = 0; x < n; ++x) {
                    if (m.Wplus_x[x][b].norm() != 1) return false;
                    y[x] = m.Wplus_x[x][a] * unit_inverse(m.Wplus_x[x][b]);
                }
                for (int x = 0; x < n; ++x) {
                    gauss_int lhs;
                    for (int z = 0; z < n; ++z) lhs += m.Wplus_x[x][z] * y[z];
                    if (lhs != gauss_int(m.d_exact) * m.Wminus_x[a][b] * y[x]) return false;
                }
            }
        return true;
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::vector<std::complex<double>> y(n);
            for (int x = 0; x < n; ++x) y[x] = m.Wplus[x][a] / m.Wplus[x][b];
            for (int x = 0; x < n; ++x) {
                std::complex<double> lhs = 0;
                for (int z = 0; z < n; ++z) lhs += m.Wplus[x][z] * y[z];
                if (!detail::close(lhs, m.d * m.Wminus[a][b] * y[x], m.tol)) return false;
            }
        }
    return true;
}

// ---------------------------------------------------------------------------
// Signed medial graph on the black faces.

struct medial_edge {
    int v = 0, w = 0;
    int sign = 1;
    bool on_axis = false;
};

struct medial_graph {
    int vertices = 0;
    std::vector<medial_edge> edges;
};

// A crossing's edge is positive when its black corners are (0,1) and (2,3).
// Each free loop adds an isolated vertex for its inner black face.
inline medial_graph medial(const diagram& d, const face_data& fd, const coloring& c) {
    medial_graph g;
    std::map<int, int> vid;
    for (int f = 0; f < static_cast<int>(fd.faces.size()); ++f)
        if (c.black[f]) vid[f] = g.vertices++;
    for (int x = 0; x < d.num_crossings(); ++x) {
        auto& fo = fd.face_of[x];
        bool pos = c.black[fo[0]];
        medial_edge e;
        e.sign = pos ? 1 : -1;
        e.v = vid.at(pos ? fo[0] : fo[1]);
        e.w = vid.at(pos ? fo[2] : fo[3]);
        e.on_axis = d.crossings[x].on_axis;
        g.edges.push_back(e);
    }
    g.vertices += static_cast<int>(d.free_loops.size());
    return g;
}

inline medial_graph medial(const diagram& d) {
    auto fd = faces(d);
    return medial(d, fd, chequerboard(d, fd));
}

inline coloring inverted(const coloring& c) {
    coloring r = c;
    for (std::size_t f = 0; f < r.black.size(); ++f) r.black[f] = !r.black[f];
    return r;
}

// ---------------------------------------------------------------------------
// Partition function.

enum class partition_method { brute_force, elimination };

struct partition_options {
    partition_method method = partition_method::brute_force;
    std::uint64_t cap = std::uint64_t(1) << 28;
    unsigned threads = 0;
};

struct spin_value {
    bool exact = false;
    gauss_rational q;        // exact backend
    std::complex<double> z;  // always filled

    bool equals(const spin_value& o, double tol = 1e-9) const {
        if (exact && o.exact) return q == o.q;
        return detail::close(z, o.z, tol);
    }
    std::string str() const {
        if (exact) return q.str();
        char buf[96];
        std::snprintf(buf, sizeof buf, "(%.12g %+.12gi)", z.real(), z.imag());
        return buf;
    }
};

namespace detail {

template <class S, class M>
const M& pick_matrix(const medial_edge& e, const M& wp, const M& wm, const M& vp, const M& vm) {
    if (e.on_axis) return e.sign > 0 ? vp : vm;
    return e.sign > 0 ? wp : wm;
}

// Sum over all colourings of the edge-weight product.
template <class S, class M>
S brute_sum(int n, const medial_graph& g, const M& wp, const M& wm, const M& vp, const M& vm, unsigned threads,
            S zero, S one) {
    int N = g.vertices;
    std::vector<const M*> mats;
    for (auto& e : g.edges) mats.push_back(&pick_matrix<S>(e, wp, wm, vp, vm));
    // split on the first two vertices; chunk results are reduced in order
    int split = std::min(N, 2);
    std::uint64_t chunks = 1;
    for (int i = 0; i < split; ++i) chunks *= n;
    std::vector<S> part(chunks, zero);
    auto run = [&](std::uint64_t c) {
        std::vector<int> sigma(N, 0);
        std::uint64_t cc = c;
        for (int i = 0; i < split; ++i) {
            sigma[i] = static_cast<int>(cc % n);
            cc /= n;
        }
        S acc = zero;
        for (;;) {
            S prod = one;
            for (std::size_t k = 0; k < g.edges.size(); ++k)
                prod = prod * (*mats[k])[sigma[g.edges[k].v]][sigma[g.edges[k].w]];
            acc = acc + prod;
            int i = split;
            while (i < N && ++sigma[i] == n) sigma[i++] = 0;
            if (i == N) break;
        }
        part[c] = acc;
    };
    unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::uint64_t>(nt, chunks); ++t)
        pool.emplace_back([&] {
            for (std::uint64_t c; (c = next++) < chunks;) run(c);
        });
    for (auto& th : pool) th.join();
    S total = zero;
    for (auto& p : part) total = total + p;
    return total;
}

// Variable elimination over the vertices in min-degree order.
template <class S, class M>
S eliminate_sum(int n, const medial_graph& g, const M& wp, const M& wm, const M& vp, const M& vm, S zero, S one) {
    struct factor {
        std::vector<int> vars; // sorted
        std::vector<S> table;  // index: mixed radix over vars, first var fastest
    };
    std::vector<factor> fs;
    for (auto& e : g.edges) {
        auto& m = pick_matrix<S>(e, wp, wm, vp, vm);
        factor f;
        if (e.v == e.w) {
            f.vars = {e.v};
            for (int a = 0; a < n; ++a) f.table.push_back(m[a][a]);
        } else {
            int lo = std::min(e.v, e.w), hi = std::max(e.v, e.w);
            f.vars = {lo, hi};
            f.table.resize(n * n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    // a is the value of lo, b of hi
                    int av = e.v == lo ? a : b, bv = e.v == lo ? b : a;
                    f.table[a + n * b] = m[av][bv];
                }
        }
        fs.push_back(std::move(f));
    }
    S scalar = one;
    std::vector<bool> gone(g.vertices, false);
    for (int step = 0; step < g.vertices; ++step) {
        // vertex whose elimination creates the smallest factor
        int best = -1;
        std::size_t best_w = 0;
        for (int v = 0; v < g.vertices; ++v) {
            if (gone[v]) continue;
            std::vector<int> u;
            for (auto& f : fs)
                if (std::binary_search(f.vars.begin(), f.vars.end(), v)) u.insert(u.end(), f.vars.begin(), f.vars.end());
            std::sort(u.begin(), u.end());
            u.erase(std::unique(u.begin(), u.end()), u.end());
            if (best < 0 || u.size() < best_w) best = v, best_w = u.size();
        }
        int v = best;
        gone[v] = true;
        std::vector<factor> with, rest;
        for (auto& f : fs) (std::binary_search(f.vars.begin(), f.vars.end(), v) ? with : rest).push_back(std::move(f));
        std::vector<int> vars;
        for (auto& f : with) vars.insert(vars.end(), f.vars.begin(), f.vars.end());
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        if (vars.empty()) {
            // isolated vertex
            scalar = scalar * S(n);
            fs = std::move(rest);
            continue;
        }
        if (vars.size() > 14) throw state_space_too_large("elimination width too large");
        std::vector<int> out_vars;
        for (int x : vars)
            if (x != v) out_vars.push_back(x);
        std::size_t out_size = 1;
        for (std::size_t i = 0; i < out_vars.size(); ++i) out_size *= n;
        factor nf;
        nf.vars = out_vars;
        nf.table.assign(out_size, zero);
        std::vector<int> val(vars.size(), 0);
        auto pos_of = [&](int var) { return static_cast<int>(std::lower_bound(vars.begin(), vars.end(), var) - vars.begin()); };
        std::vector<std::vector<int>> fpos;
        for (auto& f : with) {
            std::vector<int> p;
            for (int x : f.vars) p.push_back(pos_of(x));
            fpos.push_back(p);
        }
        std::vector<int> opos;
        for (int x : out_vars) opos.push_back(pos_of(x));
        std::size_t full = out_size * n;
        for (std::size_t idx = 0; idx < full; ++idx) {
            std::size_t t = idx;
            for (std::size_t i = 0; i < vars.size(); ++i) {
                val[i] = static_cast<int>(t % n);
                t /= n;
            }
            S prod = one;
            for (std::size_t k = 0; k < with.size(); ++k) {
                std::size_t fi = 0, mul = 1;
                for (int p : fpos[k]) {
                    fi += val[p] * mul;
                    mul *= n;
                }
                prod = prod * with[k].table[fi];
            }
            std::size_t oi = 0, mul = 1;
            for (int p : opos) {
                oi += val[p] * mul;
                mul *= n;
            }
            nf.table[oi] = nf.table[oi] + prod;
        }
        rest.push_back(std::move(nf));
        fs = std::move(rest);
    }
    for (auto& f : fs) scalar = scalar * f.table.at(0);
    return scalar;
}

inline gmatrix to_ll_safe(const gmatrix& m) { return m; }

inline std::vector<std::vector<gauss<long long>>> to_ll(const gmatrix& m) {
    std::vector<std::vector<gauss<long long>>> r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (auto& v : m[i]) r[i].push_back({v.re.convert_to<long long>(), v.im.convert_to<long long>()});
    return r;
}

} // namespace detail

// Z = d^{-N} sum_sigma prod_edges M_e(sigma v, sigma w)
inline spin_value partition_Z(const spin_model& m, const medial_graph& g, const partition_options& opt = {}) {
    int N = g.vertices;
    int n = m.n;
    if (opt.method == partition_method::brute_force) {
        double states = std::pow(static_cast<double>(n), N);
        if (states > static_cast<double>(opt.cap)) throw state_space_too_large("n^N exceeds the partition cap");
    }
    spin_value r;
    if (m.backend == spin_backend::exact) {
        gauss_int sum;
        if (opt.method == partition_method::brute_force) {
            using G = gauss<long long>;
            auto s = detail::brute_sum<G>(n, g, detail::to_ll(m.Wplus_x), detail::to_ll(m.Wminus_x),
                                          detail::to_ll(m.Vplus_x), detail::to_ll(m.Vminus_x), opt.threads, G(0),
                                          G(1));
            sum = {integer(s.re), integer(s.im)};
        } else {
            sum = detail::eliminate_sum<gauss_int>(n, g, m.Wplus_x, m.Wminus_x, m.Vplus_x, m.Vminus_x, gauss_int(0),
                                                   gauss_int(1));
        }
        integer den = 1;
        for (int i = 0; i < N; ++i) den *= m.d_exact;
        r.exact = true;
        r.q = {sum, den};
        r.q.normalize();
        r.z = r.q.value();
        return r;
    }
    using C = std::complex<double>;
    C sum = opt.method == partition_method::brute_force
                ? detail::brute_sum<C>(n, g, m.Wplus, m.Wminus, m.Vplus, m.Vminus, opt.threads, C(0), C(1))
                : detail::eliminate_sum<C>(n, g, m.Wplus, m.Wminus, m.Vplus, m.Vminus, C(0), C(1));
    r.z = sum / std::pow(m.d, N);
    return r;
}

// I = (-xi)^{-3 (p_axis - n_axis)} Z
inline spin_value normalize_I(const spin_model& m, const diagram& d, spin_value z) {
    auto w = writhe(d);
    int k = -3 * (w.p_axis - w.n_axis);
    if (z.exact) {
        gauss_int u = -m.xi_exact;
        gauss_int f = detail::upow(k >= 0 ? u : unit_inverse(u), k >= 0 ? k : -k, gauss_int(1));
        z.q.num = z.q.num * f;
        z.z = z.q.value();
        return z;
    }
    z.z *= std::pow(-m.xi, k);
    return z;
}

inline spin_value normalized_I(const spin_model& m, const diagram& d, const partition_options& opt = {},
                               bool invert_coloring = false) {
    auto fd = faces(d);
    auto c = chequerboard(d, fd);
    if (invert_coloring) c = inverted(c);
    return normalize_I(m, d, partition_Z(m, medial(d, fd, c), opt));
}

} // namespace symknot
