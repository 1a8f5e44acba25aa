#pragma once

// Independent reference computations used to check the library.

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <array>
#include <complex>
#include <cstdint>

#include <symknot/bilaurent.hpp>
#include <symknot/diagram.hpp>
#include <symknot/integer.hpp>
#include <symknot/matrix.hpp>

namespace oracle {

using symknot::int_matrix;
using symknot::integer;

// cofactor expansion
inline integer laplace_det(const int_matrix& m) {
    std::size_t n = m.rows();
    if (n == 0) return 1;
    if (n == 1) return m(0, 0);
    integer r = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (m(0, j) == 0) continue;
        int_matrix sub(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t c = 0, cc = 0; c < n; ++c)
                if (c != j) sub(i - 1, cc++) = m(i, c);
        integer t = m(0, j) * laplace_det(sub);
        r += (j % 2 ? -t : t);
    }
    return r;
}

inline void choose(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return;
    for (;;) {
        out.push_back(idx);
        int i = static_cast<int>(k) - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// gcd of all k x k minors
inline integer minor_gcd(const int_matrix& m, std::size_t k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    choose(m.rows(), k, rs);
    choose(m.cols(), k, cs);
    integer g = 0;
    for (auto& r : rs)
        for (auto& c : cs) {
            int_matrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(r[i], c[j]);
            g = symknot::gcd(g, symknot::abs(laplace_det(sub)));
        }
    return g;
}

// d_k = D_k / D_{k-1}, D_k the k-th determinantal divisor
inline std::vector<integer> smith_by_minors(const int_matrix& m) {
    std::size_t K = std::min(m.rows(), m.cols());
    std::vector<integer> d;
    integer prev = 1;
    for (std::size_t k = 1; k <= K; ++k) {
        integer D = minor_gcd(m, k);
        if (D == 0) {
            d.push_back(0);
            prev = 0;
            continue;
        }
        d.push_back(D / prev);
        prev = D;
    }
    return d;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) { return std::string(SYMKNOT_FIXTURES) + "/" + name; }

inline symknot::diagram load(const std::string& name) { return symknot::parse_sud(read_file(fixture(name))); }

// Diagram from a PD list (crossing i gets id i). `axis` maps crossing index
// to axis_index, `partners` lists mirror pairs by index.
inline symknot::diagram from_pd(const std::vector<std::array<int, 4>>& pd, const std::map<int, int>& axis = {},
                                const std::vector<std::pair<int, int>>& partners = {},
                                const std::vector<bool>& loops = {}) {
    std::map<int, int> partner;
    for (auto [a, b] : partners) partner[a] = b, partner[b] = a;
    std::ostringstream os;
    os << "{\"free_loops\":[";
    for (std::size_t i = 0; i < loops.size(); ++i) os << (i ? "," : "") << "{\"crosses_axis\":" << (loops[i] ? "true" : "false") << "}";
    os << "],\"crossings\":[";
    for (std::size_t i = 0; i < pd.size(); ++i) {
        int x = static_cast<int>(i);
        os << (i ? "," : "") << "{\"id\":" << x << ",\"edges\":[" << pd[i][0] << "," << pd[i][1] << "," << pd[i][2] << ","
           << pd[i][3] << "],\"on_axis\":" << (axis.count(x) ? "true" : "false") << ",\"axis_index\":";
        if (axis.count(x)) os << axis.at(x);
        else os << "null";
        os << ",\"mirror_partner\":";
        if (partner.count(x)) os << partner.at(x);
        else os << "null";
        os << "}";
    }
    os << "]}";
    return symknot::parse_sud(os.str());
}

// Kauffman bracket by enumerating all states and tracing every loop by hand.
// Returns coefficients by A-exponent.
inline std::map<int, integer> bracket_by_tracing(const symknot::diagram& d) {
    int n = d.num_crossings();
    int E = d.num_edges();
    // the two slots holding each edge
    std::vector<std::vector<std::pair<int, int>>> at(E);
    for (int x = 0; x < n; ++x)
        for (int s = 0; s < 4; ++s) at[d.crossings[x].edges[s]].push_back({x, s});
    // delta^k expanded: (-A^2 - A^-2)^k
    auto delta_pow = [](int k) {
        std::map<int, integer> r{{0, 1}};
        for (int i = 0; i < k; ++i) {
            std::map<int, integer> t;
            for (auto& [e, c] : r) {
                t[e + 2] -= c;
                t[e - 2] -= c;
            }
            r = t;
        }
        return r;
    };
    std::map<int, integer> out;
    int fl = static_cast<int>(d.free_loops.size());
    for (std::uint64_t st = 0; st < (std::uint64_t(1) << n); ++st) {
        std::vector<std::array<bool, 4>> seen(n, {false, false, false, false});
        int loops = 0, na = 0;
        for (int x = 0; x < n; ++x) na += (st >> x) & 1;
        for (int x = 0; x < n; ++x)
            for (int s = 0; s < 4; ++s) {
                if (seen[x][s]) continue;
                ++loops;
                int cx = x, cs = s;
                while (!seen[cx][cs]) {
                    seen[cx][cs] = true;
                    bool a = (st >> cx) & 1;
                    // A joins 0-1 and 2-3, B joins 0-3 and 1-2
                    int mate = a ? (cs ^ 1) : 3 - cs;
                    seen[cx][mate] = true;
                    int e = d.crossings[cx].edges[mate];
                    auto p = at[e][0] == std::pair<int, int>{cx, mate} ? at[e][1] : at[e][0];
                    cx = p.first;
                    cs = p.second;
                }
            }
        int total = loops + fl;
        if (n == 0) total = fl;
        for (auto& [e, c] : delta_pow(total - 1)) out[e + na - (n - na)] += c;
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

// Jones polynomial from the traced bracket, as a t half-step polynomial.
inline symknot::bilaurent jones_by_tracing(const symknot::diagram& d) {
    int w = 0;
    for (int x = 0; x < d.num_crossings(); ++x) w += d.sign(x);
    symknot::bilaurent r;
    for (auto& [e, c] : bracket_by_tracing(d)) {
        int k = e - 3 * w; // times (-A^3)^{-w}
        integer cc = (w % 2 == 0) ? c : integer(-c);
        r.add_term({0, -k / 2}, cc);
    }
    return r;
}

// d * (-xi)^{-3 w_axis} <D>(A = xi), evaluated numerically
inline std::complex<double> spin_by_bracket(const symknot::diagram& d, std::complex<double> dd,
                                            std::complex<double> xi) {
    std::complex<double> br = 0;
    for (auto& [e, c] : bracket_by_tracing(d)) br += c.convert_to<double>() * std::pow(xi, e);
    int wa = 0;
    for (int x = 0; x < d.num_crossings(); ++x)
        if (d.crossings[x].on_axis) wa += d.sign(x);
    return dd * std::pow(-xi, -3 * wa) * br;
}

// prod over k-th roots of unity w != 1 of p(w), rounded
inline long long cover_order_numeric(const std::map<int, integer>& laurent, int k) {
    const double pi = std::acos(-1.0);
    std::complex<double> prod = 1;
    for (int j = 1; j < k; ++j) {
        std::complex<double> w = std::polar(1.0, 2 * pi * j / k), v = 0;
        for (auto& [e, c] : laurent) v += c.convert_to<double>() * std::pow(w, e);
        prod *= v;
    }
    return std::llround(std::abs(prod));
}

} // namespace oracle
