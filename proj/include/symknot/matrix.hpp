#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"

namespace symknot {

class int_matrix {
public:
    int_matrix() = default;
    int_matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    int_matrix(std::initializer_list<std::initializer_list<long long>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        for (auto& row : init) {
            if (row.size() != cols_) throw parse_error("ragged matrix literal");
            for (auto v : row) a_.emplace_back(v);
        }
    }

    static int_matrix identity(std::size_t n) {
        int_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    integer& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const integer& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    int_matrix transpose() const {
        int_matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend int_matrix operator+(const int_matrix& x, const int_matrix& y) {
        check_same(x, y);
        int_matrix r = x;
        for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += y.a_[k];
        return r;
    }
    friend int_matrix operator-(const int_matrix& x, const int_matrix& y) {
        check_same(x, y);
        int_matrix r = x;
        for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= y.a_[k];
        return r;
    }
    int_matrix operator-() const {
        int_matrix r = *this;
        for (auto& v : r.a_) v = -v;
        return r;
    }
    friend int_matrix operator*(const int_matrix& x, const int_matrix& y) {
        if (x.cols_ != y.rows_) throw error("matrix shape mismatch");
        int_matrix r(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                if (x(i, k) == 0) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) r(i, j) += x(i, k) * y(k, j);
            }
        return r;
    }
    friend int_matrix operator*(const integer& c, int_matrix m) {
        for (auto& v : m.a_) v *= c;
        return m;
    }
    friend bool operator==(const int_matrix& x, const int_matrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }
    friend bool operator!=(const int_matrix& x, const int_matrix& y) { return !(x == y); }

    int_matrix pow(unsigned k) const {
        if (rows_ != cols_) throw error("power of non-square matrix");
        int_matrix r = identity(rows_), base = *this;
        while (k) {
            if (k & 1) r = r * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return r;
    }

    bool is_zero() const {
        for (auto& v : a_)
            if (v != 0) return false;
        return true;
    }

    std::string str() const {
        std::ostringstream os;
        os << rows_ << ' ' << cols_ << '\n';
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
            os << '\n';
        }
        return os.str();
    }

    static int_matrix parse(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        std::size_t lineno = 0;
        auto next_line = [&]() -> bool {
            while (std::getline(is, line)) {
                ++lineno;
                if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
            }
            return false;
        };
        if (!next_line()) throw parse_error("matrix: missing header");
        long long r = -1, c = -1;
        {
            std::istringstream hs(line);
            if (!(hs >> r >> c) || r < 0 || c < 0) throw parse_error("matrix line 1: expected 'rows cols'");
        }
        int_matrix m(r, c);
        for (long long i = 0; i < r; ++i) {
            if (!next_line()) throw parse_error("matrix: missing row " + std::to_string(i + 1));
            std::istringstream rs(line);
            std::string tok;
            long long j = 0;
            while (rs >> tok) {
                if (j >= c) throw parse_error("matrix line " + std::to_string(lineno) + ": too many entries");
                try {
                    m(i, j) = integer(tok);
                } catch (const std::exception&) {
                    throw parse_error("matrix line " + std::to_string(lineno) + ": bad integer '" + tok + "'");
                }
                ++j;
            }
            if (j != c) throw parse_error("matrix line " + std::to_string(lineno) + ": expected " + std::to_string(c) + " entries");
        }
        return m;
    }

    void swap_rows(std::size_t i, std::size_t k) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(i, j), (*this)(k, j));
    }
    void swap_cols(std::size_t j, std::size_t k) {
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, j), (*this)(i, k));
    }
    // row_i += c * row_k
    void add_row(std::size_t i, std::size_t k, const integer& c) {
        if (c == 0) return;
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) += c * (*this)(k, j);
    }
    void add_col(std::size_t j, std::size_t k, const integer& c) {
        if (c == 0) return;
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) += c * (*this)(i, k);
    }
    void negate_row(std::size_t i) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
    }

private:
    static void check_same(const int_matrix& x, const int_matrix& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw error("matrix shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<integer> a_;
};

// Rational matrix as num / den with den > 0 and no common factor.
struct rat_matrix {
    int_matrix num;
    integer den = 1;

    bool is_integral() const { return den == 1; }

    void reduce() {
        integer g = den;
        for (std::size_t i = 0; i < num.rows(); ++i)
            for (std::size_t j = 0; j < num.cols(); ++j) g = gcd(g, num(i, j));
        if (den < 0) g = -abs(g);
        if (g != 0 && g != 1) {
            for (std::size_t i = 0; i < num.rows(); ++i)
                for (std::size_t j = 0; j < num.cols(); ++j) num(i, j) /= g;
            den /= g;
        }
    }
};

// Bareiss fraction-free elimination
inline integer determinant(int_matrix m) {
    if (m.rows() != m.cols()) throw error("determinant of non-square matrix");
    std::size_t n = m.rows();
    if (n == 0) return 1;
    integer prev = 1;
    int sgn = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.swap_rows(k, p);
            sgn = -sgn;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sgn * m(n - 1, n - 1);
}

inline rat_matrix inverse_exact(const int_matrix& m) {
    using rational = boost::multiprecision::cpp_rational;
    if (m.rows() != m.cols()) throw error("inverse of non-square matrix");
    std::size_t n = m.rows();
    std::vector<std::vector<rational>> a(n, std::vector<rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = rational(m(i, j));
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw singular_matrix();
        std::swap(a[p], a[c]);
        rational inv = 1 / a[c][c];
        for (auto& v : a[c]) v *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            rational f = a[i][c];
            for (std::size_t j = c; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    integer den = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            integer d = boost::multiprecision::denominator(a[i][n + j]);
            den = den / gcd(den, d) * d;
        }
    rat_matrix r{int_matrix(n, n), den};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const rational& v = a[i][n + j];
            r.num(i, j) = boost::multiprecision::numerator(v) * (den / boost::multiprecision::denominator(v));
        }
    r.reduce();
    return r;
}

struct smith_result {
    std::vector<integer> diagonal; // min(rows, cols) entries, d_i | d_{i+1}
    std::optional<int_matrix> u, v; // u * M * v = diag, when tracked
};

// Smallest-magnitude pivoting; unimodular row/column operations only.
inline smith_result smith_normal_form(const int_matrix& m_in, bool track = false) {
    int_matrix a = m_in;
    std::size_t R = a.rows(), C = a.cols();
    int_matrix u = int_matrix::identity(R), v = int_matrix::identity(C);
    std::size_t K = std::min(R, C);
    for (std::size_t t = 0; t < K; ++t) {
        for (;;) {
            // pivot: smallest nonzero magnitude in the trailing block
            std::size_t pi = R, pj = C;
            integer best = 0;
            for (std::size_t i = t; i < R; ++i)
                for (std::size_t j = t; j < C; ++j)
                    if (a(i, j) != 0 && (best == 0 || abs(a(i, j)) < best)) {
                        best = abs(a(i, j));
                        pi = i;
                        pj = j;
                    }
            if (pi == R) break;
            if (pi != t) {
                a.swap_rows(t, pi);
                if (track) u.swap_rows(t, pi);
            }
            if (pj != t) {
                a.swap_cols(t, pj);
                if (track) v.swap_cols(t, pj);
            }
            bool dirty = false;
            for (std::size_t i = t + 1; i < R; ++i) {
                if (a(i, t) == 0) continue;
                integer q = floor_div(a(i, t), a(t, t));
                a.add_row(i, t, -q);
                if (track) u.add_row(i, t, -q);
                if (a(i, t) != 0) dirty = true;
            }
            for (std::size_t j = t + 1; j < C; ++j) {
                if (a(t, j) == 0) continue;
                integer q = floor_div(a(t, j), a(t, t));
                a.add_col(j, t, -q);
                if (track) v.add_col(j, t, -q);
                if (a(t, j) != 0) dirty = true;
            }
            if (dirty) continue;
            // divisibility of the trailing block
            std::size_t bad = R;
            for (std::size_t i = t + 1; i < R && bad == R; ++i)
                for (std::size_t j = t + 1; j < C; ++j)
                    if (a(i, j) % a(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad == R) break;
            a.add_row(t, bad, 1);
            if (track) u.add_row(t, bad, 1);
        }
        if (a(t, t) < 0) {
            a.negate_row(t);
            if (track) u.negate_row(t);
        }
    }
    smith_result res;
    for (std::size_t t = 0; t < K; ++t) res.diagonal.push_back(a(t, t));
    if (track) {
        res.u = std::move(u);
        res.v = std::move(v);
    }
    return res;
}

} // namespace symknot
