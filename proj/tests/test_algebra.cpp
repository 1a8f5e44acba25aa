#include <gtest/gtest.h>

#include <random>

#include <symknot/bilaurent.hpp>
#include <symknot/matrix.hpp>
#include <symknot/ratfunc.hpp>

#include "oracles.hpp"

using namespace symknot;

namespace {

bilaurent sh(int a) { return bilaurent::s_half(a); }
bilaurent th(int b) { return bilaurent::t_half(b); }

bilaurent random_poly(std::mt19937& g) {
    std::uniform_int_distribution<int> nt(0, 4), ex(-4, 4), co(-3, 3);
    bilaurent p;
    int n = nt(g);
    for (int i = 0; i < n; ++i) p.add_term({ex(g), ex(g)}, co(g));
    return p;
}

int_matrix random_matrix(std::mt19937& g, int r, int c, int lo, int hi) {
    std::uniform_int_distribution<int> v(lo, hi);
    int_matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = v(g);
    return m;
}

} // namespace

TEST(BiLaurent, DifferenceOfSquares) {
    EXPECT_EQ((sh(1) + sh(-1)) * (sh(1) - sh(-1)), sh(2) - sh(-2));
}

TEST(BiLaurent, AdditiveInverse) {
    std::mt19937 g(1);
    for (int i = 0; i < 50; ++i) {
        auto p = random_poly(g);
        EXPECT_TRUE((p + (-p)).is_zero());
        EXPECT_TRUE((p + (-p)).terms().empty());
    }
}

TEST(BiLaurent, RingAxiomsOnRandomTriples) {
    std::mt19937 g(7);
    for (int i = 0; i < 200; ++i) {
        auto a = random_poly(g), b = random_poly(g), c = random_poly(g);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        auto ab = a * b;
        for (auto& [e, v] : ab.terms()) EXPECT_NE(v, 0);
    }
}

TEST(BiLaurent, DivideExact) {
    EXPECT_EQ(divide_exact(sh(2) - sh(-2), sh(1) + sh(-1)), sh(1) - sh(-1));
    std::mt19937 g(3);
    for (int i = 0; i < 30; ++i) {
        auto p = random_poly(g);
        EXPECT_EQ(divide_exact(p, bilaurent(1)), p);
    }
    EXPECT_THROW(divide_exact(sh(2) + 1, th(2) + 1), not_divisible);
}

TEST(BiLaurent, DivideRecoversFactor) {
    std::mt19937 g(11);
    for (int i = 0; i < 100; ++i) {
        auto a = random_poly(g), b = random_poly(g);
        if (b.is_zero()) continue;
        EXPECT_EQ(divide_exact(a * b, b), a);
    }
}

TEST(BiLaurent, PrintFormat) {
    auto p = bilaurent::monomial(-1, -1, 3) + bilaurent(2);
    EXPECT_EQ(p.str(), "-1*s^-1/2*t^3/2 + 2");
    EXPECT_EQ(bilaurent::parse(p.str()), p);
    EXPECT_EQ(th(2).str(), "1*t");
    EXPECT_EQ(bilaurent().str(), "0");
}

TEST(BiLaurent, ParseRoundTrip) {
    std::mt19937 g(5);
    for (int i = 0; i < 100; ++i) {
        auto p = random_poly(g);
        EXPECT_EQ(bilaurent::parse(p.str()), p) << p.str();
    }
}

TEST(BiLaurent, GcdDividesBoth) {
    std::mt19937 g(9);
    for (int i = 0; i < 60; ++i) {
        auto a = random_poly(g), b = random_poly(g), c = random_poly(g);
        if (c.is_zero() || a.is_zero() || b.is_zero()) continue;
        auto h = gcd(a * c, b * c);
        EXPECT_TRUE(try_divide(a * c, h).has_value());
        EXPECT_TRUE(try_divide(b * c, h).has_value());
        EXPECT_TRUE(try_divide(h, c).has_value());
    }
}

TEST(RatFunc, ExactDivisionBecomesLaurent) {
    ratfunc r(th(2) - th(-2), th(1) + th(-1));
    EXPECT_TRUE(r.is_laurent());
    EXPECT_EQ(r.to_laurent(), th(1) - th(-1));
}

TEST(RatFunc, NormalisationIdempotentAndCrossEquality) {
    std::mt19937 g(13);
    for (int i = 0; i < 60; ++i) {
        auto a = random_poly(g), b = random_poly(g), c = random_poly(g);
        if (b.is_zero() || c.is_zero()) continue;
        ratfunc r(a * c, b * c);
        ratfunc again(r.num(), r.den());
        EXPECT_TRUE(r.structurally_equal(again));
        EXPECT_EQ(r, ratfunc(a, b));
        EXPECT_TRUE(r.structurally_equal(ratfunc(a, b)));
        EXPECT_GT(r.den().lead_coeff(), 0);
    }
}

TEST(RatFunc, FieldOperations) {
    ratfunc x(sh(1) + sh(-1), th(1) + th(-1));
    EXPECT_EQ(x * (ratfunc(1) / x), ratfunc(1));
    EXPECT_EQ(x - x, ratfunc(0));
    EXPECT_FALSE(x.is_laurent());
    EXPECT_THROW(x.to_laurent(), not_laurent);
}

TEST(IntMatrix, TextRoundTrip) {
    int_matrix m{{1, -2, 3}, {0, 4, 5}};
    EXPECT_EQ(m.str(), "2 3\n1 -2 3\n0 4 5\n");
    EXPECT_EQ(int_matrix::parse(m.str()), m);
    EXPECT_THROW(int_matrix::parse("2 2\n1 2\n3\n"), parse_error);
    EXPECT_THROW(int_matrix::parse("2 2\n1 x\n3 4\n"), parse_error);
}

TEST(Smith, Examples) {
    auto d = smith_normal_form(int_matrix::identity(3)).diagonal;
    EXPECT_EQ(d, (std::vector<integer>{1, 1, 1}));
    int_matrix m{{2, 4}, {6, 8}};
    EXPECT_EQ(smith_normal_form(m).diagonal, oracle::smith_by_minors(m));
    EXPECT_EQ(smith_normal_form(m).diagonal, (std::vector<integer>{2, 4}));
    EXPECT_EQ(smith_normal_form(int_matrix(2, 2)).diagonal, (std::vector<integer>{0, 0}));
}

TEST(Smith, TrackedTransformsAreUnimodular) {
    std::mt19937 g(17);
    for (int i = 0; i < 100; ++i) {
        std::uniform_int_distribution<int> sz(1, 5);
        auto m = random_matrix(g, sz(g), sz(g), -9, 9);
        auto r = smith_normal_form(m, true);
        auto dm = *r.u * m * *r.v;
        for (std::size_t a = 0; a < dm.rows(); ++a)
            for (std::size_t b = 0; b < dm.cols(); ++b)
                EXPECT_EQ(dm(a, b), a == b ? r.diagonal[a] : integer(0));
        EXPECT_EQ(abs(determinant(*r.u)), 1);
        EXPECT_EQ(abs(determinant(*r.v)), 1);
    }
}

TEST(Smith, AgreesWithMinorOracle) {
    std::mt19937 g(23);
    for (int i = 0; i < 300; ++i) {
        std::uniform_int_distribution<int> sz(1, 4);
        auto m = random_matrix(g, sz(g), sz(g), -9, 9);
        auto d = smith_normal_form(m).diagonal;
        EXPECT_EQ(d, oracle::smith_by_minors(m)) << m.str();
        for (std::size_t k = 0; k + 1 < d.size(); ++k) {
            if (d[k] == 0) EXPECT_EQ(d[k + 1], 0);
            else EXPECT_EQ(d[k + 1] % d[k], 0);
        }
    }
}

TEST(Inverse, Examples) {
    auto i3 = inverse_exact(int_matrix::identity(3));
    EXPECT_TRUE(i3.is_integral());
    EXPECT_EQ(i3.num, int_matrix::identity(3));
    int_matrix r{{0, 1}, {-1, 0}};
    auto ri = inverse_exact(r);
    EXPECT_EQ(ri.num, (int_matrix{{0, -1}, {1, 0}}));
    EXPECT_THROW(inverse_exact(int_matrix{{1, 2}, {2, 4}}), singular_matrix);
}

TEST(Inverse, ProductIsIdentity) {
    std::mt19937 g(29);
    int done = 0;
    while (done < 50) {
        auto m = random_matrix(g, 4, 4, -5, 5);
        if (determinant(m) == 0) continue;
        auto inv = inverse_exact(m);
        EXPECT_EQ(m * inv.num, inv.den * int_matrix::identity(4));
        ++done;
    }
}

TEST(Determinant, AgreesWithLaplace) {
    std::mt19937 g(31);
    for (int i = 0; i < 100; ++i) {
        std::uniform_int_distribution<int> sz(1, 5);
        int n = sz(g);
        auto m = random_matrix(g, n, n, -9, 9);
        EXPECT_EQ(determinant(m), oracle::laplace_det(m));
    }
}
