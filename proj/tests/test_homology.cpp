#include <gtest/gtest.h>

#include <random>

#include <symknot/homology.hpp>

#include "oracles.hpp"

using namespace symknot;

namespace {

int_matrix load_mat(const std::string& name) { return int_matrix::parse(oracle::read_file(oracle::fixture(name))); }

const int_matrix trefoil{{-1, 1}, {0, -1}};

std::map<int, integer> as_map(const laurent1& p) { return {p.terms().begin(), p.terms().end()}; }

std::vector<long long> factors(const abelian_group& g) {
    std::vector<long long> r;
    for (auto& f : g.factors) r.push_back(f.convert_to<long long>());
    return r;
}

// random symmetric part plus one unit per symplectic pair, so V - V^T is
// the standard symplectic form
int_matrix random_seifert(std::mt19937& g, int genus) {
    int n = 2 * genus;
    std::uniform_int_distribution<int> v(-2, 2);
    int_matrix s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) s(i, j) = s(j, i) = v(g);
    for (int i = 0; i < genus; ++i) s(2 * i, 2 * i + 1) += 1;
    return s;
}

int_matrix random_unimodular(std::mt19937& g, int n) {
    int_matrix p = int_matrix::identity(n);
    std::uniform_int_distribution<int> idx(0, n - 1), c(-2, 2);
    for (int k = 0; k < 3 * n; ++k) {
        int a = idx(g), b = idx(g);
        if (a != b) p.add_row(a, b, c(g));
    }
    return p;
}

} // namespace

TEST(Homology, TrefoilGamma) {
    auto gm = gamma(trefoil);
    // Gamma (V^T - V) = -V
    EXPECT_EQ(gm * (trefoil.transpose() - trefoil), -trefoil);
}

TEST(Homology, FixturesGammaIntegral) {
    for (auto name : {"V_D4_twist2.mat", "V_D4prime_twist2.mat"}) {
        auto v = load_mat(name);
        auto gm = gamma(v);
        EXPECT_EQ(gm * (v.transpose() - v), -v);
    }
}

TEST(Homology, NotUnimodular) {
    EXPECT_THROW(gamma(int_matrix{{1, 0}, {0, 1}}), not_unimodular);
    EXPECT_THROW(gamma(int_matrix{{0, 2}, {0, 0}}), not_unimodular);
}

TEST(Homology, FixtureCoverGroups) {
    auto g = h1_branched_cover(load_mat("V_D4_twist2.mat"), 3);
    EXPECT_EQ(factors(g), (std::vector<long long>{7, 7, 7, 7}));
    EXPECT_EQ(g.free_rank, 0);
    EXPECT_EQ(g.str(), "7 7 7 7");
    auto gp = h1_branched_cover(load_mat("V_D4prime_twist2.mat"), 3);
    EXPECT_EQ(factors(gp), (std::vector<long long>{49, 49}));
    EXPECT_EQ(gp.str(), "49 49");
}

TEST(Homology, ResultantCrossCheck) {
    for (auto name : {"V_D4_twist2.mat", "V_D4prime_twist2.mat"}) {
        auto v = load_mat(name);
        auto delta = as_map(alexander_polynomial(v));
        EXPECT_EQ(oracle::cover_order_numeric(delta, 3), 2401);
        EXPECT_EQ(cover_order_by_resultant(v, 3), 2401);
    }
}

TEST(Homology, TrefoilAlexanderAndCovers) {
    auto delta = alexander_polynomial(trefoil);
    EXPECT_EQ(as_map(delta), (std::map<int, integer>{{-1, 1}, {0, -1}, {1, 1}}));
    for (int k : {2, 3}) {
        auto g = h1_branched_cover(trefoil, k);
        EXPECT_EQ(g.order(), oracle::cover_order_numeric(as_map(delta), k));
        EXPECT_EQ(g.order(), cover_order_by_resultant(trefoil, k));
    }
}

TEST(Homology, DoubleCoverIsDeterminant) {
    for (auto name : {"V_D4_twist2.mat", "V_D4prime_twist2.mat"}) {
        auto v = load_mat(name);
        auto p = branched_presentation(v, 2);
        auto gm = gamma(v);
        EXPECT_EQ(p, integer(2) * gm - int_matrix::identity(v.rows()));
        EXPECT_EQ(abs(determinant(p)), abs(determinant(v + v.transpose())));
        EXPECT_EQ(h1_branched_cover(v, 2).order(), abs(determinant(v + v.transpose())));
    }
}

TEST(Homology, RandomSeifertForms) {
    std::mt19937 g(17);
    int checked = 0;
    while (checked < 20) {
        auto v = random_seifert(g, 1 + checked % 3);
        if (abs(determinant(v.transpose() - v)) != 1) continue;
        auto delta = as_map(alexander_polynomial(v));
        for (int k : {2, 3}) {
            auto grp = h1_branched_cover(v, k);
            integer res = cover_order_by_resultant(v, k);
            EXPECT_EQ(res, oracle::cover_order_numeric(delta, k));
            if (grp.free_rank == 0) EXPECT_EQ(grp.order(), res);
            else EXPECT_EQ(res, 0);
        }
        ++checked;
    }
}

TEST(Homology, CongruenceInvariance) {
    std::mt19937 g(5);
    for (auto name : {"V_D4_twist2.mat", "V_D4prime_twist2.mat"}) {
        auto v = load_mat(name);
        for (int i = 0; i < 3; ++i) {
            auto p = random_unimodular(g, static_cast<int>(v.rows()));
            auto w = p.transpose() * v * p;
            EXPECT_EQ(h1_branched_cover(w, 3), h1_branched_cover(v, 3));
        }
    }
}

TEST(Homology, AlexanderNormalised) {
    for (auto name : {"V_D4_twist2.mat", "V_D4prime_twist2.mat"}) {
        auto delta = alexander_polynomial(load_mat(name));
        integer at1 = 0;
        for (auto& [e, c] : delta.terms()) at1 += c;
        EXPECT_EQ(at1, 1);
        EXPECT_EQ(delta.terms().begin()->first, -delta.terms().rbegin()->first);
    }
}
