#include <cmath>

#include <gtest/gtest.h>

#include "dslab/errors.hpp"
#include "dslab/gronwall.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;
using dslab::testing::positive_vector;

namespace {

GronwallInstance constant_instance(double A, double b, double c, int levels, int points) {
    GronwallInstance g;
    g.x = 0;
    g.k_max = levels - 1;
    g.taus = GronwallGrid{0.01, 1.0, points, false}.taus();
    for (int i = 0; i < levels; ++i) {
        g.A.emplace_back(g.taus.size(), A);
        g.b.push_back(b);
        g.c.emplace_back(g.taus.size(), c);
    }
    return g;
}

}  // namespace

TEST(DiscreteGronwall, HandExample) {
    const auto u = discrete_gronwall_bound({1, 1, 1}, {1, 0, 0});
    EXPECT_EQ(u, (std::vector<double>{1, 2, 2}));
    EXPECT_EQ(discrete_gronwall_bound({1, 1, 1}, {1, 1, 0}), (std::vector<double>{1, 2, 4}));
}

TEST(DiscreteGronwall, ClosedFormMatchesRecursion) {
    for_all(61, 200,
            [](Rng& r) {
                const auto n = static_cast<std::size_t>(r.integer(1, 30));
                return std::make_pair(positive_vector(r, n, 1e-3, 1e3, 0.1), positive_vector(r, n, 1e-3, 10.0, 0.1));
            },
            [](const std::pair<std::vector<double>, std::vector<double>>& in) {
                const auto a = discrete_gronwall_bound(in.first, in.second);
                const auto b = discrete_gronwall_recursion(in.first, in.second);
                for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE(dslab::testing::relative(a[k], b[k]), 1e-12);
            });
}

TEST(DiscreteGronwall, RejectsBadInput) {
    EXPECT_THROW(discrete_gronwall_bound({1, 2}, {1}), DomainError);
    EXPECT_THROW(discrete_gronwall_bound({1, -2}, {1, 1}), DomainError);
    EXPECT_THROW(discrete_gronwall_recursion({1, NAN}, {1, 1}), DomainError);
}

TEST(Gronwall, ZeroCouplingReturnsA) {
    auto g = constant_instance(2.0, 0.5, 0.0, 4, 32);
    const auto r = gronwall_like_bound(g);
    EXPECT_EQ(r.bound, g.A);
    EXPECT_EQ(r.oracle, g.A);
    EXPECT_EQ(r.defect, 0.0);
}

TEST(Gronwall, SingleLevelIsA) {
    auto g = constant_instance(3.0, 1.0, 2.0, 1, 32);
    const auto r = gronwall_like_bound(g);
    EXPECT_EQ(r.bound, g.A);
}

TEST(Gronwall, TwoConstantLevels) {
    // u_1 ≤ A + b ∫_τ¹ c A: right-Riemann on a uniform grid is exact for constants.
    const double A = 1.5, b = 0.3, c = 2.0;
    auto g = constant_instance(A, b, c, 2, 101);
    const auto r = gronwall_like_bound(g);
    for (std::size_t i = 0; i < g.taus.size(); ++i)
        EXPECT_NEAR(r.bound[1][i], A * (1.0 + b * c * (1.0 - g.taus[i])), 1e-12);
    EXPECT_GE(r.defect, -1e-12);
}

TEST(Gronwall, BoundDominatesOracleOnRandomInstances) {
    for_all(62, 24, [](Rng& r) { return r.bits(); }, [](std::uint64_t s) {
        GronwallGrid grid;
        grid.points = 64;
        for (auto inst : {random_instance(grid, 2, 8, s), preset_instance(grid, 4, 10, s, 10.0)}) {
            const auto r = gronwall_like_bound(inst);
            EXPECT_GE(r.defect, -1e-10 * r.scale) << inst.label;
        }
    });
}

TEST(Gronwall, BoundMonotoneInA) {
    GronwallGrid grid;
    grid.points = 48;
    auto inst = random_instance(grid, 0, 5, 99);
    const auto lo = gronwall_like_bound_values(inst);
    for (auto& row : inst.A)
        for (auto& a : row) a *= 1.5;
    const auto hi = gronwall_like_bound_values(inst);
    for (std::size_t i = 0; i < lo.size(); ++i)
        for (std::size_t g = 0; g < lo[i].size(); ++g) EXPECT_NEAR(hi[i][g], 1.5 * lo[i][g], 1e-12 * hi[i][g]);
}

TEST(Gronwall, ContinuousBoundConstantCoefficients) {
    const auto t = GronwallGrid{0.001, 1.0, 4001, false}.taus();
    const std::vector<double> alpha(t.size(), 1.0), beta(t.size(), 2.0);
    const auto u = continuous_gronwall_bound(t, alpha, beta, Quadrature::Trapezoid);
    for (std::size_t g = 0; g < t.size(); g += 400) EXPECT_NEAR(u[g], std::exp(2.0 * (1.0 - t[g])), 1e-5);
}

TEST(Gronwall, ValidationAndJson) {
    GronwallGrid grid;
    grid.points = 16;
    auto inst = preset_instance(grid, 4, 8, 1);
    const auto back = GronwallInstance::from_json(inst.to_json());
    EXPECT_EQ(back.A, inst.A);
    EXPECT_EQ(back.c, inst.c);
    EXPECT_EQ(back.b, inst.b);
    inst.A[0][3] = -1.0;
    EXPECT_THROW(inst.validate(), DomainError);
    auto rev = preset_instance(grid, 4, 8, 1);
    std::swap(rev.taus[2], rev.taus[3]);
    EXPECT_THROW(rev.validate(), DomainError);
    EXPECT_THROW(parse_quadrature("simpson"), DomainError);
    EXPECT_EQ(parse_quadrature(to_string(Quadrature::Trapezoid)), Quadrature::Trapezoid);
}

TEST(Gronwall, NonIntegrableHeuristic) {
    GronwallGrid grid;
    grid.points = 32;
    auto inst = random_instance(grid, 0, 2, 3);
    EXPECT_FALSE(inst.suspect_non_integrable());
    for (std::size_t g = 0; g < inst.taus.size(); ++g) inst.c[1][g] = 1.0 / (inst.taus[g] * inst.taus[g]);
    EXPECT_TRUE(inst.suspect_non_integrable());
}

TEST(Gronwall, VerifyIsDeterministic) {
    GronwallVerifyOptions opt;
    opt.grid.points = 64;
    const auto a = verify_gronwall_lemma(8, 12, opt);
    const auto b = verify_gronwall_lemma(8, 12, opt);
    EXPECT_TRUE(a.pass);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}
