#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dslab/bessel.hpp"
#include "dslab/dop853.hpp"
#include "dslab/errors.hpp"
#include "dslab/frobenius.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;

TEST(Bessel, AgreesWithStandardLibrary) {
    for_all(31, 500, [](Rng& r) { return r.log_uniform(1e-6, 400.0); }, [](double x) {
        const double j = std::cyl_bessel_j(0.0, x), y = std::cyl_neumann(0.0, x);
        const double mod = std::hypot(j, y);
        EXPECT_NEAR(bessel_j0(x), j, 1e-13 * std::max(1.0, mod)) << x;
        EXPECT_NEAR(bessel_y0(x), y, 1e-13 * std::max(1.0, mod)) << x;
    });
}

TEST(Bessel, ReferenceValues) {
    // 30-digit reference values.
    const double ref[][3] = {
        {1e-05, 0.999999999975, -7.4031602837019700805},
        {0.5, 0.93846980724081290423, -0.44451873350670655715},
        {3.0, -0.26005195490193343762, 0.37685001001279038197},
        {8.0, 0.17165080713755390609, 0.22352148938756622053},
        {15.0, -0.014224472826780773234, 0.20546429603891826479},
        {19.9, 0.17287775639261846235, 0.045762094159385478714},
        {20.1, 0.15953606793729709074, 0.078810592428750292646},
        {60.0, -0.091471804089061869531, 0.047358952209449399203},
        {390.0, 0.038046171819133623638, -0.013595802995503303449},
    };
    for (const auto& r : ref) {
        EXPECT_NEAR(bessel_j0(r[0]), r[1], 1e-16 + 2e-16 * std::abs(r[1])) << r[0];
        EXPECT_NEAR(bessel_y0(r[0]), r[2], 1e-16 + 2e-16 * std::abs(r[2])) << r[0];
    }
    EXPECT_THROW(bessel_y0(0.0), DomainError);
}

TEST(Bessel, OracleScaling) {
    EXPECT_DOUBLE_EQ(bessel_oracle('J', 4.0, 0.25), bessel_j0(1.0));
    EXPECT_DOUBLE_EQ(bessel_oracle('Y', 4.0, 0.25), bessel_y0(1.0));
}

TEST(Dop853, HarmonicOscillator) {
    std::vector<double> y{1.0, 0.0};
    std::vector<double> targets;
    for (int i = 1; i <= 20; ++i) targets.push_back(i * 0.5);
    std::vector<double> got(targets.size());
    OdeOptions opt;
    const auto stats = dop853([](double, const double* u, double* du) { du[0] = u[1]; du[1] = -u[0]; }, 0.0, y,
                              targets, [&](std::size_t i, const std::vector<double>& u) { got[i] = u[0]; }, opt);
    for (std::size_t i = 0; i < targets.size(); ++i) EXPECT_NEAR(got[i], std::cos(targets[i]), 1e-11);
    EXPECT_GT(stats.steps, 0);
}

TEST(Dop853, BackwardExponentialHitsTargetsExactly) {
    for_all(32, 20, [](Rng& r) { return r.uniform(-3.0, 3.0); }, [](double a) {
        std::vector<double> y{1.0};
        const std::vector<double> targets{0.75, 0.5, 0.1, 0.0};
        std::vector<double> got(targets.size());
        OdeOptions opt;
        dop853([a](double, const double* u, double* du) { du[0] = a * u[0]; }, 1.0, y, targets,
               [&](std::size_t i, const std::vector<double>& u) { got[i] = u[0]; }, opt);
        for (std::size_t i = 0; i < targets.size(); ++i)
            EXPECT_NEAR(got[i], std::exp(a * (targets[i] - 1.0)), 1e-12 * std::exp(std::abs(a)));
    });
}

TEST(Frobenius, DecoupledSeriesMatchBesselClosedForms) {
    const auto bg = ConformalBackground::constant(1.0);
    for (double lam : {0.5, 3.0, 40.0}) {
        const auto s = frobenius_basis(lam, bg, 24);
        const double k = 2.0 * std::sqrt(lam);
        const double shift = std::log(std::sqrt(lam)) + std::numbers::egamma;
        for (double tau : {1e-4, 1e-3, 1e-2, 0.05}) {
            const double j = std::cyl_bessel_j(0.0, k * tau);
            const double y = 0.5 * std::numbers::pi * std::cyl_neumann(0.0, k * tau) - shift * j;
            EXPECT_NEAR(SeriesPair::eval(s.j, tau), j, 1e-13);
            EXPECT_NEAR(SeriesPair::eval(s.y, tau), y, 1e-12 * std::max(1.0, std::abs(y)));
        }
    }
}

TEST(Frobenius, ValidateThrowsForLargeSeed) {
    LinearSystem sys;
    sys.N = 1;
    sys.sign = {1};
    const FrobeniusBasis fb(sys, desitter_background(), 1e6, 4);
    EXPECT_NO_THROW(fb.validate(1e-7, 1e-6));
    EXPECT_THROW(fb.validate(0.5, 1e-12), SeedingError);
}

TEST(Frobenius, RegularBranchForNegativeSign) {
    LinearSystem sys;
    sys.N = 1;
    sys.sign = {-1};
    const FrobeniusBasis fb(sys, desitter_background(), 6.0, 12);
    // Column 1 starts with τ² and carries no logarithms.
    EXPECT_EQ(fb.coeff(0, 0, 0, 1), 0.0);
    EXPECT_EQ(fb.coeff(1, 0, 0, 1), 1.0);
    for (int p = 0; p <= 12; ++p)
        for (int q = 1; q <= FrobeniusBasis::kLogPowers; ++q) EXPECT_EQ(fb.coeff(p, q, 0, 1), 0.0);
}
