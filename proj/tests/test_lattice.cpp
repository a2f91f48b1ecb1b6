#include <cmath>

#include <gtest/gtest.h>

#include "dslab/errors.hpp"
#include "dslab/lattice.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;

namespace {

// Dimension of degree-l harmonics on S^n by counting monomials in n+1 variables.
std::int64_t monomials(int deg, int vars) {
    if (deg < 0) return 0;
    std::int64_t r = 1;
    for (int i = 1; i < vars; ++i) r = r * (deg + i) / i;
    return r;
}

}  // namespace

TEST(Lattice, MultiplicityMatchesMonomialCount) {
    for (int n = 1; n <= 5; ++n)
        for (int l = 0; l <= 20; ++l)
            EXPECT_EQ(harmonic_multiplicity(l, n), monomials(l, n + 1) - monomials(l - 2, n + 1)) << n << " " << l;
}

TEST(Lattice, TwoSphereMultiplicities) {
    EXPECT_EQ(harmonic_multiplicity(0, 2), 1);
    EXPECT_EQ(harmonic_multiplicity(1, 2), 3);
    EXPECT_EQ(harmonic_multiplicity(2, 2), 5);
    EXPECT_EQ(harmonic_multiplicity(2, 3), 9);
}

TEST(Lattice, EigenvaluesAndOffsets) {
    const auto lat = build_lattice(2, 6);
    std::int64_t off = 0;
    for (const auto& d : lat->degrees()) {
        EXPECT_DOUBLE_EQ(d.lambda0, d.l * (d.l + 1.0));
        EXPECT_EQ(d.offset, off);
        for (std::int64_t i = 0; i < d.mult; ++i) EXPECT_EQ(lat->degree_of(d.offset + i), d.l);
        off += d.mult;
    }
    EXPECT_EQ(lat->mode_count(), 49);
}

TEST(Lattice, RejectsBadInput) {
    EXPECT_THROW(build_lattice(0, 4), DomainError);
    EXPECT_THROW(build_lattice(2, -1), DomainError);
    EXPECT_THROW(harmonic_multiplicity(-1, 2), DomainError);
}

TEST(Background, KappaMatchesFiniteDifference) {
    const auto bg = ConformalBackground::polynomial({1.0, 0.3, -0.2, 0.05});
    for (double t : {0.05, 0.2, 0.5, 0.9}) {
        const double h = 1e-6;
        const double fd = (bg.f(t + h) - bg.f(t - h)) / (2 * h);
        EXPECT_NEAR(bg.f_prime(t), fd, 1e-8);
        EXPECT_NEAR(bg.kappa(t), fd / (t * bg.f(t)), 1e-7);
    }
}

TEST(Background, DeSitterValues) {
    const auto bg = desitter_background();
    EXPECT_DOUBLE_EQ(bg.f(0.0), 0.5);
    EXPECT_DOUBLE_EQ(bg.f(1.0), 2.5);
    EXPECT_DOUBLE_EQ(bg.kappa(0.0), 8.0);
    EXPECT_DOUBLE_EQ(eigenvalue_at(bg, 2.0, 0.0), 8.0);
    EXPECT_TRUE(ConformalBackground::constant(2.0).is_static());
    EXPECT_FALSE(bg.is_static());
}

TEST(Background, InverseSeriesProperty) {
    for_all(11, 30,
            [](Rng& r) {
                return std::vector<double>{r.uniform(0.5, 2.0), r.uniform(-0.3, 0.3), r.uniform(-0.1, 0.1)};
            },
            [](const std::vector<double>& a) {
                const auto bg = ConformalBackground::polynomial(a);
                const auto inv = bg.inv_f_series(10);
                const auto prod = series_mul(inv, a, 10);
                EXPECT_NEAR(prod[0], 1.0, 1e-14);
                for (int r = 1; r <= 10; ++r) EXPECT_NEAR(prod[static_cast<std::size_t>(r)], 0.0, 1e-12);
                const double s = 0.01;
                double v = 0.0;
                for (int r = 10; r >= 0; --r) v = v * s + inv[static_cast<std::size_t>(r)];
                EXPECT_NEAR(v, 1.0 / bg.f(0.1), 1e-12);
            });
}

TEST(Series, ReciprocalRoundTrip) {
    const std::vector<double> a{2.0, -1.0, 0.5, 0.25};
    const auto b = series_reciprocal(a, 8);
    const auto p = series_mul(a, b, 8);
    EXPECT_NEAR(p[0], 1.0, 1e-15);
    for (std::size_t i = 1; i < p.size(); ++i) EXPECT_NEAR(p[i], 0.0, 1e-14);
}

TEST(TimeGrid, LogRefinedInvariants) {
    for (int pd : {4, 8, 16})
        for (double tmin : {1e-6, 1e-4, 1e-2}) {
            const auto g = TimeGrid::log_refined(tmin, pd, 50);
            EXPECT_DOUBLE_EQ(g.front(), tmin);
            EXPECT_DOUBLE_EQ(g.back(), 1.0);
            for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
            EXPECT_EQ(g.nearest(1.0), g.size() - 1);
            const auto sub = g.restricted(0.2, 0.6);
            EXPECT_DOUBLE_EQ(sub.front(), 0.2);
            EXPECT_DOUBLE_EQ(sub.back(), 0.6);
        }
}

TEST(Field, AlgebraAndPower) {
    const auto lat = build_lattice(2, 5);
    Rng rng(3);
    const Field a = random_field(lat, rng, 1.0), b = random_field(lat, rng, 1.0);
    const Field c = a + 2.0 * b - b;
    for (std::int64_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], a[i] + b[i], 1e-15);
    const auto p = a.degree_power();
    double tot = 0.0;
    for (double x : p) tot += x;
    EXPECT_NEAR(std::sqrt(tot), a.l2_norm(), 1e-13);
    const Field back = Field::from_json(a.to_json());
    EXPECT_EQ(back.coeffs(), a.coeffs());
    EXPECT_THROW(check_same_lattice(a, Field(build_lattice(2, 4))), DomainError);
}

TEST(Field, SobolevNormMatchesDirectSum) {
    const auto lat = build_lattice(2, 8);
    const auto bg = desitter_background();
    Rng rng(5);
    const Field a = random_field(lat, rng, 2.0);
    double acc = 0.0;
    for (const auto& d : lat->degrees())
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const double lam = d.lambda0 / (bg.f(0.3) * bg.f(0.3));
            acc += (1.0 + lam) * a[d.offset + i] * a[d.offset + i];
        }
    EXPECT_NEAR(sobolev_norm(a, 1.0, 0.3, bg), std::sqrt(acc), 1e-12);
}
