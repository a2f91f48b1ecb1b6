#include <cmath>

#include <gtest/gtest.h>

#include "dslab/errors.hpp"
#include "dslab/lp_ops.hpp"
#include "dslab/lp_props.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;

namespace {

const LPPartition kPart = make_partition(-6, 16, 3);

}  // namespace

TEST(LpOps, HeatFlowContracts) {
    const auto lat = build_lattice(2, 24);
    const auto bg = desitter_background();
    for_all(21, 40, [&](Rng& r) { return std::make_pair(random_field(lat, r, r.uniform(0.0, 3.0)), r.log_uniform(1e-4, 1.0)); },
            [&](const std::pair<Field, double>& in) {
                const Field out = heat_flow(in.first, in.second, 0.4, bg);
                EXPECT_LE(out.l2_norm(), in.first.l2_norm() * (1 + 1e-15));
                const Field twice = heat_flow(heat_flow(in.first, in.second / 2, 0.4, bg), in.second / 2, 0.4, bg);
                for (std::int64_t i = 0; i < out.size(); ++i) EXPECT_NEAR(twice[i], out[i], 1e-14);
            });
    EXPECT_THROW(heat_flow(Field(lat), -1.0, 0.4, bg), DomainError);
}

TEST(LpOps, ProjectionsSumToIdentityOnCoveredDegrees) {
    const auto lat = build_lattice(2, 40);
    const auto bg = desitter_background();
    Rng rng(4);
    const Field f = random_field(lat, rng, 1.0, false);
    Field acc(lat);
    for (int k = kPart.k_min(); k <= kPart.k_max(); ++k) {
        const Field p = lp_project(kPart, ProjKind::Plain, k, lp_project(kPart, ProjKind::Plain, k, f, 0.5, bg), 0.5, bg);
        acc += p;
    }
    for (const auto& d : lat->degrees()) {
        if (d.l == 0) continue;
        for (std::int64_t i = 0; i < d.mult; ++i) EXPECT_NEAR(acc[d.offset + i], f[d.offset + i], 1e-12);
    }
}

TEST(LpOps, LogNablaIsMultiplier) {
    const auto lat = build_lattice(2, 16);
    const auto bg = desitter_background();
    Rng rng(6);
    const Field f = random_field(lat, rng, 0.0);
    const Field g = log_nabla(kPart, f, 0.3, bg);
    for (const auto& d : lat->degrees()) {
        const double m = kPart.log_multiplier(eigenvalue_at(bg, d.lambda0, 0.3));
        for (std::int64_t i = 0; i < d.mult; ++i) EXPECT_NEAR(g[d.offset + i], m * f[d.offset + i], 1e-14);
    }
}

TEST(LpOps, CommutatorMatchesTimeDerivative) {
    const auto bg = desitter_background();
    for_all(22, 200,
            [](Rng& r) { return std::make_tuple(r.integer(0, 8), r.log_uniform(1.0, 1e5), r.uniform(0.05, 0.95)); },
            [&](const std::tuple<int, double, double>& in) {
                const auto [k, lam0, tau] = in;
                const double h = 1e-6;
                const auto m = [&](double t) { return kPart.shell(k, eigenvalue_at(bg, lam0, t)); };
                const double fd = (m(tau + h) - m(tau - h)) / (2 * h);
                const double d = commutator_multiplier(kPart, k, lam0, tau, bg, TimeVector::Tau);
                EXPECT_NEAR(d, fd, 1e-6 * std::max(1.0, std::abs(fd)));
                EXPECT_NEAR(commutator_multiplier(kPart, k, lam0, tau, bg, TimeVector::E4), d / (2 * tau), 1e-12);
            });
}

TEST(LpOps, SobolevWeightComparableToPolynomialWeight) {
    for_all(23, 300, [](Rng& r) { return std::make_pair(r.uniform(0.0, 3.99), r.log_uniform(1e-2, 1e8)); },
            [](const std::pair<double, double>& in) {
                const auto [a, lam] = in;
                const double w = lp_sobolev_weight(kPart, a, lam);
                const double ref = std::pow(1.0 + lam, a);
                EXPECT_GT(w / ref, 1.0 / 16.0);
                EXPECT_LT(w / ref, 16.0);
            });
    EXPECT_THROW(lp_sobolev_weight(kPart, 4.0, 1.0), DomainError);
    EXPECT_THROW(lp_sobolev_weight(kPart, -0.5, 1.0), DomainError);
}

TEST(LpOps, SobolevWeightMonotoneInOrder) {
    for (double lam : {2.0, 50.0, 1e4})
        for (double a = 0.0; a + 0.25 < 4.0; a += 0.25)
            EXPECT_LE(lp_sobolev_weight(kPart, a, lam), lp_sobolev_weight(kPart, a + 0.25, lam) * (1 + 1e-12));
}

TEST(LpOps, PoincareDefectRejectsBadInput) {
    const auto lat = build_lattice(2, 8);
    const auto bg = desitter_background();
    const Field f(lat);
    EXPECT_THROW(refined_poincare_defect(kPart, -1, 1.0, f, 0.5, bg), DomainError);
    EXPECT_THROW(refined_poincare_defect(kPart, 2, 0.0, f, 0.5, bg), DomainError);
    EXPECT_EQ(refined_poincare_defect(kPart, 2, 1.0, f, 0.5, bg), 0.0);
}

TEST(LpProps, SmallSuitePasses) {
    const auto rep = check_lp_properties(kPart, 5, 40, build_lattice(2, 32), desitter_background(), 0.5);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.pass || c.informational) << c.check << " " << c.constant;
    EXPECT_TRUE(rep.all_pass());
    EXPECT_NEAR(rep.find("bessel").constant, 1.0, 1e-10);
}

TEST(LpProps, PoincareConstantFiniteAcrossResolutions) {
    const auto bg = desitter_background();
    std::vector<double> cs;
    for (int L : {32, 64})
        cs.push_back(poincare_sweep(kPart, 1.0, 3, 40, build_lattice(2, L), bg, 0.5, 12));
    for (double c : cs) {
        EXPECT_TRUE(std::isfinite(c));
        EXPECT_GT(c, 0.0);
    }
    EXPECT_LT(std::max(cs[0], cs[1]) / std::min(cs[0], cs[1]), 2.0);
}
