#include <cmath>

#include <gtest/gtest.h>

#include "dslab/energy.hpp"
#include "dslab/errors.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;

namespace {

const LPPartition kPart = make_partition(-6, 16, 3);

SystemConfig base_config() {
    SystemConfig cfg;
    cfg.I = 1;
    cfg.sigma = 1;
    return cfg;
}

}  // namespace

TEST(Fit, RecoversExactExponents) {
    for_all(51, 50, [](Rng& r) { return std::make_pair(r.uniform(-3.0, 3.0), r.log_uniform(1e-3, 1e3)); },
            [](const std::pair<double, double>& in) {
                const auto [p, c] = in;
                std::vector<double> x, yp, yd, yl;
                for (int i = 1; i <= 8; ++i) {
                    const double xi = 0.1 * i;
                    x.push_back(xi);
                    yp.push_back(c * std::pow(xi, p));
                    yl.push_back(c * std::pow(1.0 + std::log(xi) * std::log(xi), p));
                }
                std::vector<double> l;
                for (int i = 4; i <= 12; ++i) {
                    l.push_back(i);
                    yd.push_back(c * std::exp2(p * i));
                }
                EXPECT_NEAR(fit_power_exponent(x, yp, FitModel::Power).exponent, p, 1e-12);
                EXPECT_NEAR(fit_power_exponent(x, yl, FitModel::LogSquare).exponent, p, 1e-12);
                const auto fd = fit_power_exponent(l, yd, FitModel::Dyadic);
                EXPECT_NEAR(fd.exponent, p, 1e-12);
                EXPECT_LT(fd.residual, 1e-12);
            });
}

TEST(Fit, RejectsBadInput) {
    const std::vector<double> x{1, 2, 3, 4}, y{1, 2, 3, 4};
    EXPECT_THROW(fit_power_exponent({1, 2, 3}, {1, 2, 3}, FitModel::Power), DomainError);
    EXPECT_THROW(fit_power_exponent(x, {1, 2, 0, 4}, FitModel::Power), DomainError);
    EXPECT_THROW(fit_power_exponent({1, 1, 1, 1}, y, FitModel::Dyadic), DomainError);
    EXPECT_THROW(fit_power_exponent({-1, 2, 3, 4}, y, FitModel::Power), DomainError);
    EXPECT_THROW(parse_fit_model("cubic"), DomainError);
    EXPECT_EQ(parse_fit_model("dyadic"), FitModel::Dyadic);
}

TEST(Energy, ZeroDataGivesZeroRatio) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 8);
    const AsymptoticData data(lat, 1);
    const auto traj = solve_forward(base_config(), bg, lat, data, TimeGrid::log_refined(1e-4, 4, 20));
    const auto rep = energy_first(traj, data, kPart, 1);
    for (const auto& p : rep.points) {
        EXPECT_EQ(p.E, 0.0);
        EXPECT_EQ(p.ratio, 0.0);
    }
    EXPECT_EQ(rep.sup_ratio(), 0.0);
}

TEST(Energy, FirstDataNormIsWeightedSum) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 10);
    Rng rng(52);
    const auto data = random_asymptotic_data(lat, 1, rng, 2.0, kPart, bg);
    const auto grid = TimeGrid::log_refined(1e-4, 4, 20);
    const auto traj = solve_forward(base_config(), bg, lat, data, grid);
    for (int M : {0, 1, 2}) {
        double D = 0.0;
        for (const auto& d : lat->degrees()) {
            const double w = std::pow(1.0 + d.lambda0 / (bg.f(0) * bg.f(0)), M + 1);
            for (std::int64_t i = 0; i < d.mult; ++i) {
                const std::int64_t m = d.offset + i;
                D += w * (data.O[m] * data.O[m] + data.frak_h[m] * data.frak_h[m] + data.phi0[0][m] * data.phi0[0][m]);
            }
        }
        const auto t = energy_first_at(traj, data, kPart, M, grid[5]);
        EXPECT_NEAR(t.D, D, 1e-12 * D);
        EXPECT_EQ(t.F, 0.0);
        EXPECT_GT(t.E, 0.0);
    }
    EXPECT_THROW(energy_first_at(traj, data, kPart, 1, 0.123456789), DomainError);
    EXPECT_THROW(energy_first(traj, data, kPart, kMaxEnergyOrder + 1), DomainError);
}

TEST(Energy, SecondEnergyIsMonotoneDownwardWithoutForcing) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 10);
    Rng rng(53);
    const auto data = random_asymptotic_data(lat, 1, rng, 3.0, kPart, bg);
    const auto traj = solve_forward(base_config(), bg, lat, data, TimeGrid::log_refined(1e-4, 4, 20));
    const auto rep = energy_second(traj, kPart, 1);
    ASSERT_FALSE(rep.points.empty());
    const double D = rep.points.back().D;
    for (const auto& p : rep.points) {
        EXPECT_EQ(p.D, D);
        EXPECT_TRUE(std::isfinite(p.ratio));
    }
}

TEST(Energy, ShellRegimeThreshold) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 16);
    Rng rng(54);
    const auto data = random_asymptotic_data(lat, 1, rng, 2.0, kPart, bg);
    const auto grid = TimeGrid::log_refined(1e-4, 8, 40);
    const auto traj = solve_forward(base_config(), bg, lat, data, grid);
    for (int k = 0; k <= 8; ++k)
        for (std::size_t g = 0; g < grid.size(); g += 5) {
            const auto se = shell_energy(traj, kPart, k, grid[g]);
            EXPECT_EQ(se.high, grid[g] >= 32.0 * std::exp2(-k - 1));
            EXPECT_GE(se.a_k, 0.0);
        }
    EXPECT_THROW(shell_energy(traj, kPart, 40, grid[0]), DomainError);
}

TEST(Energy, ShellDecayHalfPower) {
    const auto v = shell_decay_check(desitter_background(), kPart, 4, 12);
    EXPECT_TRUE(v.pass) << v.to_json().dump();
    EXPECT_NEAR(v.detail["slope_J"].get<double>(), -0.5, 0.025);
    EXPECT_NEAR(v.detail["slope_Y"].get<double>(), -0.5, 0.025);
}

TEST(Energy, BesselAgreementSmallLambda) {
    for (double lam : {1.0, 100.0}) {
        const auto a = bessel_agreement(lam, 1e-4);
        EXPECT_LE(a.err_j, 1e-8);
        EXPECT_LE(a.err_y, 1e-8);
    }
}

TEST(Energy, BlowupStatisticVanishesForZeroSingularData) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 6);
    AsymptoticData data(lat, 1);
    Rng rng(55);
    data.h = random_field(lat, rng, 2.0);
    SystemConfig cfg = base_config();
    const auto split = split_singular_component(data, cfg, bg, lat, kPart, TimeGrid::log_refined(1e-4, 4, 20));
    const auto v = singular_blowup_check(split.y, data, 0);
    EXPECT_EQ(v.statistic, 0.0);
    EXPECT_TRUE(v.pass);
}

TEST(Energy, TheoremRatioSmallEnsemble) {
    EnsembleSpec spec;
    spec.draws = 3;
    spec.seed = 5;
    spec.coupling_scale = 0.1;
    spec.forcing = true;
    for (auto which : {Theorem::First, Theorem::Second}) {
        const auto v = verify_theorem_ratio(spec, which, {16, 32});
        EXPECT_TRUE(v.pass) << v.to_json().dump();
        EXPECT_TRUE(std::isfinite(v.statistic));
    }
    EXPECT_THROW(verify_theorem_ratio(spec, Theorem::First, {16}), DomainError);
    spec.draws = 0;
    EXPECT_THROW(verify_theorem_ratio(spec, Theorem::First, {16, 32}), DomainError);
}
