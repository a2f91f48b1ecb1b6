#include <cmath>
#include <cstring>
#include <numbers>

#include <gtest/gtest.h>

#include "dslab/energy.hpp"
#include "dslab/errors.hpp"
#include "dslab/solver.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;

namespace {

const LPPartition kPart = make_partition(-6, 16, 3);

SystemConfig base_config(int sigma = 1) {
    SystemConfig cfg;
    cfg.I = 1;
    cfg.sigma = sigma;
    cfg.M_order = 1;
    return cfg;
}

}  // namespace

TEST(Solver, FrozenSingularFieldMatchesBesselPair) {
    const auto bg = ConformalBackground::constant(1.0);
    const auto lat = build_lattice(2, 6);
    const auto grid = TimeGrid::log_refined(1e-4, 8, 40);
    Rng rng(41);
    AsymptoticData data = random_asymptotic_data(lat, 1, rng, 1.0, kPart, bg);
    const auto traj = solve_forward(base_config(), bg, lat, data, grid);
    for (const auto& d : lat->degrees()) {
        const double lam = d.lambda0;
        for (std::size_t g = 0; g < grid.size(); g += 7) {
            const double t = grid[g];
            double j = 1.0, yt = std::log(t);
            if (lam > 0.0) {
                const double x = 2.0 * std::sqrt(lam) * t;
                j = std::cyl_bessel_j(0.0, x);
                yt = 0.5 * std::numbers::pi * std::cyl_neumann(0.0, x) -
                     (std::log(std::sqrt(lam)) + std::numbers::egamma) * j;
            }
            for (std::int64_t i = 0; i < d.mult; ++i) {
                const std::int64_t m = d.offset + i;
                const double want = data.h[m] * j + 2.0 * data.O[m] * yt;
                const double scale = std::abs(data.h[m]) + 2.0 * std::abs(data.O[m]) * (1.0 + std::abs(std::log(t)));
                EXPECT_NEAR(traj.value(g, 0, m), want, 1e-8 * scale) << "l=" << d.l << " tau=" << t;
            }
        }
    }
}

TEST(Solver, ForwardMapIsLinear) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 8);
    const auto grid = TimeGrid::log_refined(1e-4, 6, 30);
    SystemConfig cfg = base_config();
    cfg.couplings = random_couplings(cfg, 0.1, 3);
    for_all(42, 4, [&](Rng& r) {
        auto a = random_asymptotic_data(lat, 1, r, 2.0, kPart, bg);
        auto b = random_asymptotic_data(lat, 1, r, 2.0, kPart, bg);
        return std::make_pair(a, b);
    }, [&](const std::pair<AsymptoticData, AsymptoticData>& in) {
        AsymptoticData sum(lat, 1);
        sum.O = in.first.O + in.second.O;
        sum.h = in.first.h + in.second.h;
        sum.phi0[0] = in.first.phi0[0] + in.second.phi0[0];
        const auto ta = solve_forward(cfg, bg, lat, in.first, grid);
        const auto tb = solve_forward(cfg, bg, lat, in.second, grid);
        const auto ts = solve_forward(cfg, bg, lat, sum, grid);
        const std::size_t g = grid.size() - 1;
        for (int f = 0; f < 2; ++f)
            for (std::int64_t m = 0; m < lat->mode_count(); ++m)
                EXPECT_NEAR(ts.value(g, f, m), ta.value(g, f, m) + tb.value(g, f, m), 1e-11);
    });
}

TEST(Solver, RoundTripRecoversDataDecoupledAndCoupled) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 12);
    for (int sigma : {1, 2})
        for (bool coupled : {false, true}) {
            SystemConfig cfg = base_config(sigma);
            if (coupled) cfg.couplings = random_couplings(cfg, 0.1, 9);
            const double tol = coupled ? 1e-4 : 1e-6;
            const auto rep = roundtrip_check(cfg, bg, lat, kPart, 77, tol);
            EXPECT_TRUE(rep.pass) << "sigma=" << sigma << " coupled=" << coupled;
            EXPECT_LE(rep.max_rel_error, tol);
            EXPECT_LE(rep.frak_h_defect, 1e-10);
        }
}

TEST(Solver, SplitReproducesUnsplitField) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 10);
    const auto grid = TimeGrid::log_refined(1e-4, 6, 30);
    SystemConfig cfg = base_config();
    cfg.couplings = random_couplings(cfg, 0.1, 5);
    Rng rng(43);
    const auto data = random_asymptotic_data(lat, 1, rng, 2.0, kPart, bg);
    const auto whole = solve_forward(cfg, bg, lat, data, grid);
    const auto split = split_singular_component(data, cfg, bg, lat, kPart, grid);
    double err = 0.0, scale = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g)
        for (std::int64_t m = 0; m < lat->mode_count(); ++m) {
            err = std::max(err, std::abs(split.y.value(g, 0, m) + split.j.value(g, 0, m) - whole.value(g, 0, m)));
            scale = std::max(scale, std::abs(whole.value(g, 0, m)));
        }
    EXPECT_LE(err, 1e-9 * scale);
}

TEST(Solver, DecompositionCheckPasses) {
    const auto lat = build_lattice(2, 12);
    for (int sigma : {1, 2}) {
        const auto v = decomposition_check(base_config(sigma), desitter_background(), lat, kPart, 19);
        EXPECT_TRUE(v.pass) << v.to_json().dump();
    }
}

TEST(Solver, SigmaTwoRegularRowsIgnoreSingularData) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 8);
    const auto grid = TimeGrid::log_refined(1e-4, 6, 30);
    SystemConfig cfg = base_config(2);
    cfg.couplings = {{1, 1, Psi::Kappa, 0.1}, {0, 1, Psi::One, 0.05}};
    Rng rng(44);
    auto a = random_asymptotic_data(lat, 1, rng, 2.0, kPart, bg);
    auto b = a;
    b.O = random_field(lat, rng, 2.0);
    b.h = random_field(lat, rng, 2.0);
    const auto ta = solve_forward(cfg, bg, lat, a, grid);
    const auto tb = solve_forward(cfg, bg, lat, b, grid);
    for (std::size_t g = 0; g < grid.size(); ++g)
        for (std::int64_t m = 0; m < lat->mode_count(); ++m) {
            const double x = ta.value(g, 1, m), y = tb.value(g, 1, m);
            EXPECT_EQ(std::memcmp(&x, &y, sizeof x), 0);
        }
}

TEST(Solver, SigmaTwoRejectsSingularColumnCoupling) {
    SystemConfig cfg = base_config(2);
    cfg.couplings = {{1, 0, Psi::One, 0.1}};
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Solver, ConfigValidation) {
    SystemConfig cfg = base_config();
    cfg.tau_seed = 0.5;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = base_config();
    cfg.sigma = 3;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = base_config();
    cfg.couplings = {{0, 4, Psi::One, 0.1}};
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Solver, EpsilonLadderConverges) {
    const auto bg = desitter_background();
    const auto lat = build_lattice(2, 8);
    Rng rng(45);
    const auto data = random_asymptotic_data(lat, 1, rng, 2.0, kPart, bg);
    const auto rep = epsilon_construction_check(base_config(), bg, data, 1e-3);
    ASSERT_EQ(rep.ratios.size(), 2u);
    EXPECT_TRUE(rep.monotone);
    for (double r : rep.ratios) EXPECT_GE(r, 3.0);
}
