#include <cmath>

#include <gtest/gtest.h>

#include "dslab/errors.hpp"
#include "dslab/partition.hpp"
#include "generators.hpp"

using namespace dslab;
using dslab::testing::for_all;

TEST(Partition, UnityOnCoveredSpectrum) {
    for (int p : {1, 2, 3, 5}) {
        const auto part = make_partition(-6, 16, p);
        for_all(100 + p, 400, [&](Rng& r) { return r.log_uniform(part.covered_lo(), part.covered_hi()); },
                [&](double mu) { EXPECT_NEAR(part.unity(mu), 1.0, 1e-12) << "mu=" << mu; });
    }
}

TEST(Partition, BumpSupportAndRange) {
    const auto part = make_partition(-6, 16, 3);
    EXPECT_EQ(part.bump(1.0), 1.0);
    EXPECT_EQ(part.bump(4.0 * 1.0001), 0.0);
    EXPECT_EQ(part.bump(0.25 / 1.0001), 0.0);
    EXPECT_EQ(part.bump(0.0), 0.0);
    for_all(7, 300, [](Rng& r) { return r.log_uniform(1e-3, 1e3); }, [&](double mu) {
        const double m = part.bump(mu);
        EXPECT_GE(m, 0.0);
        EXPECT_LE(m, 1.0);
    });
}

TEST(Partition, DerivativeMatchesFiniteDifference) {
    const auto part = make_partition(-6, 16, 3);
    for_all(8, 200, [](Rng& r) { return r.uniform(0.26, 3.9); }, [&](double mu) {
        const double h = 1e-6 * mu;
        const double fd = (part.bump(mu + h) - part.bump(mu - h)) / (2 * h);
        EXPECT_NEAR(part.bump_dmu(mu), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    });
}

TEST(Partition, LogMultiplierIsDirectSum) {
    const auto part = make_partition(-6, 16, 3);
    for_all(9, 200, [](Rng& r) { return r.log_uniform(1e-2, 1e9); }, [&](double lam) {
        double acc = 0.0;
        for (int k = 0; k <= 16; ++k) {
            const double m = part.bump(std::ldexp(lam, -2 * k));
            acc += m * m * k * std::log(2.0);
        }
        EXPECT_NEAR(part.log_multiplier(lam), acc, 1e-12 * std::max(1.0, acc));
    });
}

TEST(Partition, ShellsTwoApartAreDisjoint) {
    const auto part = make_partition(-6, 16, 2);
    for_all(10, 300, [](Rng& r) { return std::make_pair(r.integer(0, 12), r.log_uniform(1e-1, 1e9)); },
            [&](const std::pair<int, double>& in) {
                EXPECT_EQ(part.shell(in.first, in.second) * part.shell(in.first + 2, in.second), 0.0);
            });
}

TEST(Partition, MultiplierKinds) {
    const auto part = make_partition(-6, 16, 3);
    const double mu = 1.7;
    EXPECT_DOUBLE_EQ(part.multiplier(ProjKind::Plain, mu), part.bump(mu));
    EXPECT_DOUBLE_EQ(part.multiplier(ProjKind::Tilde, mu), -part.bump_dmu(mu));
    EXPECT_DOUBLE_EQ(part.multiplier(ProjKind::Dot, mu), part.bump(mu) / mu);
    EXPECT_DOUBLE_EQ(part.multiplier(ProjKind::Underline, mu), std::sqrt(part.bump(mu)));
    EXPECT_EQ(parse_proj_kind(to_string(ProjKind::UnderlineTilde)), ProjKind::UnderlineTilde);
    EXPECT_THROW(parse_proj_kind("nope"), DomainError);
}

TEST(Partition, ShiftMovesSupport) {
    const auto part = make_partition(-6, 16, 3);
    const auto s = part.shifted(0.5);
    EXPECT_NEAR(s.bump(2.0), part.bump(1.0), 1e-14);
    EXPECT_NEAR(s.covered_lo(), 2.0 * part.covered_lo(), 1e-12 * s.covered_lo());
}
