#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dslab/rng.hpp"

namespace dslab::testing {

// Runs `body` on `cases` generated inputs; the seed of a failing case is reported.
template <class Gen, class Body>
void for_all(std::uint64_t seed, int cases, Gen gen, Body body) {
    for (int i = 0; i < cases; ++i) {
        const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
        Rng rng(s);
        auto input = gen(rng);
        SCOPED_TRACE("case " + std::to_string(i) + " seed " + std::to_string(s));
        body(input);
        if (::testing::Test::HasFatalFailure()) return;
    }
}

inline std::vector<double> positive_vector(Rng& rng, std::size_t n, double lo, double hi, double zero_p = 0.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform() < zero_p ? 0.0 : rng.log_uniform(lo, hi);
    return v;
}

inline double relative(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace dslab::testing
