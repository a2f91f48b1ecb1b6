#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dslab {

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double h_init = 0.0;
    long max_steps = 20'000'000;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long evals = 0;
};

using OdeRhs = std::function<void(double t, const double* y, double* dy)>;
using OdeSink = std::function<void(std::size_t index, const std::vector<double>& y)>;

// Dormand-Prince 8(5,3) with step clipping so that every target is hit exactly.
// Targets must be monotone in the direction of integration.
OdeStats dop853(const OdeRhs& f, double t0, std::vector<double>& y, const std::vector<double>& targets,
                const OdeSink& sink, const OdeOptions& opt);

}  // namespace dslab
