#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslab/verdict.hpp"

namespace dslab {

enum class Quadrature { RightRiemann, Trapezoid };

Quadrature parse_quadrature(const std::string& name);
std::string to_string(Quadrature q);

// Sampled data for u(k,τ) ≤ A(k,τ) + b(k) ∫_τ¹ Σ_{l=x}^{k-1} c(l,τ') u(l,τ') dτ'.
// Level index i stands for k = x + i.
struct GronwallInstance {
    std::vector<double> taus;            // ascending, in (0, 1]
    int x = 0;
    int k_max = 0;
    std::vector<std::vector<double>> A;  // [level][g]
    std::vector<double> b;               // [level]
    std::vector<std::vector<double>> c;  // [level][g]
    std::string label;
    std::uint64_t seed = 0;

    int levels() const { return k_max - x + 1; }
    void validate() const;
    // Heuristic: c grows at least like 1/τ at the bottom of the grid on some level.
    bool suspect_non_integrable() const;
    nlohmann::json to_json() const;
    static GronwallInstance from_json(const nlohmann::json& j);
};

struct BoundResult {
    std::vector<std::vector<double>> bound;   // [level][g]
    std::vector<std::vector<double>> oracle;  // [level][g]
    double defect = 0.0;                      // min (bound - oracle)
    double scale = 0.0;                       // max |oracle|
    int iterations = 0;
    nlohmann::json to_json() const;
};

// Closed form b_k + Σ_{m<k} b_m c_m Π_{j=m+1}^{k-1}(1 + c_j).
std::vector<double> discrete_gronwall_bound(const std::vector<double>& b, const std::vector<double>& c);
// Direct recursion u_k = b_k + Σ_{m<k} c_m u_m.
std::vector<double> discrete_gronwall_recursion(const std::vector<double>& b, const std::vector<double>& c);

// Backward continuous Gronwall: u(τ) ≤ α(τ) + ∫_τ¹ β u gives u ≤ α + ∫_τ¹ αβ exp(∫_τ^{τ'} β).
std::vector<double> continuous_gronwall_bound(const std::vector<double>& taus, const std::vector<double>& alpha,
                                              const std::vector<double>& beta,
                                              Quadrature q = Quadrature::RightRiemann);

// The product-weighted Gronwall-like bound, evaluated with the chosen quadrature.
std::vector<std::vector<double>> gronwall_like_bound_values(const GronwallInstance& inst,
                                                            Quadrature q = Quadrature::RightRiemann);
// Maximal solution of the assumed inequality by fixed-point iteration.
std::vector<std::vector<double>> saturate_recursion(const GronwallInstance& inst,
                                                    Quadrature q = Quadrature::RightRiemann,
                                                    int* iterations = nullptr);
BoundResult gronwall_like_bound(const GronwallInstance& inst, Quadrature q = Quadrature::RightRiemann);

struct GronwallGrid {
    double lo = 1.0 / 512.0;
    double hi = 1.0;
    int points = 256;
    bool geometric = true;
    std::vector<double> taus() const;
};

// b(k) = scale·2^{-8k}/10, c(k,τ) = τ^{-3} 2^{6k} 1[τ ≥ X 2^{-k-1}], A random piecewise linear.
GronwallInstance preset_instance(const GronwallGrid& grid, int x, int k_max, std::uint64_t seed,
                                 double b_scale = 1.0, double X = 32.0);
// A, c piecewise linear with log-uniform scales, b log-uniform per level.
GronwallInstance random_instance(const GronwallGrid& grid, int x, int k_max, std::uint64_t seed,
                                 double b_scale = 1.0);

struct GronwallVerifyOptions {
    GronwallGrid grid;
    int x = 4;
    int k_max = 12;
    double b_scale = 1.0;
    double tolerance = 1e-10;
    Quadrature quadrature = Quadrature::RightRiemann;
};

// Instance i is a preset when i % 4 == 0, a preset with b×10 when i % 4 == 1, random otherwise.
Verdict verify_gronwall_lemma(std::uint64_t seed, int count, const GronwallVerifyOptions& opt = {});
// Closed form against direct recursion on random sequences, relative tolerance.
Verdict verify_discrete_gronwall(std::uint64_t seed, int count, int length = 24, double tolerance = 1e-12);

}  // namespace dslab
