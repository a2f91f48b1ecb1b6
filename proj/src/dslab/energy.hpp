#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslab/lattice.hpp"
#include "dslab/partition.hpp"
#include "dslab/solver.hpp"
#include "dslab/system.hpp"
#include "dslab/verdict.hpp"

namespace dslab {

struct EnergyPoint {
    double tau = 0.0;
    double E = 0.0;
    double D = 0.0;
    double F = 0.0;
    double ratio = 0.0;
};

struct EnergyReport {
    std::string theorem;
    int M = 0;
    std::vector<EnergyPoint> points;  // ascending τ
    nlohmann::json meta = nlohmann::json::object();

    double sup_ratio() const;
    const EnergyPoint& at(double tau) const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

constexpr int kMaxEnergyOrder = 6;

// First system: the trajectory exposes Φ₀, Φ₁..Φ_I; 𝓕_I accumulates from τ = 0.
EnergyReport energy_first(const Trajectory& traj, const AsymptoticData& data, const LPPartition& part, int M);
// Second system: 𝓓_II is read at τ = 1 and 𝓕_II accumulates from τ = 1 downwards.
EnergyReport energy_second(const Trajectory& traj, const LPPartition& part, int M);

struct EnergyTriple {
    double E = 0.0;
    double D = 0.0;
    double F = 0.0;
};
EnergyTriple energy_first_at(const Trajectory& traj, const AsymptoticData& data, const LPPartition& part, int M,
                             double tau);
EnergyTriple energy_second_at(const Trajectory& traj, const LPPartition& part, int M, double tau);

struct ShellEnergy {
    int k = 0;
    double tau = 0.0;
    double a_k = 0.0;
    bool high = false;
    double X = 32.0;
    nlohmann::json to_json() const;
};

// a_k(τ) = τ|P_k ∇_τ ξ|² + |P_k ξ|²/τ + τ|∇P_k ξ|² for ξ = ∇^M of the chosen field.
ShellEnergy shell_energy(const Trajectory& traj, const LPPartition& part, int k, double tau, double X = 32.0,
                         int field = 0, int M = 0);

enum class FitModel { Power, LogSquare, Dyadic };
FitModel parse_fit_model(const std::string& name);

struct FitResult {
    double exponent = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

FitResult fit_power_exponent(const std::vector<double>& x, const std::vector<double>& y, FitModel model);

struct ShellDecayOptions {
    double tau_seed = 1e-4;
    double rtol = 1e-12;
    double atol = 1e-14;
    int frobenius_order = 12;
    double tolerance = 0.025;
};

// Toy problem on the background frozen at f(0), λ = 4^l for l in [l_lo, l_hi].
Verdict shell_decay_check(const ConformalBackground& bg, const LPPartition& part, int l_lo, int l_hi,
                          const ShellDecayOptions& opt = {});

// sup_{τ' ≥ τ} Σλ^M(1+λ)|φ_Y|² / ((1 + log²τ') Σ(1+λ(0))^{M+1}|𝒪|²), with per-decade drift below 1e-3.
Verdict singular_blowup_check(const Trajectory& traj_y, const AsymptoticData& data, int M,
                              double drift_tolerance = 0.1);

struct EnsembleSpec {
    int draws = 50;
    std::uint64_t seed = 1;
    double coupling_scale = 0.0;
    bool forcing = false;
    int M = 1;
    int I = 1;
    int n = 2;
    double tau_min = 1e-4;
    int per_decade = 8;
    int linear_points = 96;
    double drift_limit = 2.0;
    ConformalBackground background = desitter_background();
    LPPartition partition = make_partition(-6, 16, 3);
    nlohmann::json to_json() const;
};

enum class Theorem { First, Second };

Verdict verify_theorem_ratio(const EnsembleSpec& spec, Theorem which, const std::vector<int>& resolutions);

struct RoundtripReport {
    double max_rel_error = 0.0;
    double frak_h_defect = 0.0;
    double worst_condition = 0.0;
    std::vector<std::string> warnings;
    bool pass = false;
    nlohmann::json to_json() const;
};

// Forward from random data at tau_seed, backward from the state at τ = 1, then extraction.
RoundtripReport roundtrip_check(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                                const LPPartition& part, std::uint64_t seed, double tolerance,
                                double decay = 4.0);

// Y + J against the unsplit Φ₀, σ = 2 regular rows under a change of singular
// data (bitwise), and the ε-ladder for the singular component.
Verdict decomposition_check(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                            const LPPartition& part, std::uint64_t seed, double eps = 1e-3,
                            double tolerance = 1e-9);

// singular_blowup_check over `draws` random 𝒪 draws with h = 0; the split is seeded at min(tau_seed, 1e-7).
Verdict blowup_ensemble(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                        const LPPartition& part, std::uint64_t seed, int draws = 20, int M = 0,
                        double decay = 16.0);

struct BesselAgreement {
    double lambda = 0.0;
    double tau_seed = 0.0;
    double err_j = 0.0;  // max |φ_J - J₀| / modulus
    double err_y = 0.0;  // max |φ_Y - Ỹ| / (modulus · |Ỹ coefficients|)
    double remainder = 0.0;
    long steps = 0;
    nlohmann::json to_json() const;
};

// Constant background f = 1, λ fixed: integrated J/log branches against
// J₀(2√λτ) and Ỹ = (π/2)Y₀ - (log√λ + γ)J₀ on a log-refined grid.
BesselAgreement bessel_agreement(double lambda, double tau_seed, int per_decade = 10, int linear_points = 200,
                                 double rtol = 1e-12, double atol = 1e-14);
Verdict bessel_check(const std::vector<double>& lambdas, double tau_seed, double tolerance = 1e-8);

}  // namespace dslab
