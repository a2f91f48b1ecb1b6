#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslab/lattice.hpp"

namespace dslab {

enum class Psi { One, Kappa, Tau2Kappa };

Psi parse_psi(const std::string& name);
std::string to_string(Psi psi);
double psi_value(Psi psi, const ConformalBackground& bg, double tau);

struct Coupling {
    int row = 0;
    int col = 0;
    Psi psi = Psi::One;
    double scale = 0.0;
};

enum class ForcingShape { Zero, Bump, Pulse };
enum class SpatialKind { Random, Mode, Constant };

ForcingShape parse_forcing_shape(const std::string& name);
std::string to_string(ForcingShape shape);

// F^field(τ, mode) = amplitude · g(τ) · spatial(mode) with g a C∞ bump of
// half-width `width` around `center`.
struct ForcingSpec {
    int field = 0;
    ForcingShape shape = ForcingShape::Bump;
    double center = 0.5;
    double width = 0.2;
    double amplitude = 1.0;
    SpatialKind spatial = SpatialKind::Random;
    double decay = 2.0;
    std::uint64_t seed = 1;
    int l = 0;
    std::int64_t slot = 0;

    double profile(double tau) const;
    double support_lo() const { return center - width; }
    double support_hi() const { return center + width; }
    Field spatial_field(const LatticePtr& lattice) const;
    std::string describe() const;
};

struct SystemConfig {
    int I = 1;
    int sigma = 1;
    int M_order = 1;
    std::vector<Coupling> couplings;
    std::vector<ForcingSpec> forcings;
    double rtol = 1e-12;
    double atol = 1e-14;
    double tau_seed = 1e-4;
    int frobenius_order = 12;
    double log_time_below = 1e-3;

    int fields() const { return I + 1; }
    void validate() const;
    nlohmann::json to_json() const;
};

// Per-mode linear system φ'' + (s_c/τ)φ'_c + Σ K_{cc'}(τ)φ_{c'} = F_c(τ),
// K = 4λ I - √λ A(τ), A_{cc'} = Σ scale·ψ(τ).
struct LinearSystem {
    int N = 1;
    std::vector<int> sign;
    std::vector<Coupling> couplings;
    std::vector<ForcingSpec> forcings;
    double rtol = 1e-12;
    double atol = 1e-14;
    double log_time_below = 1e-3;
    int frobenius_order = 12;
};

LinearSystem model_system(const SystemConfig& cfg);
// Fields (Y, J, Φ₁..Φ_I): Y carries only the self-coupling of Φ₀, J the rest.
LinearSystem split_system(const SystemConfig& cfg);
// Φ₀ alone with its self-coupling, no forcing.
LinearSystem singular_system(const SystemConfig& cfg);

// Dense N×N coupling evaluation: out[c*N + c'] = K_{cc'}(τ).
void coupling_matrix(const LinearSystem& sys, const ConformalBackground& bg, double lambda0, double tau,
                     double* out);

// Taylor coefficients in τ² of K(τ): K_r stored as N×N blocks, r = 0..order.
std::vector<double> coupling_series(const LinearSystem& sys, const ConformalBackground& bg, double lambda0,
                                    int order);

struct ModeState {
    std::vector<double> value;
    std::vector<double> deriv;
};

// (φ', φ'') for the model system at one mode; forcing values per field optional.
ModeState mode_rhs(const SystemConfig& cfg, const ConformalBackground& bg, double lambda0, double tau,
                   const ModeState& state, const std::vector<double>& forcing = {});

std::vector<Coupling> random_couplings(const SystemConfig& cfg, double scale, std::uint64_t seed);

}  // namespace dslab
