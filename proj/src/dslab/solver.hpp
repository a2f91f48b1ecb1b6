#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslab/dop853.hpp"
#include "dslab/frobenius.hpp"
#include "dslab/lattice.hpp"
#include "dslab/partition.hpp"
#include "dslab/system.hpp"

namespace dslab {

class Rng;

struct AsymptoticData {
    Field O;
    Field h;
    Field frak_h;
    std::vector<Field> phi0;  // Φᵢ⁰, i = 1..I

    explicit AsymptoticData(const LatticePtr& lattice, int I = 0);

    int regular_count() const { return static_cast<int>(phi0.size()); }
    const LatticePtr& lattice() const { return O.lattice(); }
    nlohmann::json to_json() const;
};

// h - 2(log∇)𝒪 with the multiplier evaluated at λ(τ0).
Field renormalize_h(const Field& h, const Field& O, const LPPartition& part, const ConformalBackground& bg,
                    double tau0 = 0.0);

// Gaussian data with per-mode std (1+λ⁰)^{-decay/2}; 𝔥 filled in from h and 𝒪.
AsymptoticData random_asymptotic_data(const LatticePtr& lattice, int I, Rng& rng, double decay,
                                      const LPPartition& part, const ConformalBackground& bg);

// Fundamental solutions of one degree sampled on an ascending grid.
// Columns 0..2N-1 start from the unit states (values then derivatives) at
// tau_from; column 2N+j is the response to forcing j from zero state.
struct DegreeSolution {
    int components = 0;
    int columns = 0;
    std::vector<double> value;  // [(g * columns + col) * components + comp]
    std::vector<double> deriv;
    OdeStats stats;

    double v(std::size_t g, int col, int comp) const {
        return value[(g * static_cast<std::size_t>(columns) + static_cast<std::size_t>(col)) * components +
                     static_cast<std::size_t>(comp)];
    }
    double d(std::size_t g, int col, int comp) const {
        return deriv[(g * static_cast<std::size_t>(columns) + static_cast<std::size_t>(col)) * components +
                     static_cast<std::size_t>(comp)];
    }
};

DegreeSolution propagate_degree(const LinearSystem& sys, const ConformalBackground& bg, double lambda0,
                                double tau_from, double tau_to, const std::vector<double>& samples);

class Propagator {
public:
    Propagator(LinearSystem sys, ConformalBackground bg, LatticePtr lattice, double tau_from, double tau_to,
               const TimeGrid& grid);

    const LinearSystem& system() const { return sys_; }
    const ConformalBackground& background() const { return bg_; }
    const LatticePtr& lattice() const { return lattice_; }
    const TimeGrid& grid() const { return grid_; }
    double tau_from() const { return tau_from_; }
    double tau_to() const { return tau_to_; }
    std::size_t from_index() const { return from_index_; }
    int components() const { return sys_.N; }
    int columns() const { return 2 * sys_.N + static_cast<int>(sys_.forcings.size()); }
    const DegreeSolution& degree(int l) const { return sol_[static_cast<std::size_t>(l)]; }
    // Forcing j spatial coefficients times amplitude.
    const std::vector<Field>& forcing_fields() const { return forcing_fields_; }
    long total_steps() const;

private:
    LinearSystem sys_;
    ConformalBackground bg_;
    LatticePtr lattice_;
    TimeGrid grid_;
    double tau_from_;
    double tau_to_;
    std::size_t from_index_;
    std::vector<DegreeSolution> sol_;
    std::vector<Field> forcing_fields_;
};

using PropagatorPtr = std::shared_ptr<const Propagator>;

PropagatorPtr build_propagator(const LinearSystem& sys, const ConformalBackground& bg, const LatticePtr& lattice,
                               double tau_from, double tau_to, const TimeGrid& grid);

// Solution as coefficients on a shared propagator, with a selection of rows exposed as fields.
class Trajectory {
public:
    Trajectory(PropagatorPtr prop, std::vector<double> coef, std::vector<int> rows = {});

    const PropagatorPtr& propagator() const { return prop_; }
    const TimeGrid& grid() const { return prop_->grid(); }
    const LatticePtr& lattice() const { return prop_->lattice(); }
    const ConformalBackground& background() const { return prop_->background(); }
    int fields() const { return static_cast<int>(rows_.size()); }
    int row(int field) const { return rows_[static_cast<std::size_t>(field)]; }
    const std::vector<double>& coefficients() const { return coef_; }

    double value(std::size_t g, int field, std::int64_t mode) const;
    double deriv(std::size_t g, int field, std::int64_t mode) const;
    Field value_field(std::size_t g, int field) const;
    Field deriv_field(std::size_t g, int field) const;

    // Per-degree Σ_slots |φ|² and |φ'|².
    void degree_power(std::size_t g, int field, std::vector<double>& value_power,
                      std::vector<double>& deriv_power) const;
    // Per-degree Σ_slots |F|² of the forcing acting on this field at τ.
    std::vector<double> forcing_power(double tau, int field) const;
    bool has_forcing(int field) const;

    Trajectory view(std::vector<int> rows) const { return Trajectory(prop_, coef_, std::move(rows)); }

private:
    double combine(std::size_t g, int row, std::int64_t mode, bool deriv) const;

    PropagatorPtr prop_;
    std::vector<double> coef_;  // [mode][columns]
    std::vector<int> rows_;
    std::vector<double> gram_;  // [l][columns][columns]
};

// States [mode][2N] (values then derivatives) at the propagator's tau_from.
Trajectory trajectory_from_states(const PropagatorPtr& prop, const std::vector<double>& states);

// Data vectors [mode][2N] in the Frobenius column layout; seeded at tau_from.
std::vector<double> seed_from_data(const LinearSystem& sys, const ConformalBackground& bg,
                                   const LatticePtr& lattice, const std::vector<double>& data, double tau_seed);
Trajectory trajectory_from_data(const PropagatorPtr& prop, const std::vector<double>& data);

std::vector<double> model_data_vector(const AsymptoticData& data, int I);
std::vector<double> split_data_vector(const AsymptoticData& data, int I, const LPPartition& part,
                                      const ConformalBackground& bg);

std::vector<ModeState> seed_state(const AsymptoticData& data, const SystemConfig& cfg,
                                  const ConformalBackground& bg, const LatticePtr& lattice, double tau_seed);

Trajectory integrate(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                     const std::vector<ModeState>& states, double tau_from, double tau_to, const TimeGrid& grid);

// Forward run of the model system from Frobenius-seeded data at cfg.tau_seed to τ = 1.
Trajectory solve_forward(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                         const AsymptoticData& data, const TimeGrid& grid);

struct Extraction {
    std::vector<double> data;  // [mode][2N]
    std::vector<std::string> warnings;
    double worst_condition = 0.0;
};

Extraction extract_data_vectors(const Trajectory& traj, double tau_min);

AsymptoticData extract_asymptotic_data(const Trajectory& traj, const LPPartition& part, double tau_min,
                                       std::vector<std::string>* warnings = nullptr);

struct SplitResult {
    Trajectory y;  // field 0: (Φ₀)_Y
    Trajectory j;  // field 0: (Φ₀)_J, fields 1..I: Φᵢ
};

SplitResult split_singular_component(const AsymptoticData& data, const SystemConfig& cfg,
                                     const ConformalBackground& bg, const LatticePtr& lattice,
                                     const LPPartition& part, const TimeGrid& grid);

struct EpsilonReport {
    std::vector<double> eps;
    std::vector<double> discrepancy;
    std::vector<double> ratios;
    bool monotone = false;
    bool pass = false;
    nlohmann::json to_json() const;
};

// Runs from ε with the truncated data 2𝒪 log ε + h, compares to the seeded
// solution at τ = 1 along the ladder ε, ε/2, ε/4.
EpsilonReport epsilon_construction_check(const SystemConfig& cfg, const ConformalBackground& bg,
                                         const AsymptoticData& data, double eps, double min_ratio = 3.0);

// CSV rows tau,field,l,slot,value,dvalue for degrees up to l_limit (all when negative).
void write_trajectory_csv(const Trajectory& traj, std::ostream& os, int l_limit = -1);

}  // namespace dslab
