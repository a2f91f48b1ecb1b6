#pragma once

#include <functional>
#include <vector>

#include "dslab/lattice.hpp"
#include "dslab/partition.hpp"

namespace dslab {

enum class TimeVector { E4, Tau };

// Multiplies degree l by m(λ_l(τ)).
Field apply_multiplier(const Field& field, double tau, const ConformalBackground& bg,
                       const std::function<double(double)>& m);

// Σ_l m(λ_l(τ))·power_l, the squared norm of a multiplier image.
double multiplier_norm2(const std::vector<double>& degree_power, const Lattice& lattice, double tau,
                        const ConformalBackground& bg, const std::function<double(double)>& m2);

Field heat_flow(const Field& field, double z, double tau, const ConformalBackground& bg);

Field lp_project(const LPPartition& part, ProjKind kind, int k, const Field& field, double tau,
                 const ConformalBackground& bg);

Field log_nabla(const LPPartition& part, const Field& field, double tau, const ConformalBackground& bg);

double r_k_multiplier(const LPPartition& part, int k, double lambda);
Field r_k(const LPPartition& part, int k, const Field& field, double tau, const ConformalBackground& bg);

// Weight w(λ) with ‖F‖²_{H^a} = Σ w(λ)|c|² for the dyadic fractional norm.
double lp_sobolev_weight(const LPPartition& part, double a, double lambda);
double lp_sobolev_norm(const LPPartition& part, const Field& field, double a, double tau,
                       const ConformalBackground& bg);

double commutator_multiplier(const LPPartition& part, int k, double lambda0, double tau,
                             const ConformalBackground& bg, TimeVector tv);
Field commutator_time_pk(const LPPartition& part, int k, const Field& field, double tau,
                         const ConformalBackground& bg, TimeVector tv = TimeVector::E4);

double refined_poincare_defect(const LPPartition& part, int k, double delta, const Field& field,
                               double tau, const ConformalBackground& bg);
double refined_poincare_defect(const LPPartition& part, int k, double delta,
                               const std::vector<double>& degree_power, const Lattice& lattice,
                               double tau, const ConformalBackground& bg);

}  // namespace dslab
