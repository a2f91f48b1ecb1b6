#include "dslab/lp_ops.hpp"

#include <algorithm>
#include <cmath>

#include "dslab/errors.hpp"

namespace dslab {

Field apply_multiplier(const Field& field, double tau, const ConformalBackground& bg,
                       const std::function<double(double)>& m) {
    Field out(field.lattice());
    for (const auto& d : field.lattice()->degrees()) {
        const double w = m(eigenvalue_at(bg, d.lambda0, tau));
        for (std::int64_t i = 0; i < d.mult; ++i) out[d.offset + i] = w * field[d.offset + i];
    }
    return out;
}

double multiplier_norm2(const std::vector<double>& degree_power, const Lattice& lattice, double tau,
                        const ConformalBackground& bg, const std::function<double(double)>& m2) {
    double acc = 0.0;
    for (const auto& d : lattice.degrees()) {
        const double p = degree_power[static_cast<std::size_t>(d.l)];
        if (p != 0.0) acc += m2(eigenvalue_at(bg, d.lambda0, tau)) * p;
    }
    return acc;
}

Field heat_flow(const Field& field, double z, double tau, const ConformalBackground& bg) {
    if (!(z >= 0.0)) throw DomainError("heat_flow: z must be nonnegative");
    if (z == 0.0) return field;
    return apply_multiplier(field, tau, bg, [z](double lam) { return std::exp(-z * lam); });
}

Field lp_project(const LPPartition& part, ProjKind kind, int k, const Field& field, double tau,
                 const ConformalBackground& bg) {
    if (!part.in_range(k)) throw DomainError("lp_project: k outside the partition range");
    return apply_multiplier(field, tau, bg,
                            [&](double lam) { return part.multiplier(kind, part.scaled(k, lam)); });
}

Field log_nabla(const LPPartition& part, const Field& field, double tau, const ConformalBackground& bg) {
    return apply_multiplier(field, tau, bg, [&](double lam) { return part.log_multiplier(lam); });
}

double r_k_multiplier(const LPPartition& part, int k, double lambda) {
    return 2.0 * part.shell(k, lambda) * (part.log_multiplier(lambda) - k * M_LN2);
}

Field r_k(const LPPartition& part, int k, const Field& field, double tau, const ConformalBackground& bg) {
    if (k < 0) throw DomainError("r_k: k must be nonnegative");
    if (!part.in_range(k)) throw DomainError("r_k: k outside the partition range");
    return apply_multiplier(field, tau, bg, [&](double lam) { return r_k_multiplier(part, k, lam); });
}

double lp_sobolev_weight(const LPPartition& part, double a, double lambda) {
    if (!(a >= 0.0) || a >= 4.0) throw DomainError("lp_sobolev_norm: a must lie in [0, 4)");
    const int ia = static_cast<int>(std::floor(a));
    const double fa = a - ia;
    double w = 0.0;
    for (int j = 0; j < ia; ++j) w += std::pow(lambda, j);
    double shells = 1.0;
    if (lambda > 0.0) {
        const double x = std::log(lambda) / std::log(4.0) - part.shift();
        const int lo = std::max({0, part.k_min(), static_cast<int>(std::floor(x)) - 1});
        const int hi = std::min(part.k_max(), static_cast<int>(std::ceil(x)) + 1);
        for (int k = lo; k <= hi; ++k) {
            const double m = part.shell(k, lambda);
            shells += std::exp2(2.0 * fa * k) * m * m;
        }
    }
    return w + std::pow(lambda, ia) * shells;
}

double lp_sobolev_norm(const LPPartition& part, const Field& field, double a, double tau,
                       const ConformalBackground& bg) {
    if (!(a >= 0.0) || a >= 4.0) throw DomainError("lp_sobolev_norm: a must lie in [0, 4)");
    const auto p = field.degree_power();
    return std::sqrt(multiplier_norm2(p, *field.lattice(), tau, bg,
                                      [&](double lam) { return lp_sobolev_weight(part, a, lam); }));
}

double commutator_multiplier(const LPPartition& part, int k, double lambda0, double tau,
                             const ConformalBackground& bg, TimeVector tv) {
    if (!(tau > 0.0)) throw DomainError("commutator_time_pk: tau must be positive");
    const double lam = eigenvalue_at(bg, lambda0, tau);
    const double mu = part.scaled(k, lam);
    // dλ/dτ = -2λ f'/f, so d/dτ M(λ4^{-k}) = M'(μ)·μ·(-2f'/f).
    const double dlog = -2.0 * bg.f_prime(tau) / bg.f(tau);
    const double d = part.bump_dmu(mu) * mu * dlog;
    return tv == TimeVector::Tau ? d : d / (2.0 * tau);
}

Field commutator_time_pk(const LPPartition& part, int k, const Field& field, double tau,
                         const ConformalBackground& bg, TimeVector tv) {
    if (!part.in_range(k)) throw DomainError("commutator_time_pk: k outside the partition range");
    if (!(tau > 0.0)) throw DomainError("commutator_time_pk: tau must be positive");
    Field out(field.lattice());
    for (const auto& d : field.lattice()->degrees()) {
        const double w = commutator_multiplier(part, k, d.lambda0, tau, bg, tv);
        for (std::int64_t i = 0; i < d.mult; ++i) out[d.offset + i] = w * field[d.offset + i];
    }
    return out;
}

double refined_poincare_defect(const LPPartition& part, int k, double delta,
                               const std::vector<double>& power, const Lattice& lattice, double tau,
                               const ConformalBackground& bg) {
    if (k < 0) throw DomainError("refined_poincare_defect: k must be nonnegative");
    if (!part.in_range(k)) throw DomainError("refined_poincare_defect: k outside the partition range");
    if (!(delta > 0.0)) throw DomainError("refined_poincare_defect: delta must be positive");
    double lhs = 0.0, grad_k = 0.0, low = 0.0, total = 0.0;
    for (const auto& d : lattice.degrees()) {
        const double p = power[static_cast<std::size_t>(d.l)];
        if (p == 0.0) continue;
        const double lam = eigenvalue_at(bg, d.lambda0, tau);
        const double mk = part.shell(k, lam);
        lhs += mk * mk * p;
        grad_k += lam * mk * mk * p;
        total += p;
        for (int l = 0; l < k; ++l) {
            const double ml = part.shell(l, lam);
            if (ml != 0.0) low += std::exp2(-9.0 * k + 7.0 * l) * lam * ml * ml * p;
        }
    }
    const double rhs = std::exp2(-2.0 * k) * grad_k / delta + delta * low + std::exp2(-4.0 * k) * total / delta;
    if (rhs == 0.0) return 0.0;
    return lhs / rhs;
}

double refined_poincare_defect(const LPPartition& part, int k, double delta, const Field& field,
                               double tau, const ConformalBackground& bg) {
    return refined_poincare_defect(part, k, delta, field.degree_power(), *field.lattice(), tau, bg);
}

}  // namespace dslab
