#pragma once

#include <string>

#include <json.hpp>

namespace dslab {

enum class ProjKind { Plain, Tilde, Dot, Underline, UnderlineTilde };

ProjKind parse_proj_kind(const std::string& name);
std::string to_string(ProjKind kind);

// Dyadic bump family M_k(μ) = M(4^{-k}μ) with Σ_k M_k² = 1 on μ > 0.
// In x = log_4 μ - shift the bump is sin(π/2·s(x+1)) on [-1, 0] and
// cos(π/2·s(x)) on [0, 1], with s a polynomial smoothstep of order p.
class LPPartition {
public:
    LPPartition(int k_min, int k_max, int smoothness, double shift = 0.0);

    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }
    int smoothness() const { return p_; }
    double shift() const { return shift_; }
    bool in_range(int k) const { return k >= k_min_ && k <= k_max_; }

    double bump(double mu) const;
    double bump_dmu(double mu) const;
    double multiplier(ProjKind kind, double mu) const;

    // M(λ4^{-k}) and friends.
    double shell(int k, double lambda) const { return bump(scaled(k, lambda)); }
    double scaled(int k, double lambda) const;

    // Σ_{k≥0} M(λ4^{-k})² log 2^k.
    double log_multiplier(double lambda) const;
    // Σ over all k in range of M(λ4^{-k})².
    double unity(double lambda) const;

    // Covered spectrum where the truncated sum equals one.
    double covered_lo() const;
    double covered_hi() const;

    LPPartition shifted(double by) const { return LPPartition(k_min_, k_max_, p_, shift_ + by); }

    std::string spec() const;
    nlohmann::json to_json() const;

private:
    double smoothstep(double x) const;
    double smoothstep_d(double x) const;

    int k_min_;
    int k_max_;
    int p_;
    double shift_;
    double step_norm_;
};

LPPartition make_partition(int k_min, int k_max, int smoothness);

}  // namespace dslab
