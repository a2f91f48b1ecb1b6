#include "dslab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dslab/errors.hpp"

namespace dslab {

namespace {

double binom_d(int a, int b) {
    double r = 1.0;
    for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
    return r;
}

const double kLn4 = std::log(4.0);

}  // namespace

ProjKind parse_proj_kind(const std::string& name) {
    if (name == "plain") return ProjKind::Plain;
    if (name == "tilde") return ProjKind::Tilde;
    if (name == "dot") return ProjKind::Dot;
    if (name == "underline") return ProjKind::Underline;
    if (name == "underline_tilde") return ProjKind::UnderlineTilde;
    throw DomainError("unknown projection kind '" + name + "'");
}

std::string to_string(ProjKind kind) {
    switch (kind) {
        case ProjKind::Plain: return "plain";
        case ProjKind::Tilde: return "tilde";
        case ProjKind::Dot: return "dot";
        case ProjKind::Underline: return "underline";
        case ProjKind::UnderlineTilde: return "underline_tilde";
    }
    return "unknown";
}

LPPartition::LPPartition(int k_min, int k_max, int smoothness, double shift)
    : k_min_(k_min), k_max_(k_max), p_(smoothness), shift_(shift) {
    if (!(k_min < 0 && 0 < k_max)) throw DomainError("make_partition: need k_min < 0 < k_max");
    if (k_max - k_min < 3) throw DomainError("make_partition: degenerate k range");
    if (smoothness < 1 || smoothness > 12) throw DomainError("make_partition: smoothness must lie in [1, 12]");
    step_norm_ = 1.0;
    for (int i = p_ + 1; i <= 2 * p_ + 1; ++i) step_norm_ *= i;
    for (int i = 2; i <= p_; ++i) step_norm_ /= i;
}

double LPPartition::smoothstep(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double acc = 0.0;
    double pw = 1.0;
    for (int j = 0; j <= p_; ++j) {
        acc += binom_d(p_ + j, j) * pw;
        pw *= 1.0 - x;
    }
    return std::pow(x, p_ + 1) * acc;
}

double LPPartition::smoothstep_d(double x) const {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return step_norm_ * std::pow(x * (1.0 - x), p_);
}

double LPPartition::bump(double mu) const {
    if (!(mu > 0.0)) return 0.0;
    const double x = std::log(mu) / kLn4 - shift_;
    if (x <= -1.0 || x >= 1.0) return 0.0;
    if (x <= 0.0) return std::sin(M_PI_2 * smoothstep(x + 1.0));
    return std::cos(M_PI_2 * smoothstep(x));
}

double LPPartition::bump_dmu(double mu) const {
    if (!(mu > 0.0)) return 0.0;
    const double x = std::log(mu) / kLn4 - shift_;
    if (x <= -1.0 || x >= 1.0) return 0.0;
    double dx;
    if (x <= 0.0)
        dx = std::cos(M_PI_2 * smoothstep(x + 1.0)) * M_PI_2 * smoothstep_d(x + 1.0);
    else
        dx = -std::sin(M_PI_2 * smoothstep(x)) * M_PI_2 * smoothstep_d(x);
    return dx / (mu * kLn4);
}

double LPPartition::multiplier(ProjKind kind, double mu) const {
    switch (kind) {
        case ProjKind::Plain: return bump(mu);
        case ProjKind::Tilde: return -bump_dmu(mu);
        case ProjKind::Dot: return mu > 0.0 ? bump(mu) / mu : 0.0;
        case ProjKind::Underline: return std::sqrt(bump(mu));
        case ProjKind::UnderlineTilde: return std::sqrt(std::abs(bump_dmu(mu)));
    }
    return 0.0;
}

double LPPartition::scaled(int k, double lambda) const { return std::ldexp(lambda, -2 * k); }

double LPPartition::log_multiplier(double lambda) const {
    if (!(lambda > 0.0)) return 0.0;
    const double x = std::log(lambda) / kLn4 - shift_;
    const int lo = std::max({0, k_min_, static_cast<int>(std::floor(x)) - 1});
    const int hi = std::min(k_max_, static_cast<int>(std::ceil(x)) + 1);
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) {
        const double m = shell(k, lambda);
        acc += m * m * k * M_LN2;
    }
    return acc;
}

double LPPartition::unity(double lambda) const {
    if (!(lambda > 0.0)) return 0.0;
    const double x = std::log(lambda) / kLn4 - shift_;
    const int lo = std::max(k_min_, static_cast<int>(std::floor(x)) - 1);
    const int hi = std::min(k_max_, static_cast<int>(std::ceil(x)) + 1);
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) {
        const double m = shell(k, lambda);
        acc += m * m;
    }
    return acc;
}

double LPPartition::covered_lo() const { return std::pow(4.0, k_min_ + 1 + shift_); }
double LPPartition::covered_hi() const { return std::pow(4.0, k_max_ - 1 + shift_); }

std::string LPPartition::spec() const {
    std::ostringstream os;
    os << "k=[" << k_min_ << "," << k_max_ << "],smoothness=" << p_;
    if (shift_ != 0.0) os << ",shift=" << shift_;
    return os.str();
}

nlohmann::json LPPartition::to_json() const {
    return {{"k_min", k_min_}, {"k_max", k_max_}, {"smoothness", p_}, {"shift", shift_}};
}

LPPartition make_partition(int k_min, int k_max, int smoothness) {
    return LPPartition(k_min, k_max, smoothness);
}

}  // namespace dslab
