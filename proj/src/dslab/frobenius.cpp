#include "dslab/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dslab/errors.hpp"

namespace dslab {

FrobeniusBasis::FrobeniusBasis(const LinearSystem& sys, const ConformalBackground& bg, double lambda0, int order)
    : n_(sys.N), order_(order), lambda0_(lambda0) {
    if (order < 2) throw DomainError("frobenius: order must be at least 2");
    if (!(lambda0 >= 0.0)) throw DomainError("frobenius: lambda0 must be nonnegative");
    constexpr int Q = kLogPowers;
    const int n = n_;
    const int cols = 2 * n;
    c_.assign(static_cast<std::size_t>(order + 1) * (Q + 1) * n * cols, 0.0);
    const auto k = coupling_series(sys, bg, lambda0, order);

    for (int d = 0; d < n; ++d) {
        c_[index(0, 0, d, 2 * d)] = 1.0;
        if (sys.sign[static_cast<std::size_t>(d)] > 0)
            c_[index(0, 1, d, 2 * d + 1)] = 1.0;
        else
            c_[index(1, 0, d, 2 * d + 1)] = 1.0;
    }

    std::vector<double> rhs(static_cast<std::size_t>((Q + 1) * n * cols));
    auto r_at = [&](int q, int comp, int col) -> double& {
        return rhs[(static_cast<std::size_t>(q) * n + static_cast<std::size_t>(comp)) * cols + static_cast<std::size_t>(col)];
    };
    for (int p = 1; p <= order; ++p) {
        std::fill(rhs.begin(), rhs.end(), 0.0);
        // R_{p,q} = -Σ_{r<p} K_r c_{p-1-r,q}
        for (int r = 0; r < p; ++r) {
            const double* kr = k.data() + static_cast<std::size_t>(r * n * n);
            const int pp = p - 1 - r;
            for (int q = 0; q <= Q; ++q)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        const double kab = kr[a * n + b];
                        if (kab == 0.0) continue;
                        for (int col = 0; col < cols; ++col) {
                            const double cb = c_[index(pp, q, b, col)];
                            if (cb != 0.0) r_at(q, a, col) -= kab * cb;
                        }
                    }
        }
        const double m = 2.0 * p;
        for (int a = 0; a < n; ++a) {
            const double s = sys.sign[static_cast<std::size_t>(a)];
            const double pm = m * (m - 1.0 + s);
            const double lin = 2.0 * m - 1.0 + s;
            for (int col = 0; col < cols; ++col) {
                auto c = [&](int q) -> double { return q > Q ? 0.0 : c_[index(p, q, a, col)]; };
                if (pm != 0.0) {
                    for (int q = Q; q >= 0; --q) {
                        const double v = (r_at(q, a, col) - (q + 1) * lin * c(q + 1) - (q + 2.0) * (q + 1) * c(q + 2)) / pm;
                        c_[index(p, q, a, col)] = v;
                    }
                } else {
                    // Resonant level: the equation at power q fixes c_{p,q+1}; c_{p,0} is the free datum.
                    for (int q = Q - 1; q >= 0; --q) {
                        const double v = (r_at(q, a, col) - (q + 2.0) * (q + 1) * c(q + 2)) / ((q + 1) * lin);
                        c_[index(p, q + 1, a, col)] = v;
                    }
                }
            }
        }
    }
}

void FrobeniusBasis::evaluate(double tau, std::vector<double>& value, std::vector<double>& deriv) const {
    if (!(tau > 0.0)) throw DomainError("frobenius: evaluation requires tau > 0");
    constexpr int Q = kLogPowers;
    const int cols = 2 * n_;
    value.assign(static_cast<std::size_t>(n_ * cols), 0.0);
    deriv.assign(static_cast<std::size_t>(n_ * cols), 0.0);
    const double lg = std::log(tau);
    double lpow[Q + 2];
    lpow[0] = 1.0;
    for (int q = 1; q <= Q + 1; ++q) lpow[q] = lpow[q - 1] * lg;
    const double t2 = tau * tau;
    double tp = 1.0;
    for (int p = 0; p <= order_; ++p, tp *= t2) {
        for (int q = 0; q <= Q; ++q) {
            const double basis_v = tp * lpow[q];
            // d/dτ[τ^{2p} L^q] = τ^{2p-1}(2p L^q + q L^{q-1})
            const double basis_d = tp / tau * (2.0 * p * lpow[q] + (q > 0 ? q * lpow[q - 1] : 0.0));
            for (int a = 0; a < n_; ++a)
                for (int col = 0; col < cols; ++col) {
                    const double c = c_[index(p, q, a, col)];
                    if (c == 0.0) continue;
                    value[static_cast<std::size_t>(a * cols + col)] += c * basis_v;
                    deriv[static_cast<std::size_t>(a * cols + col)] += c * basis_d;
                }
        }
    }
}

double FrobeniusBasis::remainder(double tau) const {
    constexpr int Q = kLogPowers;
    const int cols = 2 * n_;
    std::vector<double> v, d;
    evaluate(tau, v, d);
    const double lg = std::abs(std::log(tau));
    double worst = 0.0;
    for (int col = 0; col < cols; ++col) {
        double scale = 0.0, tail = 0.0;
        for (int a = 0; a < n_; ++a) {
            scale = std::max(scale, std::abs(v[static_cast<std::size_t>(a * cols + col)]));
            scale = std::max(scale, tau * std::abs(d[static_cast<std::size_t>(a * cols + col)]));
            for (int q = 0; q <= Q; ++q) {
                const double c = std::abs(coeff(order_, q, a, col));
                tail += c * std::pow(tau, 2.0 * order_) * std::pow(lg, q) * (1.0 + 2.0 * order_);
            }
        }
        if (scale > 0.0) worst = std::max(worst, tail / scale);
        if (!std::isfinite(tail)) return std::numeric_limits<double>::infinity();
    }
    return worst;
}

void FrobeniusBasis::validate(double tau, double tol) const {
    const double r = remainder(tau);
    if (!(r <= tol)) {
        std::ostringstream os;
        os << "seeding: tau_seed = " << tau << " is too large for Frobenius order " << order_
           << " at lambda0 = " << lambda0_ << " (remainder " << r << " exceeds " << tol
           << "); lower tau_seed or raise frobenius_order";
        throw SeedingError(os.str());
    }
}

double SeriesPair::eval(const std::vector<std::vector<double>>& s, double tau) {
    const double lg = std::log(tau);
    double acc = 0.0, tp = 1.0;
    for (const auto& row : s) {
        double lp = 1.0;
        for (double c : row) {
            acc += c * tp * lp;
            lp *= lg;
        }
        tp *= tau * tau;
    }
    return acc;
}

double SeriesPair::eval_deriv(const std::vector<std::vector<double>>& s, double tau) {
    const double lg = std::log(tau);
    double acc = 0.0, tp = 1.0;
    for (std::size_t p = 0; p < s.size(); ++p) {
        double lp = 1.0, lpm = 0.0;
        for (std::size_t q = 0; q < s[p].size(); ++q) {
            acc += s[p][q] * tp / tau * (2.0 * static_cast<double>(p) * lp + static_cast<double>(q) * lpm);
            lpm = lp;
            lp *= lg;
        }
        tp *= tau * tau;
    }
    return acc;
}

SeriesPair frobenius_basis(double lambda0, const ConformalBackground& bg, int order) {
    LinearSystem sys;
    sys.N = 1;
    sys.sign = {1};
    FrobeniusBasis fb(sys, bg, lambda0, order);
    SeriesPair out;
    out.j.assign(static_cast<std::size_t>(order) + 1, std::vector<double>(FrobeniusBasis::kLogPowers + 1, 0.0));
    out.y = out.j;
    for (int p = 0; p <= order; ++p)
        for (int q = 0; q <= FrobeniusBasis::kLogPowers; ++q) {
            out.j[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = fb.coeff(p, q, 0, 0);
            out.y[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = fb.coeff(p, q, 0, 1);
        }
    return out;
}

}  // namespace dslab
