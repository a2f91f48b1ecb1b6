#include "dslab/lp_props.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dslab/errors.hpp"
#include "dslab/lp_ops.hpp"
#include "dslab/rng.hpp"

namespace dslab {

namespace {

constexpr double kEta = 0.1;
constexpr double kLogSobolevS = 1.0;

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

// Samples of μ on a log grid spanning the partition's k range.
std::vector<double> mu_grid(const LPPartition& part, int per_unit) {
    std::vector<double> out;
    const double lo = part.k_min() - 1.0 + part.shift();
    const double hi = part.k_max() + 1.0 + part.shift();
    const int n = static_cast<int>((hi - lo) * per_unit);
    for (int i = 0; i <= n; ++i) out.push_back(std::pow(4.0, lo + (hi - lo) * i / n));
    return out;
}

struct Powered {
    std::vector<double> power;  // per degree
    double total = 0.0;
    double nonzero = 0.0;  // total without the zero mode
};

int top_shell(const LPPartition& part, double lambda_max) {
    if (!(lambda_max > 0.0)) return 0;
    return std::min(part.k_max(), static_cast<int>(std::ceil(std::log(lambda_max) / std::log(4.0) - part.shift())) + 1);
}

}  // namespace

bool PropertyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck& PropertyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.check == name) return c;
    throw DomainError("property report: no check named '" + name + "'");
}

nlohmann::json PropertyReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"check", c.check},
                       {"constant", finite_or_null(c.constant)},
                       {"threshold", c.informational ? nlohmann::json(nullptr) : finite_or_null(c.threshold)},
                       {"pass", c.pass},
                       {"informational", c.informational},
                       {"detail", c.detail},
                       {"corpus", corpus},
                       {"seed", seed},
                       {"l_max", l_max},
                       {"tau", tau}});
    return arr;
}

std::string PropertyReport::to_csv(bool header) const {
    std::ostringstream os;
    os.precision(17);
    if (header) os << "check,l_max,constant,threshold,pass,corpus,seed,tau\n";
    for (const auto& c : checks)
        os << c.check << ',' << l_max << ',' << c.constant << ',' << (c.informational ? NAN : c.threshold) << ','
           << (c.pass ? 1 : 0) << ',' << corpus << ',' << seed << ',' << tau << '\n';
    return os.str();
}

std::vector<Field> lp_corpus(const LatticePtr& lattice, std::uint64_t seed, int size) {
    if (size < 1) throw DomainError("lp corpus: size must be at least 1");
    std::vector<Field> out;
    out.reserve(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        if (i % 2 == 0) {
            const double decay = rng.uniform(0.0, 3.0);
            out.push_back(random_field(lattice, rng, decay));
        } else {
            const int l = rng.integer(0, lattice->l_max());
            Field f(lattice);
            const auto& d = lattice->degree(l);
            for (std::int64_t s = 0; s < d.mult; ++s) f[d.offset + s] = rng.normal();
            out.push_back(std::move(f));
        }
    }
    return out;
}

PropertyReport check_lp_properties(const LPPartition& part, std::uint64_t corpus_seed, int corpus_size,
                                   const LatticePtr& lattice, const ConformalBackground& bg, double tau) {
    if (corpus_size < 1) throw DomainError("check_lp_properties: corpus_size must be at least 1");
    PropertyReport rep;
    rep.corpus = corpus_size;
    rep.seed = corpus_seed;
    rep.l_max = lattice->l_max();
    rep.tau = tau;

    const auto& degs = lattice->degrees();
    std::vector<double> lam(degs.size());
    for (const auto& d : degs) lam[static_cast<std::size_t>(d.l)] = eigenvalue_at(bg, d.lambda0, tau);
    const double lam_max = lam.back();

    std::vector<Powered> corpus;
    for (const auto& f : lp_corpus(lattice, corpus_seed, corpus_size)) {
        Powered p;
        p.power = f.degree_power();
        for (std::size_t l = 0; l < p.power.size(); ++l) {
            p.total += p.power[l];
            if (lam[l] > 0.0) p.nonzero += p.power[l];
        }
        corpus.push_back(std::move(p));
    }
    const auto sum = [&](const Powered& p, const auto& w) {
        double acc = 0.0;
        for (std::size_t l = 0; l < p.power.size(); ++l)
            if (p.power[l] != 0.0) acc += w(lam[l]) * p.power[l];
        return acc;
    };
    const auto mus = mu_grid(part, 400);
    // Thresholds are sups over a fine grid together with the lattice's own eigenvalues.
    std::vector<double> probes = mus;
    probes.insert(probes.end(), lam.begin(), lam.end());

    {
        PropertyCheck c{"partition_of_unity", 0.0, 1e-12, false, false, ""};
        for (double mu : mus)
            if (mu >= part.covered_lo() && mu <= part.covered_hi())
                c.constant = std::max(c.constant, std::abs(part.unity(mu) - 1.0));
        for (double l : lam)
            if (l >= part.covered_lo() && l <= part.covered_hi())
                c.constant = std::max(c.constant, std::abs(part.unity(l) - 1.0));
        c.pass = c.constant <= c.threshold;
        c.detail = "sup |sum_k M_k^2 - 1| on the covered spectrum";
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"bessel", 0.0, 1e-10, true, false, ""};
        double worst = 0.0;
        for (const auto& p : corpus) {
            if (p.nonzero == 0.0) continue;
            const double s = sum(p, [&](double l) { return l > 0.0 ? part.unity(l) : 0.0; });
            const double C = s / p.nonzero;
            if (std::abs(C - 1.0) >= worst) {
                worst = std::abs(C - 1.0);
                c.constant = C;
            }
        }
        c.pass = worst <= c.threshold;
        c.detail = "sum_k |P_k F|^2 / |F|^2 with the zero mode removed; threshold bounds |C - 1|";
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"finite_band", 0.0, 2.0, false, false, ""};
        const int khi = top_shell(part, lam_max);
        for (int k = part.k_min(); k <= khi; ++k)
            for (const auto& p : corpus) {
                if (p.total == 0.0) continue;
                const double s = sum(p, [&](double l) {
                    const double m = part.shell(k, l);
                    return l * m * m;
                });
                c.constant = std::max(c.constant, std::sqrt(s / p.total) * std::exp2(-k));
            }
        c.pass = c.constant <= c.threshold * (1.0 + 1e-12);
        c.detail = "sup |grad P_k F| / (2^k |F|); bound is sup sqrt(mu) on supp M";
        rep.checks.push_back(c);
    }
    {
        const LPPartition other = part.shifted(0.5);
        PropertyCheck c{"almost_orthogonality", 0.0, 0.0, false, false, ""};
        double far = 0.0;
        const int khi = top_shell(part, lam_max);
        for (int k = part.k_min(); k <= khi; ++k)
            for (int l = std::max(part.k_min(), k - 4); l <= std::min(part.k_max(), k + 4); ++l) {
                const int gap = std::abs(k - l);
                double cont = 0.0;
                for (double mu : probes) cont = std::max(cont, std::abs(part.shell(k, mu) * other.shell(l, mu)));
                if (gap <= 2) c.threshold = std::max(c.threshold, std::exp2(4.0 * gap) * cont);
                for (const auto& p : corpus) {
                    if (p.total == 0.0) continue;
                    const double s = sum(p, [&](double x) {
                        const double m = part.shell(k, x) * other.shell(l, x);
                        return m * m;
                    });
                    const double r = std::sqrt(s / p.total);
                    if (gap >= 3)
                        far = std::max(far, r);
                    else
                        c.constant = std::max(c.constant, std::exp2(4.0 * gap) * r);
                }
            }
        c.pass = c.constant <= c.threshold * (1.0 + 1e-12) && far == 0.0;
        std::ostringstream os;
        os << "sup 2^{4|k-l|} |P_k P'_l F| / |F| against a half-cell shifted family; |k-l| >= 3 gives " << far;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"log_nabla", 0.0, 0.0, false, false, ""};
        const double s = kLogSobolevS;
        for (double mu : probes) {
            const double r = part.log_multiplier(mu) / std::pow(1.0 + mu, 0.5 * kEta);
            c.threshold = std::max(c.threshold, r);
        }
        for (const auto& p : corpus) {
            const double den = sum(p, [&](double l) { return std::pow(1.0 + l, s + kEta); });
            if (den == 0.0) continue;
            const double num = sum(p, [&](double l) {
                const double m = part.log_multiplier(l);
                return m * m * std::pow(1.0 + l, s);
            });
            c.constant = std::max(c.constant, std::sqrt(num / den));
        }
        c.pass = std::isfinite(c.constant) && c.constant <= c.threshold * (1.0 + 1e-9);
        c.detail = "sup |(log grad) F|_{H^1} / |F|_{H^1.1}, eta = 0.1";
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"r_k", 0.0, 0.0, false, false, ""};
        const int khi = top_shell(part, lam_max);
        for (int k = 0; k <= std::min(part.k_max(), khi + 2); ++k)
            for (std::size_t i = 0; i < mus.size() + lam.size(); ++i) {
                const double x = i < mus.size() ? std::ldexp(mus[i], 2 * k) : lam[i - mus.size()];
                const double m = part.shell(k, x);
                if (m <= 0.0) continue;
                const double r = std::exp2(k) * std::abs(r_k_multiplier(part, k, x)) / std::sqrt(m * (1.0 + x));
                c.threshold = std::max(c.threshold, r);
            }
        for (int k = 0; k <= khi; ++k)
            for (const auto& p : corpus) {
                const double den = sum(p, [&](double l) { return part.shell(k, l) * (1.0 + l); });
                if (den == 0.0) continue;
                const double num = sum(p, [&](double l) {
                    const double r = r_k_multiplier(part, k, l);
                    return r * r;
                });
                c.constant = std::max(c.constant, std::exp2(k) * std::sqrt(num / den));
            }
        c.pass = std::isfinite(c.constant) && c.constant <= c.threshold * (1.0 + 1e-9);
        c.detail = "sup 2^k |R_k F| / |underline P_k F|_{H^1}";
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"commutator", 0.0, 0.0, false, false, ""};
        double sup_mu_dm = 0.0;
        for (double mu : mus) sup_mu_dm = std::max(sup_mu_dm, std::abs(mu * part.bump_dmu(mu)));
        for (int k = part.k_min(); k <= part.k_max(); ++k)
            for (double l : lam) {
                const double mu = part.scaled(k, l);
                sup_mu_dm = std::max(sup_mu_dm, std::abs(mu * part.bump_dmu(mu)));
            }
        // |[∇₄, P_k]| multiplier is |μ M'(μ)|·|2f'/f|/(2τ) = |μ M'(μ)|·|κ(τ)|.
        c.threshold = sup_mu_dm * std::abs(bg.kappa(tau));
        const int khi = top_shell(part, lam_max);
        double lo_k = INFINITY, hi_k = 0.0;
        for (int k = part.k_min(); k <= khi; ++k) {
            double sup_k = 0.0;
            for (const auto& p : corpus) {
                if (p.total == 0.0) continue;
                double acc = 0.0;
                for (const auto& d : degs) {
                    const double pw = p.power[static_cast<std::size_t>(d.l)];
                    if (pw == 0.0) continue;
                    const double m = commutator_multiplier(part, k, d.lambda0, tau, bg, TimeVector::E4);
                    acc += m * m * pw;
                }
                sup_k = std::max(sup_k, std::sqrt(acc / p.total));
            }
            c.constant = std::max(c.constant, sup_k);
            if (sup_k > 0.0) {
                lo_k = std::min(lo_k, sup_k);
                hi_k = std::max(hi_k, sup_k);
            }
        }
        c.pass = c.constant <= c.threshold * (1.0 + 1e-12) + 1e-300;
        std::ostringstream os;
        os << "sup_k |[e4, P_k] F| / |F| (per-k range " << (hi_k > 0.0 ? lo_k : 0.0) << " to " << hi_k
           << "); bound sup|mu M'(mu)| kappa(tau)";
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"comparability", 0.0, 10.0, false, false, ""};
        double c1 = INFINITY, c2 = 0.0;
        for (double a : {0.5, 1.5, 2.5})
            for (const auto& p : corpus) {
                const double sp = sum(p, [&](double l) { return std::pow(1.0 + l, a); });
                if (sp == 0.0) continue;
                const double lp = sum(p, [&](double l) { return lp_sobolev_weight(part, a, l); });
                const double r = std::sqrt(lp / sp);
                c1 = std::min(c1, r);
                c2 = std::max(c2, r);
            }
        c.constant = c2 / c1;
        c.pass = std::isfinite(c.constant) && c.constant < c.threshold;
        std::ostringstream os;
        os << "c2/c1 for |F|_{H^a,LP} / |F|_{H^a} over a in {0.5, 1.5, 2.5}; c1 = " << c1 << ", c2 = " << c2;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"heat_contraction", 0.0, 1.0, false, false, ""};
        for (double z : {0.01, 0.1, 1.0})
            for (const auto& p : corpus) {
                if (p.total == 0.0) continue;
                const double s = sum(p, [&](double l) { return std::exp(-2.0 * z * l); });
                c.constant = std::max(c.constant, std::sqrt(s / p.total));
            }
        c.pass = c.constant <= c.threshold;
        c.detail = "sup |U(z) F| / |F| over z in {0.01, 0.1, 1}";
        rep.checks.push_back(c);
    }
    {
        PropertyCheck c{"projection_difference", 0.0, 0.0, true, true, ""};
        const int khi = top_shell(part, lam_max);
        for (int k = part.k_min(); k <= khi; ++k)
            for (const auto& p : corpus) {
                if (p.total == 0.0) continue;
                double acc = 0.0;
                for (const auto& d : degs) {
                    const double pw = p.power[static_cast<std::size_t>(d.l)];
                    if (pw == 0.0) continue;
                    const double m = part.shell(k, lam[static_cast<std::size_t>(d.l)]) -
                                     part.shell(k, eigenvalue_at(bg, d.lambda0, 0.0));
                    acc += m * m * pw;
                }
                c.constant = std::max(c.constant, std::sqrt(acc / p.total));
            }
        if (tau > 0.0) c.constant /= tau * tau;
        c.detail = "sup_k |P_k(tau) F - P_k(0) F| / (tau^2 |F|), reported only";
        rep.checks.push_back(c);
    }
    return rep;
}

double poincare_sweep(const LPPartition& part, double delta, std::uint64_t corpus_seed, int corpus_size,
                      const LatticePtr& lattice, const ConformalBackground& bg, double tau, int k_hi) {
    double sup = 0.0;
    for (const auto& f : lp_corpus(lattice, corpus_seed, corpus_size)) {
        const auto p = f.degree_power();
        for (int k = 0; k <= std::min(k_hi, part.k_max()); ++k)
            sup = std::max(sup, refined_poincare_defect(part, k, delta, p, *lattice, tau, bg));
    }
    return sup;
}

}  // namespace dslab
