#include "dslab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "dslab/bessel.hpp"
#include "dslab/errors.hpp"
#include "dslab/lp_ops.hpp"
#include "dslab/rng.hpp"

namespace dslab {

namespace {

nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

void check_order(int M) {
    if (M < 0 || M > kMaxEnergyOrder)
        throw DomainError("energy: M must lie in [0, " + std::to_string(kMaxEnergyOrder) + "]");
}

double ratio_of(double e, double d, double f) {
    if (e == 0.0) return 0.0;
    return d + f > 0.0 ? e / (d + f) : INFINITY;
}

std::vector<double> eigenvalues(const Lattice& lat, const ConformalBackground& bg, double tau) {
    std::vector<double> out(lat.degrees().size());
    for (const auto& d : lat.degrees()) out[static_cast<std::size_t>(d.l)] = eigenvalue_at(bg, d.lambda0, tau);
    return out;
}

double power_sum(const std::vector<double>& w, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != 0.0) acc += w[i] * p[i];
    return acc;
}

// Composite Simpson on [a, b] with an even number of panels of width at most h_max.
template <class F>
double simpson(const F& f, double a, double b, double h_max = 0.0025) {
    if (b <= a) return 0.0;
    int n = std::max(2, static_cast<int>(std::ceil((b - a) / h_max)));
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

std::size_t grid_index(const TimeGrid& grid, double tau) {
    const std::size_t g = grid.nearest(tau);
    if (std::abs(grid[g] - tau) > 1e-12 * std::max(tau, 1e-300))
        throw DomainError("energy: tau is not a grid point of the trajectory");
    return g;
}

bool any_forcing(const Trajectory& traj) {
    for (int f = 0; f < traj.fields(); ++f)
        if (traj.has_forcing(f)) return true;
    return false;
}

}  // namespace

nlohmann::json Verdict::to_json() const {
    return {{"name", name},         {"statistic", num(statistic)}, {"threshold", num(threshold)},
            {"pass", pass},         {"ensemble", ensemble},       {"detail", detail}};
}

double EnergyReport::sup_ratio() const {
    double s = 0.0;
    for (const auto& p : points) s = std::max(s, p.ratio);
    return s;
}

const EnergyPoint& EnergyReport::at(double tau) const {
    for (const auto& p : points)
        if (std::abs(p.tau - tau) <= 1e-12 * std::max(tau, 1e-300)) return p;
    throw DomainError("energy report: tau is not a grid point");
}

nlohmann::json EnergyReport::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points)
        pts.push_back({{"tau", p.tau}, {"E", num(p.E)}, {"D", num(p.D)}, {"F", num(p.F)}, {"ratio", num(p.ratio)}});
    return {{"theorem", theorem}, {"M", M}, {"sup_ratio", num(sup_ratio())}, {"meta", meta}, {"points", pts}};
}

std::string EnergyReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "tau,E,D,F,ratio\n";
    for (const auto& p : points) os << p.tau << ',' << p.E << ',' << p.D << ',' << p.F << ',' << p.ratio << '\n';
    return os.str();
}

EnergyReport energy_first(const Trajectory& traj, const AsymptoticData& data, const LPPartition& part, int M) {
    check_order(M);
    const int I = traj.fields() - 1;
    if (data.regular_count() != I) throw DomainError("energy_first: data and trajectory disagree on I");
    const auto& lat = *traj.lattice();
    const auto& bg = traj.background();
    const auto& grid = traj.grid();

    EnergyReport rep;
    rep.theorem = "first";
    rep.M = M;
    rep.meta = {{"lattice", lat.spec()}, {"partition", part.spec()}, {"background", bg.spec()}};

    const auto lam0 = eigenvalues(lat, bg, 0.0);
    std::vector<double> wd(lam0.size());
    for (std::size_t l = 0; l < lam0.size(); ++l) wd[l] = std::pow(1.0 + lam0[l], M + 1);
    double D = power_sum(wd, data.O.degree_power()) + power_sum(wd, data.frak_h.degree_power());
    for (const auto& f : data.phi0) D += power_sum(wd, f.degree_power());

    const bool forced = any_forcing(traj);
    const auto integrand = [&](double tau) {
        const auto lam = eigenvalues(lat, bg, tau);
        std::vector<double> w(lam.size());
        for (std::size_t l = 0; l < lam.size(); ++l) {
            double s = 0.0;
            for (int m = 0; m <= M; ++m) s += std::pow(lam[l], m);
            w[l] = s + tau * std::pow(lam[l], M) * lp_sobolev_weight(part, 0.5, lam[l]);
        }
        double acc = 0.0;
        for (int f = 0; f <= I; ++f)
            if (traj.has_forcing(f)) acc += power_sum(w, traj.forcing_power(tau, f));
        return acc;
    };

    double F = 0.0;
    double prev = 0.0;
    std::vector<double> vp, dp;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double tau = grid[g];
        if (forced) F += simpson(integrand, prev, tau);
        prev = tau;
        const auto lam = eigenvalues(lat, bg, tau);
        double E = 0.0;
        for (int f = 0; f <= I; ++f) {
            traj.degree_power(g, f, vp, dp);
            for (std::size_t l = 0; l < lam.size(); ++l) {
                const double lm = std::pow(lam[l], M);
                const double r = std::sqrt(1.0 + lam[l]);
                if (f == 0)
                    E += tau * tau * lm * (r * dp[l] + r * r * r * vp[l]);
                else
                    E += tau * lm * r * dp[l] + tau * lm * lam[l] * r * vp[l] + std::pow(1.0 + lam[l], M + 1) * vp[l];
            }
        }
        rep.points.push_back({tau, E, D, F, ratio_of(E, D, F)});
    }
    return rep;
}

EnergyReport energy_second(const Trajectory& traj, const LPPartition& part, int M) {
    check_order(M);
    const int I = traj.fields() - 1;
    const auto& lat = *traj.lattice();
    const auto& bg = traj.background();
    const auto& grid = traj.grid();
    const std::size_t G = grid.size();

    EnergyReport rep;
    rep.theorem = "second";
    rep.M = M;
    rep.meta = {{"lattice", lat.spec()}, {"partition", part.spec()}, {"background", bg.spec()}};

    std::vector<double> vp, dp;
    // Pointwise pieces, the two time-integrand densities, and 𝓓 at the top of the grid.
    std::vector<double> pointwise(G, 0.0), dens0(G, 0.0), densi(G, 0.0);
    double D = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
        const double tau = grid[g];
        const auto lam = eigenvalues(lat, bg, tau);
        for (int f = 0; f <= I; ++f) {
            traj.degree_power(g, f, vp, dp);
            for (std::size_t l = 0; l < lam.size(); ++l) {
                const double x = lam[l];
                const double r = std::sqrt(1.0 + x);
                const double lm = std::pow(x, M);
                double lsum = 0.0, lsum_lo = 0.0;
                for (int m = 0; m <= M; ++m) {
                    lsum += std::pow(x, m);
                    if (m < M) lsum_lo += std::pow(x, m);
                }
                const double hM = std::pow(1.0 + x, M);
                if (g + 1 == G) D += hM * r * r * r * vp[l] + hM * r * dp[l];
                if (f == 0) {
                    pointwise[g] += tau * hM * r * vp[l] + tau * tau * hM * r * r * r * vp[l] +
                                    tau * tau * lm * r * dp[l] + tau * tau * lsum_lo * dp[l];
                    dens0[g] += tau * hM * (1.0 + x) * vp[l];
                } else {
                    pointwise[g] += hM * r * r * r * vp[l] + lsum * r * dp[l];
                    densi[g] += lsum * r * dp[l] / tau;
                }
            }
        }
    }
    const bool forced = any_forcing(traj);
    const auto integrand = [&](double tau) {
        const auto lam = eigenvalues(lat, bg, tau);
        std::vector<double> w(lam.size());
        for (std::size_t l = 0; l < lam.size(); ++l) {
            double s = 0.0;
            for (int m = 0; m <= M; ++m) s += std::pow(lam[l], m);
            w[l] = tau * s * lp_sobolev_weight(part, 0.5, lam[l]);
        }
        double acc = 0.0;
        for (int f = 0; f <= I; ++f)
            if (traj.has_forcing(f)) acc += power_sum(w, traj.forcing_power(tau, f));
        return acc;
    };

    rep.points.resize(G);
    double J = 0.0, F = 0.0;
    for (std::size_t gg = G; gg-- > 0;) {
        if (gg + 1 < G) {
            const double h = grid[gg + 1] - grid[gg];
            J += 0.5 * h * (dens0[gg] + dens0[gg + 1] + densi[gg] + densi[gg + 1]);
            if (forced) F += simpson(integrand, grid[gg], grid[gg + 1]);
        }
        const double E = pointwise[gg] + J;
        rep.points[gg] = {grid[gg], E, D, F, ratio_of(E, D, F)};
    }
    return rep;
}

EnergyTriple energy_first_at(const Trajectory& traj, const AsymptoticData& data, const LPPartition& part, int M,
                             double tau) {
    grid_index(traj.grid(), tau);
    const auto& p = energy_first(traj, data, part, M).at(tau);
    return {p.E, p.D, p.F};
}

EnergyTriple energy_second_at(const Trajectory& traj, const LPPartition& part, int M, double tau) {
    grid_index(traj.grid(), tau);
    const auto& p = energy_second(traj, part, M).at(tau);
    return {p.E, p.D, p.F};
}

nlohmann::json ShellEnergy::to_json() const {
    return {{"k", k}, {"tau", tau}, {"a_k", num(a_k)}, {"regime", high ? "high" : "low"}, {"X", X}};
}

ShellEnergy shell_energy(const Trajectory& traj, const LPPartition& part, int k, double tau, double X, int field,
                         int M) {
    if (!part.in_range(k)) throw DomainError("shell_energy: k outside the partition range");
    check_order(M);
    const std::size_t g = grid_index(traj.grid(), tau);
    const auto lam = eigenvalues(*traj.lattice(), traj.background(), tau);
    std::vector<double> vp, dp;
    traj.degree_power(g, field, vp, dp);
    ShellEnergy se;
    se.k = k;
    se.tau = tau;
    se.X = X;
    se.high = tau >= X * std::exp2(-k - 1);
    for (std::size_t l = 0; l < lam.size(); ++l) {
        const double m = part.shell(k, lam[l]);
        if (m == 0.0) continue;
        const double w = std::pow(lam[l], M) * m * m;
        se.a_k += w * (tau * dp[l] + vp[l] / tau + tau * lam[l] * vp[l]);
    }
    return se;
}

FitModel parse_fit_model(const std::string& name) {
    if (name == "power") return FitModel::Power;
    if (name == "log_square") return FitModel::LogSquare;
    if (name == "dyadic") return FitModel::Dyadic;
    throw DomainError("unknown fit model '" + name + "' (expected power, log_square, dyadic)");
}

FitResult fit_power_exponent(const std::vector<double>& x, const std::vector<double>& y, FitModel model) {
    if (x.size() != y.size()) throw DomainError("fit: x and y lengths differ");
    if (x.size() < 4) throw DomainError("fit: at least 4 points are required");
    std::vector<double> u(x.size()), v(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) throw DomainError("fit: y values must be positive");
        switch (model) {
            case FitModel::Power:
                if (!(x[i] > 0.0)) throw DomainError("fit: x values must be positive for the power model");
                u[i] = std::log(x[i]);
                v[i] = std::log(y[i]);
                break;
            case FitModel::LogSquare: {
                if (!(x[i] > 0.0)) throw DomainError("fit: x values must be positive for the log_square model");
                const double lx = std::log(x[i]);
                u[i] = std::log1p(lx * lx);
                v[i] = std::log(y[i]);
                break;
            }
            case FitModel::Dyadic:
                u[i] = x[i];
                v[i] = std::log2(y[i]);
                break;
        }
    }
    const double n = static_cast<double>(u.size());
    double mu = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mu += u[i];
        mv += v[i];
    }
    mu /= n;
    mv /= n;
    double suu = 0.0, suv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - mu) * (u[i] - mu);
        suv += (u[i] - mu) * (v[i] - mv);
    }
    if (!(suu > 0.0)) throw DomainError("fit: x values are degenerate");
    FitResult r;
    r.exponent = suv / suu;
    r.intercept = mv - r.exponent * mu;
    double ss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = v[i] - r.intercept - r.exponent * u[i];
        ss += e * e;
    }
    r.residual = std::sqrt(ss / n);
    return r;
}

Verdict shell_decay_check(const ConformalBackground& bg, const LPPartition& part, int l_lo, int l_hi,
                          const ShellDecayOptions& opt) {
    if (l_hi - l_lo + 1 < 5) throw DomainError("shell_decay_check: at least 5 dyadic shells are required");
    if (l_lo < 0 || l_hi > part.k_max()) throw DomainError("shell_decay_check: shells outside the partition range");
    const double f0 = bg.f(0.0);
    const ConformalBackground frozen = ConformalBackground::constant(f0);
    LinearSystem sys;
    sys.N = 1;
    sys.sign = {1};
    sys.rtol = opt.rtol;
    sys.atol = opt.atol;
    sys.frobenius_order = opt.frobenius_order;

    std::vector<double> ls, aj, ay;
    std::vector<double> bv, bd;
    for (int l = l_lo; l <= l_hi; ++l) {
        const double lam = std::ldexp(1.0, 2 * l);
        const double lambda0 = lam * f0 * f0;
        FrobeniusBasis fb(sys, frozen, lambda0, sys.frobenius_order);
        fb.validate(opt.tau_seed, std::max(opt.rtol, 1e-14));
        fb.evaluate(opt.tau_seed, bv, bd);
        const auto sol = propagate_degree(sys, frozen, lambda0, opt.tau_seed, 1.0, {opt.tau_seed, 1.0});
        const double ell = part.log_multiplier(lam);
        const double root = 2.0 * std::sqrt(lam);
        const auto amplitude = [&](double value_datum, double log_datum) {
            const double s0 = bv[0] * value_datum + bv[1] * log_datum;
            const double s1 = bd[0] * value_datum + bd[1] * log_datum;
            const double v = sol.v(1, 0, 0) * s0 + sol.v(1, 1, 0) * s1;
            const double d = sol.d(1, 0, 0) * s0 + sol.d(1, 1, 0) * s1;
            return std::hypot(v, d / root);
        };
        ls.push_back(l);
        aj.push_back(amplitude(1.0, 0.0));
        ay.push_back(amplitude(2.0 * ell, 2.0));
    }
    const auto fj = fit_power_exponent(ls, aj, FitModel::Dyadic);
    const auto fy = fit_power_exponent(ls, ay, FitModel::Dyadic);
    Verdict v;
    v.name = "toy-shells";
    v.statistic = std::max(std::abs(fj.exponent + 0.5), std::abs(fy.exponent + 0.5));
    v.threshold = opt.tolerance;
    v.pass = v.statistic <= v.threshold;
    std::ostringstream os;
    os << "shells l=" << l_lo << ".." << l_hi << ", lambda=4^l on f frozen at " << f0;
    v.ensemble = os.str();
    v.detail = {{"slope_J", fj.exponent}, {"slope_Y", fy.exponent},     {"residual_J", fj.residual},
                {"residual_Y", fy.residual}, {"l", ls},                  {"amplitude_J", aj},
                {"amplitude_Y", ay},         {"tau_seed", opt.tau_seed}, {"partition", part.spec()}};
    return v;
}

Verdict singular_blowup_check(const Trajectory& traj_y, const AsymptoticData& data, int M, double drift_tolerance) {
    check_order(M);
    const auto& lat = *traj_y.lattice();
    const auto& bg = traj_y.background();
    const auto& grid = traj_y.grid();
    Verdict v;
    v.name = "singular-blowup";
    v.threshold = drift_tolerance;
    const auto lam0 = eigenvalues(lat, bg, 0.0);
    std::vector<double> w0(lam0.size());
    for (std::size_t l = 0; l < lam0.size(); ++l) w0[l] = std::pow(1.0 + lam0[l], M + 1);
    const double den0 = power_sum(w0, data.O.degree_power());
    if (den0 == 0.0) {
        v.statistic = 0.0;
        v.pass = true;
        v.detail = {{"note", "O = 0"}};
        return v;
    }
    std::vector<double> R(grid.size(), 0.0), vp, dp;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double tau = grid[g];
        const auto lam = eigenvalues(lat, bg, tau);
        traj_y.degree_power(g, 0, vp, dp);
        double num_acc = 0.0;
        for (std::size_t l = 0; l < lam.size(); ++l) num_acc += std::pow(lam[l], M) * (1.0 + lam[l]) * vp[l];
        const double lg = std::log(tau);
        R[g] = num_acc / ((1.0 + lg * lg) * den0);
    }
    const auto sup_from = [&](double tau_lo) {
        double s = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g)
            if (grid[g] >= tau_lo * (1.0 - 1e-9)) s = std::max(s, R[g]);
        return s;
    };
    std::vector<double> decades, sups, drifts;
    for (double t = 1e-3; t >= std::max(grid.front(), 1e-6) * (1.0 - 1e-9); t /= 10.0) {
        decades.push_back(t);
        sups.push_back(sup_from(t));
    }
    double worst = 0.0;
    bool finite = true;
    for (double s : sups) finite = finite && std::isfinite(s);
    for (std::size_t i = 1; i < sups.size(); ++i) {
        const double d = sups[i - 1] > 0.0 ? std::abs(sups[i] - sups[i - 1]) / sups[i - 1] : 0.0;
        drifts.push_back(d);
        worst = std::max(worst, d);
    }
    v.statistic = worst;
    v.pass = finite && sups.size() >= 2 && worst < drift_tolerance;
    v.detail = {{"decades", decades},
                {"sup_statistic", sups},
                {"drift", drifts},
                {"sup_overall", num(sup_from(grid.front()))},
                {"M", M}};
    return v;
}

nlohmann::json EnsembleSpec::to_json() const {
    return {{"draws", draws},
            {"seed", seed},
            {"coupling_scale", coupling_scale},
            {"forcing", forcing},
            {"M", M},
            {"I", I},
            {"n", n},
            {"tau_min", tau_min},
            {"per_decade", per_decade},
            {"linear_points", linear_points},
            {"drift_limit", drift_limit},
            {"background", background.spec()},
            {"partition", partition.spec()}};
}

namespace {

SystemConfig ensemble_config(const EnsembleSpec& spec, int sigma) {
    SystemConfig cfg;
    cfg.I = spec.I;
    cfg.sigma = sigma;
    cfg.M_order = spec.M;
    cfg.tau_seed = spec.tau_min;
    if (spec.coupling_scale > 0.0) cfg.couplings = random_couplings(cfg, spec.coupling_scale, mix_seed(spec.seed, 101));
    if (spec.forcing)
        for (int i = 0; i <= spec.I; ++i) {
            ForcingSpec f;
            f.field = i;
            f.shape = ForcingShape::Bump;
            f.center = 0.5;
            f.width = 0.3;
            f.amplitude = 1.0;
            f.spatial = SpatialKind::Random;
            f.decay = spec.M + 2.0;
            f.seed = mix_seed(spec.seed, 200 + static_cast<std::uint64_t>(i));
            cfg.forcings.push_back(f);
        }
    cfg.validate();
    return cfg;
}

}  // namespace

Verdict verify_theorem_ratio(const EnsembleSpec& spec, Theorem which, const std::vector<int>& resolutions) {
    if (spec.draws < 1) throw DomainError("verify_theorem_ratio: at least one draw is required");
    if (resolutions.size() < 2) throw DomainError("verify_theorem_ratio: at least two resolutions are required");
    const int sigma = which == Theorem::First ? 1 : 2;
    const SystemConfig cfg = ensemble_config(spec, sigma);
    const LinearSystem sys = model_system(cfg);
    const auto grid = TimeGrid::log_refined(spec.tau_min, spec.per_decade, spec.linear_points);
    const int M = spec.M;

    std::vector<double> sups;
    nlohmann::json per = nlohmann::json::array();
    for (int L : resolutions) {
        const auto lattice = build_lattice(spec.n, L);
        const double from = which == Theorem::First ? spec.tau_min : 1.0;
        const double to = which == Theorem::First ? 1.0 : spec.tau_min;
        const auto prop = build_propagator(sys, spec.background, lattice, from, to, grid);
        double sup = 0.0;
        double worst_tau = 0.0;
        for (int d = 0; d < spec.draws; ++d) {
            Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(d)));
            EnergyReport rep;
            if (which == Theorem::First) {
                const auto data =
                    random_asymptotic_data(lattice, spec.I, rng, M + 2.0, spec.partition, spec.background);
                rep = energy_first(trajectory_from_data(prop, model_data_vector(data, spec.I)), data,
                                   spec.partition, M);
            } else {
                const int n = sys.N;
                std::vector<Field> vals, ders;
                for (int a = 0; a < n; ++a) {
                    vals.push_back(random_field(lattice, rng, M + 2.5));
                    ders.push_back(random_field(lattice, rng, M + 1.5));
                }
                std::vector<double> st(static_cast<std::size_t>(lattice->mode_count() * 2 * n));
                for (std::int64_t m = 0; m < lattice->mode_count(); ++m)
                    for (int a = 0; a < n; ++a) {
                        st[static_cast<std::size_t>(m * 2 * n + a)] = vals[static_cast<std::size_t>(a)][m];
                        st[static_cast<std::size_t>(m * 2 * n + n + a)] = ders[static_cast<std::size_t>(a)][m];
                    }
                rep = energy_second(trajectory_from_states(prop, st), spec.partition, M);
            }
            for (const auto& p : rep.points)
                if (!(p.ratio <= sup)) {
                    sup = p.ratio;
                    worst_tau = p.tau;
                }
        }
        sups.push_back(sup);
        per.push_back({{"l_max", L}, {"sup_ratio", num(sup)}, {"worst_tau", worst_tau},
                       {"steps", prop->total_steps()}});
    }
    double drift = 1.0;
    bool finite = true;
    for (std::size_t i = 0; i < sups.size(); ++i) {
        finite = finite && std::isfinite(sups[i]);
        if (i == 0) continue;
        const double a = sups[i - 1], b = sups[i];
        if (a == 0.0 && b == 0.0) continue;
        const double r = (a > 0.0 && b > 0.0) ? std::max(a / b, b / a) : INFINITY;
        drift = std::max(drift, r);
    }
    Verdict v;
    v.name = which == Theorem::First ? "forward-first" : "backward-second";
    v.statistic = drift;
    v.threshold = spec.drift_limit;
    v.pass = finite && drift < spec.drift_limit;
    std::ostringstream os;
    os << spec.draws << " draws, sigma=" << sigma << ", coupling scale " << spec.coupling_scale
       << (spec.forcing ? ", forced" : ", unforced");
    v.ensemble = os.str();
    v.detail = {{"resolutions", per}, {"spec", spec.to_json()}};
    return v;
}

nlohmann::json RoundtripReport::to_json() const {
    return {{"max_rel_error", num(max_rel_error)},
            {"frak_h_defect", num(frak_h_defect)},
            {"worst_condition", num(worst_condition)},
            {"warnings", warnings},
            {"pass", pass}};
}

RoundtripReport roundtrip_check(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                                const LPPartition& part, std::uint64_t seed, double tolerance, double decay) {
    cfg.validate();
    const LinearSystem sys = model_system(cfg);
    const int n = sys.N;
    const auto grid = TimeGrid::log_refined(cfg.tau_seed, 4, 32);
    Rng rng(seed);
    const auto data = random_asymptotic_data(lattice, cfg.I, rng, decay, part, bg);

    const auto fwd = build_propagator(sys, bg, lattice, cfg.tau_seed, 1.0, grid);
    const Trajectory tf = trajectory_from_data(fwd, model_data_vector(data, cfg.I));
    const std::size_t top = tf.grid().size() - 1;
    const std::int64_t modes = lattice->mode_count();
    std::vector<double> st(static_cast<std::size_t>(modes * 2 * n));
    for (std::int64_t m = 0; m < modes; ++m)
        for (int a = 0; a < n; ++a) {
            st[static_cast<std::size_t>(m * 2 * n + a)] = tf.value(top, a, m);
            st[static_cast<std::size_t>(m * 2 * n + n + a)] = tf.deriv(top, a, m);
        }
    const auto bwd = build_propagator(sys, bg, lattice, 1.0, cfg.tau_seed, grid);
    const Trajectory tb = trajectory_from_states(bwd, st);
    const Extraction ex = extract_data_vectors(tb, cfg.tau_seed);

    RoundtripReport rep;
    rep.warnings = ex.warnings;
    rep.worst_condition = ex.worst_condition;
    AsymptoticData rec(lattice, cfg.I);
    for (std::int64_t m = 0; m < modes; ++m) {
        const double* x = ex.data.data() + static_cast<std::size_t>(m * 2 * n);
        rec.h[m] = x[0];
        rec.O[m] = 0.5 * x[1];
        for (int i = 1; i < n; ++i) rec.phi0[static_cast<std::size_t>(i - 1)][m] = x[2 * i];
        double num_acc = 0.0, den = 0.0;
        const auto acc = [&](double a, double b) {
            num_acc += (a - b) * (a - b);
            den += b * b;
        };
        acc(rec.O[m], data.O[m]);
        acc(rec.h[m], data.h[m]);
        for (int i = 1; i < n; ++i)
            acc(rec.phi0[static_cast<std::size_t>(i - 1)][m], data.phi0[static_cast<std::size_t>(i - 1)][m]);
        if (den > 0.0) rep.max_rel_error = std::max(rep.max_rel_error, std::sqrt(num_acc / den));
    }
    rec.frak_h = renormalize_h(rec.h, rec.O, part, bg);
    // Independent path: the log∇ operator applied at τ = 0.
    const Field check = rec.frak_h - rec.h + 2.0 * log_nabla(part, rec.O, 0.0, bg);
    double scale = 0.0, defect = 0.0;
    for (std::int64_t m = 0; m < modes; ++m) {
        defect = std::max(defect, std::abs(check[m]));
        scale = std::max(scale, std::abs(rec.h[m]) + std::abs(rec.frak_h[m]));
    }
    rep.frak_h_defect = scale > 0.0 ? defect / scale : 0.0;
    rep.pass = rep.max_rel_error <= tolerance && rep.frak_h_defect <= 1e-10;
    return rep;
}

Verdict decomposition_check(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                            const LPPartition& part, std::uint64_t seed, double eps, double tolerance) {
    cfg.validate();
    const auto grid = TimeGrid::log_refined(cfg.tau_seed, 8, 64);
    Rng rng(seed);
    const auto data = random_asymptotic_data(lattice, cfg.I, rng, 4.0, part, bg);
    const std::int64_t modes = lattice->mode_count();

    const Trajectory full = solve_forward(cfg, bg, lattice, data, grid);
    const SplitResult sp = split_singular_component(data, cfg, bg, lattice, part, grid);
    double split_err = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double num_acc = 0.0, den = 0.0;
        for (std::int64_t m = 0; m < modes; ++m) {
            const double v = full.value(g, 0, m), d = full.deriv(g, 0, m);
            const double dv = sp.y.value(g, 0, m) + sp.j.value(g, 0, m) - v;
            const double dd = sp.y.deriv(g, 0, m) + sp.j.deriv(g, 0, m) - d;
            num_acc += dv * dv + dd * dd;
            den += v * v + d * d;
        }
        if (den > 0.0) split_err = std::max(split_err, std::sqrt(num_acc / den));
    }

    SystemConfig reg = cfg;
    reg.sigma = 2;
    reg.couplings.clear();
    for (const auto& c : cfg.couplings)
        if (!(c.row >= 1 && c.col == 0)) reg.couplings.push_back(c);
    AsymptoticData other = data;
    other.O = random_field(lattice, rng, 4.0);
    other.h = random_field(lattice, rng, 4.0);
    other.frak_h = renormalize_h(other.h, other.O, part, bg);
    const Trajectory ra = solve_forward(reg, bg, lattice, data, grid);
    const Trajectory rb = solve_forward(reg, bg, lattice, other, grid);
    std::int64_t differing = 0;
    for (std::size_t g = 0; g < grid.size(); ++g)
        for (int f = 1; f < ra.fields(); ++f)
            for (std::int64_t m = 0; m < modes; ++m) {
                const double a[2] = {ra.value(g, f, m), ra.deriv(g, f, m)};
                const double b[2] = {rb.value(g, f, m), rb.deriv(g, f, m)};
                if (std::memcmp(a, b, sizeof a) != 0) ++differing;
            }

    const EpsilonReport er = epsilon_construction_check(cfg, bg, data, eps);
    Verdict v;
    v.name = "singular-split";
    v.statistic = split_err;
    v.threshold = tolerance;
    v.pass = split_err <= tolerance && differing == 0 && er.pass;
    std::ostringstream os;
    os << "one random data draw on " << lattice->spec() << ", I=" << cfg.I << ", sigma=" << cfg.sigma;
    v.ensemble = os.str();
    v.detail = {{"split_relative_error", split_err},
                {"regular_rows_differing", differing},
                {"regular_bit_identical", differing == 0},
                {"epsilon", er.to_json()},
                {"seed", seed}};
    return v;
}

Verdict blowup_ensemble(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                        const LPPartition& part, std::uint64_t seed, int draws, int M, double decay) {
    if (draws < 1) throw DomainError("blowup_ensemble: at least one draw is required");
    SystemConfig c = cfg;
    c.tau_seed = std::min(cfg.tau_seed, 1e-7);
    c.validate();
    const auto grid = TimeGrid::log_refined(c.tau_seed, 8, 32);
    Verdict v;
    v.name = "singular-blowup";
    v.threshold = 0.1;
    v.pass = true;
    nlohmann::json per = nlohmann::json::array();
    for (int d = 0; d < draws; ++d) {
        Rng rng(mix_seed(seed, 300 + static_cast<std::uint64_t>(d)));
        AsymptoticData data(lattice, c.I);
        data.O = random_field(lattice, rng, decay);
        data.frak_h = renormalize_h(data.h, data.O, part, bg);
        const auto sp = split_singular_component(data, c, bg, lattice, part, grid);
        const Verdict one = singular_blowup_check(sp.y, data, M, v.threshold);
        v.statistic = std::max(v.statistic, one.statistic);
        v.pass = v.pass && one.pass;
        per.push_back(one.detail);
    }
    std::ostringstream os;
    os << draws << " random O draws with h = 0 (decay " << decay << ") on " << lattice->spec() << ", M=" << M
       << ", seeded at " << c.tau_seed;
    v.ensemble = os.str();
    v.detail = {{"draws", per}, {"seed", seed}};
    return v;
}

nlohmann::json BesselAgreement::to_json() const {
    return {{"lambda", lambda}, {"tau_seed", tau_seed}, {"err_j", err_j},
            {"err_y", err_y},   {"remainder", remainder}, {"steps", steps}};
}

BesselAgreement bessel_agreement(double lambda, double tau_seed, int per_decade, int linear_points, double rtol,
                                 double atol) {
    if (!(lambda > 0.0)) throw DomainError("bessel_agreement: lambda must be positive");
    if (!(tau_seed > 0.0 && tau_seed < 1.0)) throw DomainError("bessel_agreement: tau_seed must lie in (0, 1)");
    const auto bg = ConformalBackground::constant(1.0);
    LinearSystem sys;
    sys.N = 1;
    sys.sign = {1};
    sys.rtol = rtol;
    sys.atol = atol;
    const auto grid = TimeGrid::log_refined(tau_seed, per_decade, linear_points);
    const auto sol = propagate_degree(sys, bg, lambda, tau_seed, 1.0, grid.taus());
    FrobeniusBasis fb(sys, bg, lambda, sys.frobenius_order);
    std::vector<double> bv, bd;
    fb.evaluate(tau_seed, bv, bd);
    constexpr double kEuler = 0.57721566490153286;
    const double shift = std::log(std::sqrt(lambda)) + kEuler;
    const double ycoef = std::sqrt(M_PI * M_PI / 4.0 + shift * shift);
    BesselAgreement r;
    r.lambda = lambda;
    r.tau_seed = tau_seed;
    r.remainder = fb.remainder(tau_seed);
    r.steps = sol.stats.steps;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double x = 2.0 * std::sqrt(lambda) * grid[g];
        const double J = bessel_j0(x), Y = bessel_y0(x);
        const double mod = std::hypot(J, Y);
        const double j = bv[0] * sol.v(g, 0, 0) + bd[0] * sol.v(g, 1, 0);
        const double y = bv[1] * sol.v(g, 0, 0) + bd[1] * sol.v(g, 1, 0);
        r.err_j = std::max(r.err_j, std::abs(j - J) / mod);
        r.err_y = std::max(r.err_y, std::abs(y - (M_PI / 2.0 * Y - shift * J)) / (mod * ycoef));
    }
    return r;
}

Verdict bessel_check(const std::vector<double>& lambdas, double tau_seed, double tolerance) {
    if (lambdas.empty()) throw DomainError("bessel_check: no lambda values");
    Verdict v;
    v.name = "bessel";
    v.threshold = tolerance;
    nlohmann::json per = nlohmann::json::array();
    for (double l : lambdas) {
        const auto r = bessel_agreement(l, tau_seed);
        v.statistic = std::max({v.statistic, r.err_j, r.err_y});
        per.push_back(r.to_json());
    }
    v.pass = std::isfinite(v.statistic) && v.statistic <= tolerance;
    std::ostringstream os;
    os << lambdas.size() << " values of lambda up to " << *std::max_element(lambdas.begin(), lambdas.end())
       << ", tau from " << tau_seed << " to 1";
    v.ensemble = os.str();
    v.detail = {{"runs", per}};
    return v;
}

}  // namespace dslab
