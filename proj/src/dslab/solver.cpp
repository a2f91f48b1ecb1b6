#include "dslab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "dslab/errors.hpp"
#include "dslab/rng.hpp"

namespace dslab {

AsymptoticData::AsymptoticData(const LatticePtr& lattice, int I)
    : O(lattice), h(lattice), frak_h(lattice), phi0(static_cast<std::size_t>(std::max(I, 0)), Field(lattice)) {}

nlohmann::json AsymptoticData::to_json() const {
    nlohmann::json p = nlohmann::json::array();
    for (const auto& f : phi0) p.push_back(f.coeffs());
    return {{"lattice", lattice()->to_json()},
            {"O", O.coeffs()},
            {"h", h.coeffs()},
            {"frak_h", frak_h.coeffs()},
            {"phi0", p}};
}

Field renormalize_h(const Field& h, const Field& O, const LPPartition& part, const ConformalBackground& bg,
                    double tau0) {
    check_same_lattice(h, O);
    Field out = h;
    for (const auto& d : h.lattice()->degrees()) {
        const double ell = part.log_multiplier(eigenvalue_at(bg, d.lambda0, tau0));
        if (ell == 0.0) continue;
        for (std::int64_t i = 0; i < d.mult; ++i) out[d.offset + i] -= 2.0 * ell * O[d.offset + i];
    }
    return out;
}

AsymptoticData random_asymptotic_data(const LatticePtr& lattice, int I, Rng& rng, double decay,
                                      const LPPartition& part, const ConformalBackground& bg) {
    AsymptoticData data(lattice, I);
    data.O = random_field(lattice, rng, decay);
    data.h = random_field(lattice, rng, decay);
    for (auto& f : data.phi0) f = random_field(lattice, rng, decay);
    data.frak_h = renormalize_h(data.h, data.O, part, bg);
    return data;
}

DegreeSolution propagate_degree(const LinearSystem& sys, const ConformalBackground& bg, double lambda0,
                                double tau_from, double tau_to, const std::vector<double>& samples) {
    if (!(tau_from > 0.0) || !(tau_to > 0.0)) throw DomainError("integrate: tau_from and tau_to must be positive");
    if (tau_from == tau_to) throw DomainError("integrate: tau_from equals tau_to");
    const auto find = [&](double t) {
        const auto it = std::find(samples.begin(), samples.end(), t);
        if (it == samples.end()) throw DomainError("integrate: endpoint missing from the sample grid");
        return static_cast<std::size_t>(it - samples.begin());
    };
    const std::size_t i_from = find(tau_from);
    const std::size_t i_to = find(tau_to);

    const int n = sys.N;
    const int nf = static_cast<int>(sys.forcings.size());
    const int cols = 2 * n + nf;
    const int stride = 2 * n;
    DegreeSolution out;
    out.components = n;
    out.columns = cols;
    out.value.assign(samples.size() * static_cast<std::size_t>(cols * n), 0.0);
    out.deriv.assign(samples.size() * static_cast<std::size_t>(cols * n), 0.0);

    std::vector<double> y(static_cast<std::size_t>(cols * stride), 0.0);
    for (int c = 0; c < stride; ++c) y[static_cast<std::size_t>(c * stride + c)] = 1.0;

    const auto record = [&](std::size_t g, const std::vector<double>& st, bool log_mode) {
        const double tau = samples[g];
        for (int c = 0; c < cols; ++c)
            for (int a = 0; a < n; ++a) {
                const std::size_t at = (g * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)) * n + a;
                out.value[at] = st[static_cast<std::size_t>(c * stride + a)];
                const double dv = st[static_cast<std::size_t>(c * stride + n + a)];
                out.deriv[at] = log_mode ? dv / tau : dv;
            }
    };
    record(i_from, y, false);

    std::vector<double> kmat(static_cast<std::size_t>(n * n));
    std::vector<double> prof(static_cast<std::size_t>(nf));
    const auto rhs = [&](double t, const double* yy, double* dy, bool log_mode) {
        const double tau = log_mode ? std::exp(t) : t;
        coupling_matrix(sys, bg, lambda0, tau, kmat.data());
        for (int j = 0; j < nf; ++j) prof[static_cast<std::size_t>(j)] = sys.forcings[static_cast<std::size_t>(j)].profile(tau);
        const double t2 = tau * tau;
        for (int c = 0; c < cols; ++c) {
            const double* v = yy + c * stride;
            const double* w = v + n;
            double* dv = dy + c * stride;
            double* dw = dv + n;
            for (int a = 0; a < n; ++a) {
                double kphi = 0.0;
                for (int b = 0; b < n; ++b) {
                    const double kab = kmat[static_cast<std::size_t>(a * n + b)];
                    if (kab != 0.0) kphi += kab * v[b];
                }
                if (c >= stride) {
                    const auto& fs = sys.forcings[static_cast<std::size_t>(c - stride)];
                    if (fs.field == a) kphi -= prof[static_cast<std::size_t>(c - stride)];
                }
                const double s = sys.sign[static_cast<std::size_t>(a)];
                dv[a] = w[a];
                if (log_mode)
                    dw[a] = (1.0 - s) * w[a] - t2 * kphi;
                else
                    dw[a] = -s * w[a] / tau - kphi;
            }
        }
    };

    OdeOptions opt;
    opt.rtol = sys.rtol;
    opt.atol = sys.atol;

    const double dir = tau_to > tau_from ? 1.0 : -1.0;
    std::vector<double> breaks{tau_from};
    const double b = sys.log_time_below;
    if (b > std::min(tau_from, tau_to) && b < std::max(tau_from, tau_to)) breaks.push_back(b);
    breaks.push_back(tau_to);

    std::size_t g = i_from;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double t0 = breaks[s];
        const double t1 = breaks[s + 1];
        const bool log_mode = std::max(t0, t1) <= b;
        std::vector<double> targets;
        std::vector<long> index;
        while (g != i_to) {
            const std::size_t gn = dir > 0 ? g + 1 : g - 1;
            if (dir * (samples[gn] - t1) > 0.0) break;
            g = gn;
            targets.push_back(log_mode ? std::log(samples[g]) : samples[g]);
            index.push_back(static_cast<long>(g));
        }
        if (targets.empty() || index.back() < 0 || samples[static_cast<std::size_t>(index.back())] != t1) {
            targets.push_back(log_mode ? std::log(t1) : t1);
            index.push_back(-1);
        }
        if (log_mode)
            for (int c = 0; c < cols; ++c)
                for (int a = 0; a < n; ++a) y[static_cast<std::size_t>(c * stride + n + a)] *= t0;
        const auto f = [&](double t, const double* yy, double* dy) { rhs(t, yy, dy, log_mode); };
        const auto sink = [&](std::size_t i, const std::vector<double>& st) {
            if (index[i] >= 0) record(static_cast<std::size_t>(index[i]), st, log_mode);
        };
        const auto st = dop853(f, log_mode ? std::log(t0) : t0, y, targets, sink, opt);
        out.stats.steps += st.steps;
        out.stats.rejected += st.rejected;
        out.stats.evals += st.evals;
        if (log_mode)
            for (int c = 0; c < cols; ++c)
                for (int a = 0; a < n; ++a) y[static_cast<std::size_t>(c * stride + n + a)] /= t1;
    }
    return out;
}

Propagator::Propagator(LinearSystem sys, ConformalBackground bg, LatticePtr lattice, double tau_from,
                       double tau_to, const TimeGrid& grid)
    : sys_(std::move(sys)),
      bg_(std::move(bg)),
      lattice_(std::move(lattice)),
      grid_(grid.restricted(std::min(tau_from, tau_to), std::max(tau_from, tau_to))),
      tau_from_(tau_from),
      tau_to_(tau_to),
      from_index_(tau_from < tau_to ? 0 : grid_.size() - 1) {
    for (const auto& d : lattice_->degrees())
        sol_.push_back(propagate_degree(sys_, bg_, d.lambda0, tau_from_, tau_to_, grid_.taus()));
    for (const auto& f : sys_.forcings) {
        Field sp = f.spatial_field(lattice_);
        sp *= f.amplitude;
        forcing_fields_.push_back(std::move(sp));
    }
}

long Propagator::total_steps() const {
    long s = 0;
    for (const auto& d : sol_) s += d.stats.steps;
    return s;
}

PropagatorPtr build_propagator(const LinearSystem& sys, const ConformalBackground& bg, const LatticePtr& lattice,
                               double tau_from, double tau_to, const TimeGrid& grid) {
    return std::make_shared<const Propagator>(sys, bg, lattice, tau_from, tau_to, grid);
}

Trajectory::Trajectory(PropagatorPtr prop, std::vector<double> coef, std::vector<int> rows)
    : prop_(std::move(prop)), coef_(std::move(coef)), rows_(std::move(rows)) {
    const int cols = prop_->columns();
    const auto& lat = *prop_->lattice();
    if (coef_.size() != static_cast<std::size_t>(lat.mode_count() * cols))
        throw DomainError("trajectory: coefficient count does not match lattice and system");
    if (rows_.empty())
        for (int r = 0; r < prop_->components(); ++r) rows_.push_back(r);
    for (int r : rows_)
        if (r < 0 || r >= prop_->components()) throw DomainError("trajectory: row outside the system");
    const std::size_t c2 = static_cast<std::size_t>(cols * cols);
    gram_.assign(lat.degrees().size() * c2, 0.0);
    for (const auto& d : lat.degrees()) {
        double* gm = gram_.data() + static_cast<std::size_t>(d.l) * c2;
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const double* c = coef_.data() + static_cast<std::size_t>((d.offset + i) * cols);
            for (int a = 0; a < cols; ++a) {
                if (c[a] == 0.0) continue;
                for (int b = 0; b < cols; ++b) gm[a * cols + b] += c[a] * c[b];
            }
        }
    }
}

double Trajectory::combine(std::size_t g, int row, std::int64_t mode, bool deriv) const {
    const int cols = prop_->columns();
    const auto& sol = prop_->degree(prop_->lattice()->degree_of(mode));
    const double* c = coef_.data() + static_cast<std::size_t>(mode * cols);
    double acc = 0.0;
    for (int k = 0; k < cols; ++k) {
        if (c[k] == 0.0) continue;
        const double x = deriv ? sol.d(g, k, row) : sol.v(g, k, row);
        if (x != 0.0) acc += c[k] * x;
    }
    return acc;
}

double Trajectory::value(std::size_t g, int field, std::int64_t mode) const {
    return combine(g, row(field), mode, false);
}

double Trajectory::deriv(std::size_t g, int field, std::int64_t mode) const {
    return combine(g, row(field), mode, true);
}

Field Trajectory::value_field(std::size_t g, int field) const {
    Field f(lattice());
    for (std::int64_t m = 0; m < f.size(); ++m) f[m] = value(g, field, m);
    return f;
}

Field Trajectory::deriv_field(std::size_t g, int field) const {
    Field f(lattice());
    for (std::int64_t m = 0; m < f.size(); ++m) f[m] = deriv(g, field, m);
    return f;
}

void Trajectory::degree_power(std::size_t g, int field, std::vector<double>& value_power,
                              std::vector<double>& deriv_power) const {
    const int cols = prop_->columns();
    const int r = row(field);
    const auto& degs = lattice()->degrees();
    value_power.assign(degs.size(), 0.0);
    deriv_power.assign(degs.size(), 0.0);
    std::vector<double> xv(static_cast<std::size_t>(cols)), xd(static_cast<std::size_t>(cols));
    const std::size_t c2 = static_cast<std::size_t>(cols * cols);
    for (const auto& d : degs) {
        const auto& sol = prop_->degree(d.l);
        for (int k = 0; k < cols; ++k) {
            xv[static_cast<std::size_t>(k)] = sol.v(g, k, r);
            xd[static_cast<std::size_t>(k)] = sol.d(g, k, r);
        }
        const double* gm = gram_.data() + static_cast<std::size_t>(d.l) * c2;
        double pv = 0.0, pd = 0.0;
        for (int a = 0; a < cols; ++a) {
            double sv = 0.0, sd = 0.0;
            for (int b = 0; b < cols; ++b) {
                sv += gm[a * cols + b] * xv[static_cast<std::size_t>(b)];
                sd += gm[a * cols + b] * xd[static_cast<std::size_t>(b)];
            }
            pv += xv[static_cast<std::size_t>(a)] * sv;
            pd += xd[static_cast<std::size_t>(a)] * sd;
        }
        value_power[static_cast<std::size_t>(d.l)] = std::max(pv, 0.0);
        deriv_power[static_cast<std::size_t>(d.l)] = std::max(pd, 0.0);
    }
}

bool Trajectory::has_forcing(int field) const {
    for (const auto& f : prop_->system().forcings)
        if (f.field == row(field)) return true;
    return false;
}

std::vector<double> Trajectory::forcing_power(double tau, int field) const {
    const int cols = prop_->columns();
    const int base = 2 * prop_->components();
    const auto& fs = prop_->system().forcings;
    const auto& degs = lattice()->degrees();
    std::vector<double> out(degs.size(), 0.0);
    std::vector<double> p(fs.size(), 0.0);
    bool any = false;
    for (std::size_t j = 0; j < fs.size(); ++j)
        if (fs[j].field == row(field)) {
            p[j] = fs[j].profile(tau);
            any = any || p[j] != 0.0;
        }
    if (!any) return out;
    const std::size_t c2 = static_cast<std::size_t>(cols * cols);
    for (const auto& d : degs) {
        const double* gm = gram_.data() + static_cast<std::size_t>(d.l) * c2;
        double acc = 0.0;
        for (std::size_t a = 0; a < fs.size(); ++a)
            for (std::size_t b = 0; b < fs.size(); ++b)
                if (p[a] != 0.0 && p[b] != 0.0)
                    acc += p[a] * p[b] * gm[(base + static_cast<int>(a)) * cols + base + static_cast<int>(b)];
        out[static_cast<std::size_t>(d.l)] = std::max(acc, 0.0);
    }
    return out;
}

Trajectory trajectory_from_states(const PropagatorPtr& prop, const std::vector<double>& states) {
    const int n = prop->components();
    const int cols = prop->columns();
    const std::int64_t modes = prop->lattice()->mode_count();
    if (states.size() != static_cast<std::size_t>(modes * 2 * n))
        throw DomainError("integrate: state count does not match lattice and system");
    std::vector<double> coef(static_cast<std::size_t>(modes * cols), 0.0);
    const auto& ff = prop->forcing_fields();
    for (std::int64_t m = 0; m < modes; ++m) {
        for (int k = 0; k < 2 * n; ++k)
            coef[static_cast<std::size_t>(m * cols + k)] = states[static_cast<std::size_t>(m * 2 * n + k)];
        for (std::size_t j = 0; j < ff.size(); ++j)
            coef[static_cast<std::size_t>(m * cols + 2 * n) + j] = ff[j][m];
    }
    return Trajectory(prop, std::move(coef));
}

std::vector<double> seed_from_data(const LinearSystem& sys, const ConformalBackground& bg,
                                   const LatticePtr& lattice, const std::vector<double>& data, double tau_seed) {
    const int n = sys.N;
    const std::int64_t modes = lattice->mode_count();
    if (data.size() != static_cast<std::size_t>(modes * 2 * n))
        throw DomainError("seeding: data count does not match lattice and system");
    std::vector<double> states(data.size(), 0.0);
    const double tol = std::max(sys.rtol, 1e-14);
    std::vector<double> bv, bd;
    for (const auto& d : lattice->degrees()) {
        bool any = false;
        for (std::int64_t i = 0; i < d.mult * 2 * n && !any; ++i)
            any = data[static_cast<std::size_t>(d.offset * 2 * n + i)] != 0.0;
        if (!any) continue;
        FrobeniusBasis fb(sys, bg, d.lambda0, sys.frobenius_order);
        fb.validate(tau_seed, tol);
        fb.evaluate(tau_seed, bv, bd);
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const std::size_t m = static_cast<std::size_t>(d.offset + i);
            const double* x = data.data() + m * 2 * n;
            double* st = states.data() + m * 2 * n;
            for (int a = 0; a < n; ++a) {
                double v = 0.0, dv = 0.0;
                for (int col = 0; col < 2 * n; ++col) {
                    if (x[col] == 0.0) continue;
                    const double bvv = bv[static_cast<std::size_t>(a * 2 * n + col)];
                    const double bdd = bd[static_cast<std::size_t>(a * 2 * n + col)];
                    if (bvv != 0.0) v += bvv * x[col];
                    if (bdd != 0.0) dv += bdd * x[col];
                }
                st[a] = v;
                st[n + a] = dv;
            }
        }
    }
    return states;
}

Trajectory trajectory_from_data(const PropagatorPtr& prop, const std::vector<double>& data) {
    return trajectory_from_states(
        prop, seed_from_data(prop->system(), prop->background(), prop->lattice(), data, prop->tau_from()));
}

std::vector<double> model_data_vector(const AsymptoticData& data, int I) {
    if (data.regular_count() != I) throw DomainError("data: number of regular fields does not match I");
    const int n = I + 1;
    const std::int64_t modes = data.lattice()->mode_count();
    std::vector<double> x(static_cast<std::size_t>(modes * 2 * n), 0.0);
    for (std::int64_t m = 0; m < modes; ++m) {
        double* v = x.data() + static_cast<std::size_t>(m * 2 * n);
        v[0] = data.h[m];
        v[1] = 2.0 * data.O[m];
        for (int i = 1; i <= I; ++i) v[2 * i] = data.phi0[static_cast<std::size_t>(i - 1)][m];
    }
    return x;
}

std::vector<double> split_data_vector(const AsymptoticData& data, int I, const LPPartition& part,
                                      const ConformalBackground& bg) {
    if (data.regular_count() != I) throw DomainError("data: number of regular fields does not match I");
    const int n = I + 2;
    const auto& lat = *data.lattice();
    std::vector<double> x(static_cast<std::size_t>(lat.mode_count() * 2 * n), 0.0);
    const Field frak = renormalize_h(data.h, data.O, part, bg);
    for (const auto& d : lat.degrees()) {
        const double ell = part.log_multiplier(eigenvalue_at(bg, d.lambda0, 0.0));
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const std::int64_t m = d.offset + i;
            double* v = x.data() + static_cast<std::size_t>(m * 2 * n);
            v[0] = 2.0 * ell * data.O[m];
            v[1] = 2.0 * data.O[m];
            v[2] = frak[m];
            for (int r = 1; r <= I; ++r) v[2 * (r + 1)] = data.phi0[static_cast<std::size_t>(r - 1)][m];
        }
    }
    return x;
}

std::vector<ModeState> seed_state(const AsymptoticData& data, const SystemConfig& cfg,
                                  const ConformalBackground& bg, const LatticePtr& lattice, double tau_seed) {
    const LinearSystem sys = model_system(cfg);
    const auto st = seed_from_data(sys, bg, lattice, model_data_vector(data, cfg.I), tau_seed);
    const int n = sys.N;
    std::vector<ModeState> out(static_cast<std::size_t>(lattice->mode_count()));
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m].value.assign(st.begin() + static_cast<long>(m * 2 * n), st.begin() + static_cast<long>(m * 2 * n + n));
        out[m].deriv.assign(st.begin() + static_cast<long>(m * 2 * n + n),
                            st.begin() + static_cast<long>(m * 2 * n + 2 * n));
    }
    return out;
}

Trajectory integrate(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                     const std::vector<ModeState>& states, double tau_from, double tau_to, const TimeGrid& grid) {
    if (!(std::min(tau_from, tau_to) > 0.0)) throw DomainError("integrate: times must be positive");
    const LinearSystem sys = model_system(cfg);
    const int n = sys.N;
    if (states.size() != static_cast<std::size_t>(lattice->mode_count()))
        throw DomainError("integrate: one state per mode is required");
    std::vector<double> flat(states.size() * static_cast<std::size_t>(2 * n));
    for (std::size_t m = 0; m < states.size(); ++m) {
        if (static_cast<int>(states[m].value.size()) != n || static_cast<int>(states[m].deriv.size()) != n)
            throw DomainError("integrate: state size does not match I + 1");
        for (int a = 0; a < n; ++a) {
            flat[m * 2 * n + static_cast<std::size_t>(a)] = states[m].value[static_cast<std::size_t>(a)];
            flat[m * 2 * n + static_cast<std::size_t>(n + a)] = states[m].deriv[static_cast<std::size_t>(a)];
        }
    }
    std::vector<double> taus = grid.taus();
    taus.push_back(tau_from);
    taus.push_back(tau_to);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    auto prop = build_propagator(sys, bg, lattice, tau_from, tau_to, TimeGrid(taus));
    return trajectory_from_states(prop, flat);
}

Trajectory solve_forward(const SystemConfig& cfg, const ConformalBackground& bg, const LatticePtr& lattice,
                         const AsymptoticData& data, const TimeGrid& grid) {
    const LinearSystem sys = model_system(cfg);
    auto prop = build_propagator(sys, bg, lattice, cfg.tau_seed, 1.0, grid);
    return trajectory_from_data(prop, model_data_vector(data, cfg.I));
}

Extraction extract_data_vectors(const Trajectory& traj, double tau_min) {
    const auto& prop = *traj.propagator();
    const auto& sys = prop.system();
    const int n = sys.N;
    const std::size_t g = traj.grid().nearest(tau_min);
    const double tau = traj.grid()[g];
    if (std::abs(tau - tau_min) > 1e-12 * tau_min) throw DomainError("extract: tau_min is not a grid point");
    const auto& lat = *traj.lattice();
    Extraction ex;
    ex.data.assign(static_cast<std::size_t>(lat.mode_count() * 2 * n), 0.0);
    std::vector<double> bv, bd;
    for (const auto& d : lat.degrees()) {
        FrobeniusBasis fb(sys, prop.background(), d.lambda0, sys.frobenius_order);
        fb.validate(tau, std::max(sys.rtol, 1e-14));
        fb.evaluate(tau, bv, bd);
        Eigen::MatrixXd b(2 * n, 2 * n);
        for (int a = 0; a < n; ++a)
            for (int col = 0; col < 2 * n; ++col) {
                b(a, col) = bv[static_cast<std::size_t>(a * 2 * n + col)];
                b(n + a, col) = tau * bd[static_cast<std::size_t>(a * 2 * n + col)];
            }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
        const auto& sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        ex.worst_condition = std::max(ex.worst_condition, cond);
        if (cond > 1e12) {
            std::ostringstream os;
            os << "degree " << d.l << ": basis condition " << cond << " at tau_min = " << tau
               << "; a smaller tau_min is advised";
            ex.warnings.push_back(os.str());
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        Eigen::VectorXd st(2 * n);
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const std::int64_t m = d.offset + i;
            for (int a = 0; a < n; ++a) {
                double v = 0.0, dv = 0.0;
                const int cols = prop.columns();
                const double* c = traj.coefficients().data() + static_cast<std::size_t>(m * cols);
                const auto& sol = prop.degree(d.l);
                for (int k = 0; k < cols; ++k) {
                    if (c[k] == 0.0) continue;
                    v += c[k] * sol.v(g, k, a);
                    dv += c[k] * sol.d(g, k, a);
                }
                st(a) = v;
                st(n + a) = tau * dv;
            }
            const Eigen::VectorXd x = lu.solve(st);
            for (int k = 0; k < 2 * n; ++k) ex.data[static_cast<std::size_t>(m * 2 * n + k)] = x(k);
        }
    }
    return ex;
}

AsymptoticData extract_asymptotic_data(const Trajectory& traj, const LPPartition& part, double tau_min,
                                       std::vector<std::string>* warnings) {
    const int n = traj.propagator()->components();
    const Extraction ex = extract_data_vectors(traj, tau_min);
    AsymptoticData out(traj.lattice(), n - 1);
    const std::int64_t modes = traj.lattice()->mode_count();
    for (std::int64_t m = 0; m < modes; ++m) {
        const double* x = ex.data.data() + static_cast<std::size_t>(m * 2 * n);
        out.h[m] = x[0];
        out.O[m] = 0.5 * x[1];
        for (int i = 1; i < n; ++i) out.phi0[static_cast<std::size_t>(i - 1)][m] = x[2 * i];
    }
    out.frak_h = renormalize_h(out.h, out.O, part, traj.background());
    if (warnings) *warnings = ex.warnings;
    return out;
}

SplitResult split_singular_component(const AsymptoticData& data, const SystemConfig& cfg,
                                     const ConformalBackground& bg, const LatticePtr& lattice,
                                     const LPPartition& part, const TimeGrid& grid) {
    const LinearSystem sys = split_system(cfg);
    auto prop = build_propagator(sys, bg, lattice, cfg.tau_seed, 1.0, grid);
    Trajectory all = trajectory_from_data(prop, split_data_vector(data, cfg.I, part, bg));
    std::vector<int> jrows{1};
    for (int i = 1; i <= cfg.I; ++i) jrows.push_back(i + 1);
    return {all.view({0}), all.view(jrows)};
}

nlohmann::json EpsilonReport::to_json() const {
    return {{"eps", eps}, {"discrepancy", discrepancy}, {"ratios", ratios}, {"monotone", monotone}, {"pass", pass}};
}

EpsilonReport epsilon_construction_check(const SystemConfig& cfg, const ConformalBackground& bg,
                                         const AsymptoticData& data, double eps, double min_ratio) {
    if (!(eps > 0.0 && eps < 0.1)) throw DomainError("epsilon check: eps must lie in (0, 0.1)");
    const auto& lattice = data.lattice();
    const LinearSystem sys = singular_system(cfg);
    const std::int64_t modes = lattice->mode_count();
    const double ref_seed = std::min(cfg.tau_seed, 0.01 * eps);

    const auto end_state = [&](const Trajectory& t, std::vector<double>& v, std::vector<double>& d) {
        const std::size_t g = t.grid().size() - 1;
        v.resize(static_cast<std::size_t>(modes));
        d.resize(static_cast<std::size_t>(modes));
        for (std::int64_t m = 0; m < modes; ++m) {
            v[static_cast<std::size_t>(m)] = t.value(g, 0, m);
            d[static_cast<std::size_t>(m)] = t.deriv(g, 0, m);
        }
    };

    std::vector<double> x(static_cast<std::size_t>(modes * 2), 0.0);
    for (std::int64_t m = 0; m < modes; ++m) {
        x[static_cast<std::size_t>(2 * m)] = data.h[m];
        x[static_cast<std::size_t>(2 * m + 1)] = 2.0 * data.O[m];
    }
    auto ref_prop = build_propagator(sys, bg, lattice, ref_seed, 1.0, TimeGrid({ref_seed, 1.0}));
    std::vector<double> rv, rd;
    end_state(trajectory_from_data(ref_prop, x), rv, rd);

    EpsilonReport rep;
    for (int i = 0; i < 3; ++i) {
        const double e = eps / std::exp2(i);
        std::vector<double> st(static_cast<std::size_t>(modes * 2), 0.0);
        for (std::int64_t m = 0; m < modes; ++m) {
            st[static_cast<std::size_t>(2 * m)] = 2.0 * data.O[m] * std::log(e) + data.h[m];
            st[static_cast<std::size_t>(2 * m + 1)] = 2.0 * data.O[m] / e;
        }
        auto prop = build_propagator(sys, bg, lattice, e, 1.0, TimeGrid({e, 1.0}));
        std::vector<double> v, d;
        end_state(trajectory_from_states(prop, st), v, d);
        double acc = 0.0;
        for (std::size_t m = 0; m < v.size(); ++m) {
            const double dv = v[m] - rv[m];
            const double dd = d[m] - rd[m];
            acc += dv * dv + dd * dd;
        }
        rep.eps.push_back(e);
        rep.discrepancy.push_back(std::sqrt(acc));
    }
    rep.monotone = rep.discrepancy[0] >= rep.discrepancy[1] && rep.discrepancy[1] >= rep.discrepancy[2];
    bool ok = rep.monotone;
    for (int i = 0; i < 2; ++i) {
        const double hi = rep.discrepancy[static_cast<std::size_t>(i)];
        const double lo = rep.discrepancy[static_cast<std::size_t>(i + 1)];
        const double r = lo > 0.0 ? hi / lo : INFINITY;
        rep.ratios.push_back(r);
        ok = ok && r >= min_ratio;
    }
    rep.pass = ok;
    return rep;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os, int l_limit) {
    os.precision(17);
    os << "tau,field,l,slot,value,dvalue\n";
    const auto& lat = *traj.lattice();
    for (std::size_t g = 0; g < traj.grid().size(); ++g)
        for (int f = 0; f < traj.fields(); ++f)
            for (const auto& d : lat.degrees()) {
                if (l_limit >= 0 && d.l > l_limit) break;
                for (std::int64_t i = 0; i < d.mult; ++i)
                    os << traj.grid()[g] << ',' << f << ',' << d.l << ',' << i << ','
                       << traj.value(g, f, d.offset + i) << ',' << traj.deriv(g, f, d.offset + i) << '\n';
            }
}

}  // namespace dslab
