#include "dslab/system.hpp"

#include <cmath>
#include <sstream>

#include "dslab/errors.hpp"
#include "dslab/rng.hpp"

namespace dslab {

Psi parse_psi(const std::string& name) {
    if (name == "one" || name == "1") return Psi::One;
    if (name == "kappa") return Psi::Kappa;
    if (name == "tau2kappa") return Psi::Tau2Kappa;
    throw DomainError("unknown coupling coefficient '" + name + "' (expected one, kappa, tau2kappa)");
}

std::string to_string(Psi psi) {
    switch (psi) {
        case Psi::One: return "one";
        case Psi::Kappa: return "kappa";
        case Psi::Tau2Kappa: return "tau2kappa";
    }
    return "unknown";
}

double psi_value(Psi psi, const ConformalBackground& bg, double tau) {
    switch (psi) {
        case Psi::One: return 1.0;
        case Psi::Kappa: return bg.kappa(tau);
        case Psi::Tau2Kappa: return tau * tau * bg.kappa(tau);
    }
    return 0.0;
}

ForcingShape parse_forcing_shape(const std::string& name) {
    if (name == "zero") return ForcingShape::Zero;
    if (name == "bump") return ForcingShape::Bump;
    if (name == "pulse") return ForcingShape::Pulse;
    throw DomainError("unknown forcing shape '" + name + "' (expected zero, bump, pulse)");
}

std::string to_string(ForcingShape shape) {
    switch (shape) {
        case ForcingShape::Zero: return "zero";
        case ForcingShape::Bump: return "bump";
        case ForcingShape::Pulse: return "pulse";
    }
    return "unknown";
}

double ForcingSpec::profile(double tau) const {
    if (shape == ForcingShape::Zero) return 0.0;
    const double u = (tau - center) / width;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

Field ForcingSpec::spatial_field(const LatticePtr& lattice) const {
    Field f(lattice);
    if (shape == ForcingShape::Zero) return f;
    switch (spatial) {
        case SpatialKind::Random: {
            Rng rng(seed);
            f = random_field(lattice, rng, decay);
            break;
        }
        case SpatialKind::Mode:
            if (l <= lattice->l_max()) f.at(l, slot) = 1.0;
            break;
        case SpatialKind::Constant:
            for (const auto& d : lattice->degrees())
                for (std::int64_t i = 0; i < d.mult; ++i) f[d.offset + i] = std::pow(1.0 + d.lambda0, -0.5 * decay);
            break;
    }
    return f;
}

std::string ForcingSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "field:" << field << " shape:" << to_string(shape);
    if (shape != ForcingShape::Zero) {
        os << " center:" << center << " width:" << width << " amplitude:" << amplitude;
        switch (spatial) {
            case SpatialKind::Random: os << " spatial:random decay:" << decay << " seed:" << seed; break;
            case SpatialKind::Mode: os << " spatial:mode l:" << l << " slot:" << slot; break;
            case SpatialKind::Constant: os << " spatial:constant decay:" << decay; break;
        }
    }
    return os.str();
}

void SystemConfig::validate() const {
    if (I < 0 || I > 8) throw DomainError("system: I must lie in [0, 8]");
    if (sigma != 1 && sigma != 2) throw DomainError("system: sigma must be 1 or 2");
    if (M_order < 0 || M_order > 6) throw DomainError("system: M must lie in [0, 6]");
    for (const auto& c : couplings) {
        if (c.row < 0 || c.row > I || c.col < 0 || c.col > I)
            throw DomainError("system: coupling index (" + std::to_string(c.row) + "," + std::to_string(c.col) +
                              ") outside 0.." + std::to_string(I));
        if (!std::isfinite(c.scale)) throw DomainError("system: coupling scale must be finite");
        if (sigma == 2 && c.row >= 1 && c.col == 0)
            throw DomainError("system: sigma = 2 forbids coupling regular row " + std::to_string(c.row) +
                              " to the singular column 0 (regular equations sum over j >= sigma - 1)");
    }
    for (const auto& f : forcings) {
        if (f.field < 0 || f.field > I) throw DomainError("forcing: field index outside 0.." + std::to_string(I));
        if (f.shape == ForcingShape::Zero) continue;
        if (!(f.width > 0.0)) throw DomainError("forcing: width must be positive");
        if (!(f.center - f.width > 0.0)) throw DomainError("forcing: support must stay away from tau = 0");
        if (!(f.center - f.width < 1.0)) throw DomainError("forcing: support must meet (0, 1]");
        if (!std::isfinite(f.amplitude)) throw DomainError("forcing: amplitude must be finite");
        if (f.spatial == SpatialKind::Mode && (f.l < 0 || f.slot < 0))
            throw DomainError("forcing: mode index must be nonnegative");
    }
    if (!(rtol > 0.0 && rtol <= 1e-3)) throw DomainError("tolerances: rtol must lie in (0, 1e-3]");
    if (!(atol > 0.0)) throw DomainError("tolerances: atol must be positive");
    if (!(tau_seed > 0.0 && tau_seed <= 1e-2)) throw DomainError("system: tau_seed must lie in (0, 1e-2]");
    if (frobenius_order < 2 || frobenius_order > 40) throw DomainError("system: frobenius_order must lie in [2, 40]");
    if (!(log_time_below >= 0.0 && log_time_below <= 0.5))
        throw DomainError("system: log_time_below must lie in [0, 0.5]");
}

nlohmann::json SystemConfig::to_json() const {
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& c : couplings)
        cj.push_back({{"row", c.row}, {"col", c.col}, {"psi", to_string(c.psi)}, {"scale", c.scale}});
    nlohmann::json fj = nlohmann::json::array();
    for (const auto& f : forcings) fj.push_back(f.describe());
    return {{"I", I},           {"sigma", sigma},     {"M", M_order},
            {"couplings", cj},  {"forcings", fj},     {"rtol", rtol},
            {"atol", atol},     {"tau_seed", tau_seed}, {"frobenius_order", frobenius_order},
            {"log_time_below", log_time_below}};
}

namespace {

LinearSystem base(const SystemConfig& cfg, int n) {
    LinearSystem s;
    s.N = n;
    s.rtol = cfg.rtol;
    s.atol = cfg.atol;
    s.log_time_below = cfg.log_time_below;
    s.frobenius_order = cfg.frobenius_order;
    return s;
}

int regular_sign(const SystemConfig& cfg) { return cfg.sigma == 1 ? 1 : -1; }

}  // namespace

LinearSystem model_system(const SystemConfig& cfg) {
    cfg.validate();
    LinearSystem s = base(cfg, cfg.fields());
    s.sign.assign(static_cast<std::size_t>(s.N), regular_sign(cfg));
    s.sign[0] = 1;
    s.couplings = cfg.couplings;
    for (const auto& f : cfg.forcings)
        if (f.shape != ForcingShape::Zero) s.forcings.push_back(f);
    return s;
}

LinearSystem split_system(const SystemConfig& cfg) {
    cfg.validate();
    LinearSystem s = base(cfg, cfg.fields() + 1);
    s.sign.assign(static_cast<std::size_t>(s.N), regular_sign(cfg));
    s.sign[0] = 1;
    s.sign[1] = 1;
    for (const auto& c : cfg.couplings) {
        if (c.row == 0 && c.col == 0) {
            s.couplings.push_back({0, 0, c.psi, c.scale});
            s.couplings.push_back({1, 1, c.psi, c.scale});
        } else if (c.row == 0) {
            s.couplings.push_back({1, c.col + 1, c.psi, c.scale});
        } else if (c.col == 0) {
            s.couplings.push_back({c.row + 1, 0, c.psi, c.scale});
            s.couplings.push_back({c.row + 1, 1, c.psi, c.scale});
        } else {
            s.couplings.push_back({c.row + 1, c.col + 1, c.psi, c.scale});
        }
    }
    for (auto f : cfg.forcings) {
        if (f.shape == ForcingShape::Zero) continue;
        f.field += 1;
        s.forcings.push_back(f);
    }
    return s;
}

LinearSystem singular_system(const SystemConfig& cfg) {
    cfg.validate();
    LinearSystem s = base(cfg, 1);
    s.sign = {1};
    for (const auto& c : cfg.couplings)
        if (c.row == 0 && c.col == 0) s.couplings.push_back(c);
    return s;
}

void coupling_matrix(const LinearSystem& sys, const ConformalBackground& bg, double lambda0, double tau,
                     double* out) {
    const int n = sys.N;
    const double f = bg.f(tau);
    const double lam = lambda0 / (f * f);
    const double root = std::sqrt(lambda0) / f;
    for (int i = 0; i < n * n; ++i) out[i] = 0.0;
    for (int c = 0; c < n; ++c) out[c * n + c] = 4.0 * lam;
    if (root == 0.0) return;
    for (const auto& cp : sys.couplings) out[cp.row * n + cp.col] -= root * cp.scale * psi_value(cp.psi, bg, tau);
}

std::vector<double> coupling_series(const LinearSystem& sys, const ConformalBackground& bg, double lambda0,
                                    int order) {
    const int n = sys.N;
    const auto g = bg.inv_f2_series(order);
    const auto h = bg.inv_f_series(order);
    const auto kap = bg.kappa_series(order);
    std::vector<double> t2k(static_cast<std::size_t>(order) + 1, 0.0);
    for (int r = 1; r <= order; ++r) t2k[static_cast<std::size_t>(r)] = kap[static_cast<std::size_t>(r - 1)];
    const auto hk = series_mul(h, kap, order);
    const auto ht2k = series_mul(h, t2k, order);
    const double root = std::sqrt(lambda0);
    std::vector<double> out(static_cast<std::size_t>((order + 1) * n * n), 0.0);
    for (int r = 0; r <= order; ++r) {
        double* blk = out.data() + static_cast<std::size_t>(r * n * n);
        for (int c = 0; c < n; ++c) blk[c * n + c] = 4.0 * lambda0 * g[static_cast<std::size_t>(r)];
        if (root == 0.0) continue;
        for (const auto& cp : sys.couplings) {
            double v = 0.0;
            switch (cp.psi) {
                case Psi::One: v = h[static_cast<std::size_t>(r)]; break;
                case Psi::Kappa: v = hk[static_cast<std::size_t>(r)]; break;
                case Psi::Tau2Kappa: v = ht2k[static_cast<std::size_t>(r)]; break;
            }
            blk[cp.row * n + cp.col] -= root * cp.scale * v;
        }
    }
    return out;
}

ModeState mode_rhs(const SystemConfig& cfg, const ConformalBackground& bg, double lambda0, double tau,
                   const ModeState& state, const std::vector<double>& forcing) {
    if (!(tau > 0.0)) throw DomainError("mode_rhs: tau must be positive (seed with the Frobenius basis)");
    const LinearSystem sys = model_system(cfg);
    const int n = sys.N;
    if (static_cast<int>(state.value.size()) != n || static_cast<int>(state.deriv.size()) != n)
        throw DomainError("mode_rhs: state size does not match I + 1");
    if (!forcing.empty() && static_cast<int>(forcing.size()) != n)
        throw DomainError("mode_rhs: forcing size does not match I + 1");
    std::vector<double> k(static_cast<std::size_t>(n * n));
    coupling_matrix(sys, bg, lambda0, tau, k.data());
    ModeState out;
    out.value = state.deriv;
    out.deriv.assign(static_cast<std::size_t>(n), 0.0);
    for (int c = 0; c < n; ++c) {
        double acc = -sys.sign[static_cast<std::size_t>(c)] * state.deriv[static_cast<std::size_t>(c)] / tau;
        for (int j = 0; j < n; ++j) acc -= k[static_cast<std::size_t>(c * n + j)] * state.value[static_cast<std::size_t>(j)];
        if (!forcing.empty()) acc += forcing[static_cast<std::size_t>(c)];
        out.deriv[static_cast<std::size_t>(c)] = acc;
    }
    return out;
}

std::vector<Coupling> random_couplings(const SystemConfig& cfg, double scale, std::uint64_t seed) {
    std::vector<Coupling> out;
    if (scale <= 0.0) return out;
    Rng rng(seed);
    for (int i = 0; i <= cfg.I; ++i)
        for (int j = 0; j <= cfg.I; ++j) {
            if (cfg.sigma == 2 && i >= 1 && j == 0) continue;
            Coupling c;
            c.row = i;
            c.col = j;
            c.psi = static_cast<Psi>(rng.integer(0, 2));
            c.scale = rng.uniform(-scale, scale);
            out.push_back(c);
        }
    return out;
}

}  // namespace dslab
