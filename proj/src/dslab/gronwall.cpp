#include "dslab/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dslab/errors.hpp"
#include "dslab/rng.hpp"

namespace dslab {

namespace {

using Table = std::vector<std::vector<double>>;

// cum[g] = ∫_{t_0}^{t_g} f with the chosen rule; ∫_{t_a}^{t_b} = cum[b] - cum[a].
std::vector<double> cumulative(const std::vector<double>& t, const std::vector<double>& f, Quadrature q) {
    std::vector<double> cum(t.size(), 0.0);
    for (std::size_t g = 1; g < t.size(); ++g) {
        const double h = t[g] - t[g - 1];
        cum[g] = cum[g - 1] + (q == Quadrature::RightRiemann ? h * f[g] : 0.5 * h * (f[g - 1] + f[g]));
    }
    return cum;
}

// Weight of node gp in the rule for ∫_{t_g}^{t_last}.
double outer_weight(const std::vector<double>& t, std::size_t g, std::size_t gp, Quadrature q) {
    const std::size_t last = t.size() - 1;
    if (q == Quadrature::RightRiemann) return gp > g ? t[gp] - t[gp - 1] : 0.0;
    if (g == last) return 0.0;
    double w = 0.0;
    if (gp > g) w += 0.5 * (t[gp] - t[gp - 1]);
    if (gp < last) w += 0.5 * (t[gp + 1] - t[gp]);
    return w;
}

void check_nonneg(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " entries must be finite and >= 0");
}

// Piecewise-linear positive profile through random knots.
std::vector<double> piecewise_linear(const std::vector<double>& t, Rng& rng, double scale) {
    const int knots = rng.integer(2, 6);
    std::vector<double> kt{t.front(), t.back()}, kv;
    for (int i = 2; i < knots; ++i) kt.push_back(rng.uniform(t.front(), t.back()));
    std::sort(kt.begin(), kt.end());
    for (std::size_t i = 0; i < kt.size(); ++i) kv.push_back(scale * rng.log_uniform(0.1, 10.0));
    std::vector<double> out(t.size());
    std::size_t seg = 0;
    for (std::size_t g = 0; g < t.size(); ++g) {
        while (seg + 2 < kt.size() && t[g] > kt[seg + 1]) ++seg;
        const double span = kt[seg + 1] - kt[seg];
        const double u = span > 0.0 ? std::clamp((t[g] - kt[seg]) / span, 0.0, 1.0) : 0.0;
        out[g] = (1.0 - u) * kv[seg] + u * kv[seg + 1];
    }
    return out;
}

nlohmann::json table_json(const Table& t) { return t; }

}  // namespace

Quadrature parse_quadrature(const std::string& name) {
    if (name == "right_riemann") return Quadrature::RightRiemann;
    if (name == "trapezoid") return Quadrature::Trapezoid;
    throw DomainError("unknown quadrature '" + name + "' (expected right_riemann, trapezoid)");
}

std::string to_string(Quadrature q) { return q == Quadrature::RightRiemann ? "right_riemann" : "trapezoid"; }

void GronwallInstance::validate() const {
    if (taus.size() < 2) throw DomainError("gronwall instance: at least two grid points are required");
    for (std::size_t g = 0; g < taus.size(); ++g) {
        if (!(taus[g] > 0.0) || taus[g] > 1.0) throw DomainError("gronwall instance: grid must lie in (0, 1]");
        if (g > 0 && !(taus[g] > taus[g - 1])) throw DomainError("gronwall instance: grid must be increasing");
    }
    if (x < 0 || k_max < x) throw DomainError("gronwall instance: need 0 <= x <= k_max");
    const auto L = static_cast<std::size_t>(levels());
    if (A.size() != L || c.size() != L || b.size() != L)
        throw DomainError("gronwall instance: A, b, c must have one entry per level");
    check_nonneg(b, "b");
    for (std::size_t i = 0; i < L; ++i) {
        if (A[i].size() != taus.size() || c[i].size() != taus.size())
            throw DomainError("gronwall instance: A and c must be sampled on the grid");
        check_nonneg(A[i], "A");
        check_nonneg(c[i], "c");
    }
}

bool GronwallInstance::suspect_non_integrable() const {
    if (taus.size() < 3) return false;
    for (const auto& row : c) {
        if (!(row[0] > 0.0 && row[1] > 0.0 && row[2] > 0.0)) continue;
        const double slope = std::log(row[2] / row[0]) / std::log(taus[2] / taus[0]);
        if (slope <= -1.0) return true;
    }
    return false;
}

nlohmann::json GronwallInstance::to_json() const {
    return {{"label", label}, {"seed", seed},       {"x", x},         {"k_max", k_max},
            {"taus", taus},   {"A", table_json(A)}, {"b", b},         {"c", table_json(c)},
            {"suspect_non_integrable", suspect_non_integrable()}};
}

GronwallInstance GronwallInstance::from_json(const nlohmann::json& j) {
    GronwallInstance g;
    g.label = j.value("label", std::string());
    g.seed = j.value("seed", std::uint64_t{0});
    g.x = j.at("x").get<int>();
    g.k_max = j.at("k_max").get<int>();
    g.taus = j.at("taus").get<std::vector<double>>();
    g.A = j.at("A").get<Table>();
    g.b = j.at("b").get<std::vector<double>>();
    g.c = j.at("c").get<Table>();
    g.validate();
    return g;
}

nlohmann::json BoundResult::to_json() const {
    return {{"defect", defect}, {"scale", scale}, {"iterations", iterations}, {"bound", bound}, {"oracle", oracle}};
}

std::vector<double> discrete_gronwall_bound(const std::vector<double>& b, const std::vector<double>& c) {
    if (b.size() != c.size()) throw DomainError("discrete gronwall: b and c must have equal length");
    check_nonneg(b, "b");
    check_nonneg(c, "c");
    const std::size_t n = b.size();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = b[k];
        for (std::size_t m = 0; m < k; ++m) {
            double p = b[m] * c[m];
            for (std::size_t j = m + 1; j < k; ++j) p *= 1.0 + c[j];
            s += p;
        }
        out[k] = s;
    }
    return out;
}

std::vector<double> discrete_gronwall_recursion(const std::vector<double>& b, const std::vector<double>& c) {
    if (b.size() != c.size()) throw DomainError("discrete gronwall: b and c must have equal length");
    check_nonneg(b, "b");
    check_nonneg(c, "c");
    std::vector<double> u(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
        double s = b[k];
        for (std::size_t m = 0; m < k; ++m) s += c[m] * u[m];
        u[k] = s;
    }
    return u;
}

std::vector<double> continuous_gronwall_bound(const std::vector<double>& taus, const std::vector<double>& alpha,
                                              const std::vector<double>& beta, Quadrature q) {
    if (alpha.size() != taus.size() || beta.size() != taus.size())
        throw DomainError("continuous gronwall: alpha and beta must be sampled on the grid");
    check_nonneg(alpha, "alpha");
    check_nonneg(beta, "beta");
    const auto B = cumulative(taus, beta, q);
    std::vector<double> out(taus.size());
    for (std::size_t g = 0; g < taus.size(); ++g) {
        double s = 0.0;
        for (std::size_t gp = g; gp < taus.size(); ++gp)
            s += outer_weight(taus, g, gp, q) * alpha[gp] * beta[gp] * std::exp(B[gp] - B[g]);
        out[g] = alpha[g] + s;
    }
    return out;
}

std::vector<std::vector<double>> gronwall_like_bound_values(const GronwallInstance& inst, Quadrature q) {
    inst.validate();
    const int L = inst.levels();
    const std::size_t G = inst.taus.size();
    Table C(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) C[static_cast<std::size_t>(i)] = cumulative(inst.taus, inst.c[static_cast<std::size_t>(i)], q);
    Table out = inst.A;
    std::vector<double> acc(static_cast<std::size_t>(L));
    std::vector<double> S(static_cast<std::size_t>(L) + 1);
    for (std::size_t g = 0; g < G; ++g) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t gp = g; gp < G; ++gp) {
            const double w = outer_weight(inst.taus, g, gp, q);
            if (w == 0.0) continue;
            // S_i = Σ_{l<i} c_l A_l Π_{j=l+1}^{i-1}(1 + b_j ∫_{τ}^{τ'} c_j).
            S[0] = 0.0;
            for (int i = 0; i < L; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                acc[ii] += w * S[ii];
                const double Bi = inst.b[ii] * (C[ii][gp] - C[ii][g]);
                S[ii + 1] = S[ii] * (1.0 + Bi) + inst.c[ii][gp] * inst.A[ii][gp];
            }
        }
        for (int i = 1; i < L; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            out[ii][g] += inst.b[ii] * acc[ii];
        }
    }
    return out;
}

std::vector<std::vector<double>> saturate_recursion(const GronwallInstance& inst, Quadrature q, int* iterations) {
    inst.validate();
    const int L = inst.levels();
    const std::size_t G = inst.taus.size();
    Table u = inst.A;
    const int cap = L + 5;
    for (int it = 1; it <= cap; ++it) {
        Table next = inst.A;
        std::vector<double> R(G, 0.0);
        double change = 0.0, scale = 0.0;
        for (int i = 0; i < L; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            if (i > 0) {
                const auto cum = cumulative(inst.taus, R, q);
                for (std::size_t g = 0; g < G; ++g) next[ii][g] += inst.b[ii] * (cum[G - 1] - cum[g]);
            }
            for (std::size_t g = 0; g < G; ++g) {
                R[g] += inst.c[ii][g] * u[ii][g];
                change = std::max(change, std::abs(next[ii][g] - u[ii][g]));
                scale = std::max(scale, std::abs(next[ii][g]));
            }
        }
        u = std::move(next);
        if (!std::isfinite(change)) throw DomainError("saturate_recursion: iteration diverged");
        if (change <= 1e-12 * scale) {
            if (iterations) *iterations = it;
            return u;
        }
    }
    throw DomainError("saturate_recursion: no fixed point within " + std::to_string(cap) + " iterations");
}

BoundResult gronwall_like_bound(const GronwallInstance& inst, Quadrature q) {
    BoundResult r;
    r.bound = gronwall_like_bound_values(inst, q);
    r.oracle = saturate_recursion(inst, q, &r.iterations);
    r.defect = INFINITY;
    for (std::size_t i = 0; i < r.bound.size(); ++i)
        for (std::size_t g = 0; g < r.bound[i].size(); ++g) {
            r.defect = std::min(r.defect, r.bound[i][g] - r.oracle[i][g]);
            r.scale = std::max(r.scale, std::abs(r.oracle[i][g]));
        }
    return r;
}

std::vector<double> GronwallGrid::taus() const {
    if (points < 2 || !(lo > 0.0) || !(hi > lo) || hi > 1.0)
        throw DomainError("gronwall grid: need 0 < lo < hi <= 1 and at least 2 points");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / (points - 1);
        t[static_cast<std::size_t>(i)] = geometric ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    t.back() = hi;
    return t;
}

GronwallInstance preset_instance(const GronwallGrid& grid, int x, int k_max, std::uint64_t seed, double b_scale,
                                 double X) {
    GronwallInstance inst;
    inst.taus = grid.taus();
    inst.x = x;
    inst.k_max = k_max;
    inst.seed = seed;
    std::ostringstream os;
    os << "preset b_scale=" << b_scale;
    inst.label = os.str();
    Rng rng(seed);
    for (int k = x; k <= k_max; ++k) {
        inst.b.push_back(b_scale * 0.1 * std::exp2(-8.0 * k));
        std::vector<double> c(inst.taus.size());
        for (std::size_t g = 0; g < c.size(); ++g) {
            const double t = inst.taus[g];
            c[g] = t >= X * std::exp2(-k - 1) ? std::exp2(6.0 * k) / (t * t * t) : 0.0;
        }
        inst.c.push_back(std::move(c));
        inst.A.push_back(piecewise_linear(inst.taus, rng, rng.log_uniform(1e-3, 1e3)));
    }
    inst.validate();
    return inst;
}

GronwallInstance random_instance(const GronwallGrid& grid, int x, int k_max, std::uint64_t seed, double b_scale) {
    GronwallInstance inst;
    inst.taus = grid.taus();
    inst.x = x;
    inst.k_max = k_max;
    inst.seed = seed;
    std::ostringstream os;
    os << "random b_scale=" << b_scale;
    inst.label = os.str();
    Rng rng(seed);
    for (int k = x; k <= k_max; ++k) {
        inst.b.push_back(rng.uniform() < 0.1 ? 0.0 : b_scale * rng.log_uniform(1e-4, 1.0));
        inst.A.push_back(piecewise_linear(inst.taus, rng, rng.log_uniform(1e-3, 1e3)));
        inst.c.push_back(piecewise_linear(inst.taus, rng, rng.log_uniform(1e-2, 1e2)));
    }
    inst.validate();
    return inst;
}

Verdict verify_gronwall_lemma(std::uint64_t seed, int count, const GronwallVerifyOptions& opt) {
    if (count < 1) throw DomainError("verify_gronwall_lemma: count must be at least 1");
    Verdict v;
    v.name = "gronwall";
    v.threshold = -opt.tolerance;
    int violations = 0, flagged = 0, max_iter = 0;
    double worst = INFINITY;
    std::uint64_t worst_seed = 0;
    std::string worst_label;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
        GronwallInstance inst;
        if (i % 4 == 0)
            inst = preset_instance(opt.grid, opt.x, opt.k_max, s, opt.b_scale);
        else if (i % 4 == 1)
            inst = preset_instance(opt.grid, opt.x, opt.k_max, s, 10.0 * opt.b_scale);
        else
            inst = random_instance(opt.grid, opt.x, opt.k_max, s, opt.b_scale);
        if (inst.suspect_non_integrable()) ++flagged;
        const auto r = gronwall_like_bound(inst, opt.quadrature);
        max_iter = std::max(max_iter, r.iterations);
        const double rel = r.scale > 0.0 ? r.defect / r.scale : r.defect;
        if (rel < -opt.tolerance) ++violations;
        if (rel < worst) {
            worst = rel;
            worst_seed = s;
            worst_label = inst.label;
        }
    }
    v.statistic = worst;
    v.pass = violations == 0;
    std::ostringstream os;
    os << count << " instances, levels " << opt.x << ".." << opt.k_max << ", grid " << opt.grid.points
       << (opt.grid.geometric ? " geometric" : " uniform") << " [" << opt.grid.lo << ", " << opt.grid.hi << "], "
       << to_string(opt.quadrature);
    v.ensemble = os.str();
    v.detail = {{"violations", violations},    {"flagged_non_integrable", flagged}, {"max_iterations", max_iter},
                {"worst_seed", worst_seed},    {"worst_label", worst_label},       {"b_scale", opt.b_scale},
                {"tolerance", opt.tolerance}, {"seed", seed}};
    return v;
}

Verdict verify_discrete_gronwall(std::uint64_t seed, int count, int length, double tolerance) {
    if (count < 1 || length < 1) throw DomainError("verify_discrete_gronwall: count and length must be positive");
    Verdict v;
    v.name = "discrete-gronwall";
    v.threshold = tolerance;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
        std::vector<double> b(static_cast<std::size_t>(length)), c(static_cast<std::size_t>(length));
        for (int k = 0; k < length; ++k) {
            b[static_cast<std::size_t>(k)] = rng.uniform() < 0.1 ? 0.0 : rng.log_uniform(1e-3, 1e3);
            c[static_cast<std::size_t>(k)] = rng.uniform() < 0.1 ? 0.0 : rng.log_uniform(1e-3, 10.0);
        }
        const auto closed = discrete_gronwall_bound(b, c);
        const auto direct = discrete_gronwall_recursion(b, c);
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double den = std::max(std::abs(direct[k]), 1e-300);
            worst = std::max(worst, std::abs(closed[k] - direct[k]) / den);
        }
    }
    v.statistic = worst;
    v.pass = worst <= tolerance;
    std::ostringstream os;
    os << count << " random sequences of length " << length;
    v.ensemble = os.str();
    v.detail = {{"seed", seed}};
    return v;
}

}  // namespace dslab
