#include "dslab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dslab/errors.hpp"
#include "dslab/rng.hpp"

namespace dslab {

namespace {

std::int64_t binom(std::int64_t a, std::int64_t b) {
    if (b < 0 || a < b) return 0;
    b = std::min(b, a - b);
    __int128 r = 1;
    for (std::int64_t i = 0; i < b; ++i) {
        r = r * (a - i) / (i + 1);
        if (r > std::numeric_limits<std::int64_t>::max()) throw DomainError("multiplicity overflow");
    }
    return static_cast<std::int64_t>(r);
}

constexpr std::int64_t kMaxModes = 200'000'000;

}  // namespace

std::int64_t harmonic_multiplicity(int l, int n) {
    if (n < 1 || l < 0) throw DomainError("harmonic_multiplicity: need n >= 1 and l >= 0");
    return binom(l + n, n) - binom(l + n - 2, n);
}

Lattice::Lattice(int n, int l_max) : n_(n), l_max_(l_max) {
    if (n <= 0) throw DomainError("build_lattice: n must be >= 1, got " + std::to_string(n));
    if (l_max < 0) throw DomainError("build_lattice: l_max must be >= 0, got " + std::to_string(l_max));
    degrees_.reserve(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l) {
        Degree d;
        d.l = l;
        d.lambda0 = static_cast<double>(l) * static_cast<double>(l + n - 1);
        d.mult = harmonic_multiplicity(l, n);
        d.offset = modes_;
        modes_ += d.mult;
        if (modes_ > kMaxModes) throw DomainError("build_lattice: too many modes");
        degrees_.push_back(d);
    }
}

int Lattice::degree_of(std::int64_t index) const {
    if (index < 0 || index >= modes_) throw DomainError("mode index out of range");
    auto it = std::upper_bound(degrees_.begin(), degrees_.end(), index,
                               [](std::int64_t v, const Degree& d) { return v < d.offset; });
    return static_cast<int>(std::distance(degrees_.begin(), it)) - 1;
}

std::string Lattice::spec() const {
    return "S^" + std::to_string(n_) + ",l_max=" + std::to_string(l_max_);
}

nlohmann::json Lattice::to_json() const {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& d : degrees_) modes.push_back({{"l", d.l}, {"lambda0", d.lambda0}, {"mult", d.mult}});
    return {{"n", n_}, {"l_max", l_max_}, {"modes", modes}};
}

LatticePtr build_lattice(int n, int l_max) { return std::make_shared<const Lattice>(n, l_max); }

// ---------------------------------------------------------------------------

ConformalBackground::ConformalBackground(BackgroundKind kind, std::vector<double> a)
    : kind_(kind), a_(std::move(a)) {
    if (a_.empty()) throw DomainError("background: empty coefficient list");
    for (double v : a_)
        if (!std::isfinite(v)) throw DomainError("background: non-finite coefficient");
    while (a_.size() > 1 && a_.back() == 0.0) a_.pop_back();
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        if (!(f(t) > 0.0)) throw DomainError("background: f must be positive on [0, 1]");
    }
}

ConformalBackground ConformalBackground::desitter() {
    return ConformalBackground(BackgroundKind::DeSitter, {0.5, 2.0});
}

ConformalBackground ConformalBackground::constant(double value) {
    if (!(value > 0.0)) throw DomainError("background: constant f must be positive");
    return ConformalBackground(BackgroundKind::Constant, {value});
}

ConformalBackground ConformalBackground::polynomial(std::vector<double> coeffs) {
    return ConformalBackground(BackgroundKind::Polynomial, std::move(coeffs));
}

double ConformalBackground::f(double tau) const {
    const double s = tau * tau;
    double v = 0.0;
    for (std::size_t r = a_.size(); r-- > 0;) v = v * s + a_[r];
    return v;
}

double ConformalBackground::f_prime(double tau) const {
    // f'(τ) = τ Σ_r 2r a_r s^{r-1}
    const double s = tau * tau;
    double v = 0.0;
    for (std::size_t r = a_.size(); r-- > 1;) v = v * s + 2.0 * static_cast<double>(r) * a_[r];
    return tau * v;
}

double ConformalBackground::kappa(double tau) const {
    const double s = tau * tau;
    double v = 0.0;
    for (std::size_t r = a_.size(); r-- > 1;) v = v * s + 2.0 * static_cast<double>(r) * a_[r];
    return v / f(tau);
}

double ConformalBackground::sup_kappa() const {
    double m = 0.0;
    for (int i = 0; i <= 1000; ++i) m = std::max(m, std::abs(kappa(i / 1000.0)));
    return m;
}

bool ConformalBackground::is_static() const { return a_.size() == 1; }

std::vector<double> ConformalBackground::inv_f_series(int order) const {
    return series_reciprocal(a_, order);
}

std::vector<double> ConformalBackground::inv_f2_series(int order) const {
    auto h = inv_f_series(order);
    return series_mul(h, h, order);
}

std::vector<double> ConformalBackground::kappa_series(int order) const {
    std::vector<double> num(static_cast<std::size_t>(order) + 1, 0.0);
    for (std::size_t r = 1; r < a_.size() && r - 1 <= static_cast<std::size_t>(order); ++r)
        num[r - 1] = 2.0 * static_cast<double>(r) * a_[r];
    return series_mul(num, inv_f_series(order), order);
}

std::string ConformalBackground::spec() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case BackgroundKind::DeSitter: return "desitter";
        case BackgroundKind::Constant: os << "constant(" << a_[0] << ")"; return os.str();
        case BackgroundKind::Polynomial:
            os << "polynomial(";
            for (std::size_t i = 0; i < a_.size(); ++i) os << (i ? "," : "") << a_[i];
            os << ")";
            return os.str();
    }
    return "unknown";
}

ConformalBackground desitter_background() { return ConformalBackground::desitter(); }

double eigenvalue_at(const ConformalBackground& bg, double lambda0, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("eigenvalue_at: tau must lie in [0, 1]");
    if (lambda0 < 0.0) throw DomainError("eigenvalue_at: lambda0 must be nonnegative");
    const double f = bg.f(tau);
    return lambda0 / (f * f);
}

// ---------------------------------------------------------------------------

Field::Field(LatticePtr lattice) : lattice_(std::move(lattice)) {
    if (!lattice_) throw DomainError("Field: null lattice");
    c_.assign(static_cast<std::size_t>(lattice_->mode_count()), 0.0);
}

Field::Field(LatticePtr lattice, std::vector<double> coeffs)
    : lattice_(std::move(lattice)), c_(std::move(coeffs)) {
    if (!lattice_) throw DomainError("Field: null lattice");
    if (static_cast<std::int64_t>(c_.size()) != lattice_->mode_count())
        throw DomainError("Field: coefficient count does not match the lattice");
}

double& Field::at(int l, std::int64_t slot) {
    const auto& d = lattice_->degree(l);
    if (slot < 0 || slot >= d.mult) throw DomainError("Field: slot out of range");
    return c_[static_cast<std::size_t>(d.offset + slot)];
}

double Field::at(int l, std::int64_t slot) const {
    const auto& d = lattice_->degree(l);
    if (slot < 0 || slot >= d.mult) throw DomainError("Field: slot out of range");
    return c_[static_cast<std::size_t>(d.offset + slot)];
}

std::vector<double> Field::degree_power() const {
    std::vector<double> p;
    p.reserve(lattice_->degrees().size());
    for (const auto& d : lattice_->degrees()) {
        double s = 0.0;
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const double v = c_[static_cast<std::size_t>(d.offset + i)];
            s += v * v;
        }
        p.push_back(s);
    }
    return p;
}

double Field::l2_norm() const {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return std::sqrt(s);
}

void check_same_lattice(const Field& a, const Field& b) {
    if (a.lattice() != b.lattice() &&
        (a.lattice()->n() != b.lattice()->n() || a.lattice()->l_max() != b.lattice()->l_max()))
        throw DomainError("fields live on different lattices");
}

Field& Field::operator+=(const Field& o) {
    check_same_lattice(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    check_same_lattice(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

nlohmann::json Field::to_json() const {
    auto j = lattice_->to_json();
    j["coeffs"] = c_;
    return j;
}

Field Field::from_json(const nlohmann::json& j) {
    auto lat = build_lattice(j.at("n").get<int>(), j.at("l_max").get<int>());
    return Field(lat, j.at("coeffs").get<std::vector<double>>());
}

Field random_field(const LatticePtr& lattice, Rng& rng, double decay, bool zero_mode) {
    Field f(lattice);
    for (const auto& d : lattice->degrees()) {
        const double sd = std::pow(1.0 + d.lambda0, -0.5 * decay);
        for (std::int64_t i = 0; i < d.mult; ++i) {
            const double v = rng.normal() * sd;
            f[d.offset + i] = (d.l == 0 && !zero_mode) ? 0.0 : v;
        }
    }
    return f;
}

double sobolev_norm(const Field& field, double s, double tau, const ConformalBackground& bg) {
    if (s < 0.0) throw DomainError("sobolev_norm: s must be nonnegative");
    const auto p = field.degree_power();
    double acc = 0.0;
    for (const auto& d : field.lattice()->degrees()) {
        const double w = s == 0.0 ? 1.0 : std::pow(1.0 + eigenvalue_at(bg, d.lambda0, tau), s);
        acc += w * p[static_cast<std::size_t>(d.l)];
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------

TimeGrid::TimeGrid(std::vector<double> taus) : t_(std::move(taus)) {
    if (t_.empty()) throw DomainError("TimeGrid: empty");
    if (!(t_.front() > 0.0) || t_.back() > 1.0) throw DomainError("TimeGrid: samples must lie in (0, 1]");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1])) throw DomainError("TimeGrid: samples must be strictly increasing");
}

TimeGrid TimeGrid::log_refined(double tau_min, int per_decade, int linear_points, double tau_split) {
    if (!(tau_min > 0.0) || tau_min >= 1.0) throw DomainError("TimeGrid: tau_min must lie in (0, 1)");
    if (per_decade < 1 || linear_points < 2) throw DomainError("TimeGrid: too few points");
    std::vector<double> t;
    if (tau_min < tau_split) {
        const double decades = std::log10(tau_split / tau_min);
        const int n = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
        for (int i = 0; i < n; ++i) t.push_back(tau_min * std::pow(tau_split / tau_min, static_cast<double>(i) / n));
    } else {
        tau_split = tau_min;
    }
    for (int i = 0; i < linear_points; ++i)
        t.push_back(tau_split + (1.0 - tau_split) * static_cast<double>(i) / (linear_points - 1));
    t.back() = 1.0;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::uniform(double lo, double hi, int points) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("TimeGrid: bad uniform grid");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    t.back() = hi;
    return TimeGrid(std::move(t));
}

std::size_t TimeGrid::nearest(double tau) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), tau);
    if (it == t_.end()) return t_.size() - 1;
    const std::size_t i = static_cast<std::size_t>(std::distance(t_.begin(), it));
    if (i > 0 && std::abs(t_[i - 1] - tau) <= std::abs(t_[i] - tau)) return i - 1;
    return i;
}

TimeGrid TimeGrid::restricted(double lo, double hi) const {
    std::vector<double> t{lo};
    const double tol = 1e-14;
    for (double v : t_)
        if (v > lo * (1 + tol) && v < hi * (1 - tol)) t.push_back(v);
    if (hi > lo) t.push_back(hi);
    return TimeGrid(std::move(t));
}

// ---------------------------------------------------------------------------

std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b, int order) {
    std::vector<double> r(static_cast<std::size_t>(order) + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(order); ++i)
        for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(order); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

std::vector<double> series_reciprocal(const std::vector<double>& a, int order) {
    if (a.empty() || a[0] == 0.0) throw DomainError("series_reciprocal: zero constant term");
    std::vector<double> r(static_cast<std::size_t>(order) + 1, 0.0);
    r[0] = 1.0 / a[0];
    for (std::size_t n = 1; n <= static_cast<std::size_t>(order); ++n) {
        double s = 0.0;
        for (std::size_t i = 1; i <= n && i < a.size(); ++i) s += a[i] * r[n - i];
        r[n] = -s / a[0];
    }
    return r;
}

}  // namespace dslab
