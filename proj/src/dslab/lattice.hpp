#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace dslab {

struct Degree {
    int l = 0;
    double lambda0 = 0.0;
    std::int64_t mult = 0;
    std::int64_t offset = 0;  // index of the first slot of this degree
};

// Spherical harmonic degrees 0..l_max on S^n with the round eigenvalues.
class Lattice {
public:
    Lattice(int n, int l_max);

    int n() const { return n_; }
    int l_max() const { return l_max_; }
    const std::vector<Degree>& degrees() const { return degrees_; }
    const Degree& degree(int l) const { return degrees_.at(static_cast<std::size_t>(l)); }
    std::int64_t mode_count() const { return modes_; }

    // Degree owning a flat mode index.
    int degree_of(std::int64_t index) const;

    std::string spec() const;
    nlohmann::json to_json() const;

private:
    int n_;
    int l_max_;
    std::int64_t modes_ = 0;
    std::vector<Degree> degrees_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

LatticePtr build_lattice(int n, int l_max);
std::int64_t harmonic_multiplicity(int l, int n);

enum class BackgroundKind { DeSitter, Constant, Polynomial };

// Conformal factor f(τ) = Σ_r a_r τ^{2r}, positive on [0, 1].
class ConformalBackground {
public:
    static ConformalBackground desitter();
    static ConformalBackground constant(double value);
    static ConformalBackground polynomial(std::vector<double> coeffs_in_tau2);

    BackgroundKind kind() const { return kind_; }
    const std::vector<double>& coeffs() const { return a_; }

    double f(double tau) const;
    double f_prime(double tau) const;
    // f'(τ)/(τ f(τ)), continuous at τ = 0.
    double kappa(double tau) const;
    double sup_kappa() const;
    bool is_static() const;

    // Taylor coefficients in s = τ² of 1/f, 1/f² and κ through s^order.
    std::vector<double> inv_f_series(int order) const;
    std::vector<double> inv_f2_series(int order) const;
    std::vector<double> kappa_series(int order) const;

    std::string spec() const;

private:
    ConformalBackground(BackgroundKind kind, std::vector<double> a);
    BackgroundKind kind_;
    std::vector<double> a_;
};

ConformalBackground desitter_background();

double eigenvalue_at(const ConformalBackground& bg, double lambda0, double tau);

class Field {
public:
    explicit Field(LatticePtr lattice);
    Field(LatticePtr lattice, std::vector<double> coeffs);

    const LatticePtr& lattice() const { return lattice_; }
    std::vector<double>& coeffs() { return c_; }
    const std::vector<double>& coeffs() const { return c_; }
    double& operator[](std::int64_t i) { return c_[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return c_[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(c_.size()); }

    double& at(int l, std::int64_t slot);
    double at(int l, std::int64_t slot) const;

    // Σ over the slots of degree l of |c|².
    std::vector<double> degree_power() const;
    double l2_norm() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

    nlohmann::json to_json() const;
    static Field from_json(const nlohmann::json& j);

private:
    LatticePtr lattice_;
    std::vector<double> c_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

void check_same_lattice(const Field& a, const Field& b);

// Gaussian coefficients with standard deviation (1+λ⁰)^{-decay/2}.
class Rng;
Field random_field(const LatticePtr& lattice, Rng& rng, double decay, bool zero_mode = true);

double sobolev_norm(const Field& field, double s, double tau, const ConformalBackground& bg);

class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> taus);

    // Geometric samples from tau_min up to tau_split, uniform from tau_split to 1.
    static TimeGrid log_refined(double tau_min, int per_decade, int linear_points,
                                double tau_split = 0.1);
    static TimeGrid uniform(double lo, double hi, int points);

    const std::vector<double>& taus() const { return t_; }
    std::size_t size() const { return t_.size(); }
    double operator[](std::size_t i) const { return t_[i]; }
    double front() const { return t_.front(); }
    double back() const { return t_.back(); }
    std::size_t nearest(double tau) const;

    // Samples in [lo, hi] with both endpoints present.
    TimeGrid restricted(double lo, double hi) const;

private:
    std::vector<double> t_;
};

// Power series helpers in one variable.
std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b, int order);
std::vector<double> series_reciprocal(const std::vector<double>& a, int order);

}  // namespace dslab
