#pragma once

#include <vector>

#include "dslab/lattice.hpp"
#include "dslab/system.hpp"

namespace dslab {

// Series solutions of the per-mode system near τ = 0:
//   φ_c(τ) = Σ_{p ≤ P, q ≤ Q} c_{p,q,c} τ^{2p} (log τ)^q.
// Column 2d carries the value datum c_{0,0,d} = 1. Column 2d+1 carries the
// second datum: c_{0,1,d} = 1 (log branch) when sign_d = +1, c_{1,0,d} = 1
// (τ² branch) when sign_d = -1.
class FrobeniusBasis {
public:
    static constexpr int kLogPowers = 4;

    FrobeniusBasis(const LinearSystem& sys, const ConformalBackground& bg, double lambda0, int order);

    int components() const { return n_; }
    int columns() const { return 2 * n_; }
    int order() const { return order_; }

    double coeff(int p, int q, int comp, int col) const { return c_[index(p, q, comp, col)]; }

    // value[comp * 2N + col], deriv[comp * 2N + col].
    void evaluate(double tau, std::vector<double>& value, std::vector<double>& deriv) const;

    // Size of the top-order terms relative to the column scale, maximised over columns.
    double remainder(double tau) const;

    // Throws SeedingError when the remainder at τ exceeds tol.
    void validate(double tau, double tol) const;

private:
    std::size_t index(int p, int q, int comp, int col) const {
        return ((static_cast<std::size_t>(p) * (kLogPowers + 1) + static_cast<std::size_t>(q)) * n_ +
                static_cast<std::size_t>(comp)) * (2 * n_) + static_cast<std::size_t>(col);
    }

    int n_;
    int order_;
    double lambda0_;
    std::vector<double> c_;
};

// Decoupled single-mode pair: y_J (regular) and y_Y (log branch), coefficients [p][q].
struct SeriesPair {
    std::vector<std::vector<double>> j;
    std::vector<std::vector<double>> y;

    static double eval(const std::vector<std::vector<double>>& s, double tau);
    static double eval_deriv(const std::vector<std::vector<double>>& s, double tau);
};

SeriesPair frobenius_basis(double lambda0, const ConformalBackground& bg, int order);

}  // namespace dslab
