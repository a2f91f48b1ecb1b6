#pragma once

namespace dslab {

// J₀ and Y₀: power series in long double for x ≤ 20, Hankel expansion above.
double bessel_j0(double x);
double bessel_y0(double x);

// J₀(2√λ τ) or Y₀(2√λ τ).
double bessel_oracle(char kind, double lambda, double tau);

}  // namespace dslab
