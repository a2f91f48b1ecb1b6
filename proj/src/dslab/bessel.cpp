#include "dslab/bessel.hpp"

#include <cmath>

#include "dslab/errors.hpp"

namespace dslab {

namespace {

constexpr double kSwitch = 20.0;
// The power series cancels by up to e^x below the switch, so it is summed in binary128.
using Wide = __float128;
constexpr long double kEuler = 0.577215664901532860606512090082402431L;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

Wide wabs(Wide v) { return v < 0 ? -v : v; }

void hankel_pq(double x, double& p, double& q) {
    p = 0.0;
    q = 0.0;
    double t = 1.0;
    double prev = 1e300;
    const double z = 8.0 * x;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            const double o = 2.0 * k - 1.0;
            t *= -(o * o) / (k * z);
        }
        const double at = std::abs(t);
        if (at > prev) break;
        const int r = k % 4;
        if (r == 0) p += t;
        else if (r == 1) q += t;
        else if (r == 2) p -= t;
        else q -= t;
        if (at < 1e-18) break;
        prev = at;
    }
}

}  // namespace

double bessel_j0(double x) {
    x = std::abs(x);
    if (x <= kSwitch) {
        const Wide y = Wide(0.25) * Wide(x) * Wide(x);
        Wide term = 1, sum = 1;
        for (int k = 1; k < 200; ++k) {
            term *= -y / (Wide(k) * k);
            sum += term;
            if (wabs(term) < Wide(1e-30) * (1 + wabs(sum))) break;
        }
        return static_cast<double>(sum);
    }
    double p, q;
    hankel_pq(x, p, q);
    const double c = std::cos(x), s = std::sin(x);
    const double cchi = (c + s) * M_SQRT1_2, schi = (s - c) * M_SQRT1_2;
    return std::sqrt(2.0 / (M_PI * x)) * (p * cchi - q * schi);
}

double bessel_y0(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_y0: argument must be positive");
    if (x <= kSwitch) {
        const Wide y = Wide(0.25) * Wide(x) * Wide(x);
        Wide term = 1, j0 = 1, tail = 0, harmonic = 0;
        for (int k = 1; k < 200; ++k) {
            term *= -y / (Wide(k) * k);
            harmonic += Wide(1) / k;
            j0 += term;
            tail -= harmonic * term;
            if (wabs(term) * (1 + harmonic) < Wide(1e-30) * (1 + wabs(j0) + wabs(tail))) break;
        }
        const Wide lg = std::log(0.5L * static_cast<long double>(x)) + kEuler;
        return static_cast<double>((Wide(2) / Wide(kPiL)) * (lg * j0 + tail));
    }
    double p, q;
    hankel_pq(x, p, q);
    const double c = std::cos(x), s = std::sin(x);
    const double cchi = (c + s) * M_SQRT1_2, schi = (s - c) * M_SQRT1_2;
    return std::sqrt(2.0 / (M_PI * x)) * (p * schi + q * cchi);
}

double bessel_oracle(char kind, double lambda, double tau) {
    if (!(lambda > 0.0)) throw DomainError("bessel_oracle: lambda must be positive");
    if (kind == 'J' || kind == 'j') {
        if (tau < 0.0) throw DomainError("bessel_oracle: tau must be nonnegative");
        return bessel_j0(2.0 * std::sqrt(lambda) * tau);
    }
    if (kind == 'Y' || kind == 'y') {
        if (!(tau > 0.0)) throw DomainError("bessel_oracle: Y is singular at tau = 0");
        return bessel_y0(2.0 * std::sqrt(lambda) * tau);
    }
    throw DomainError(std::string("bessel_oracle: unknown kind '") + kind + "'");
}

}  // namespace dslab
