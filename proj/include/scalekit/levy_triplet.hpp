#pragma once

#include <complex>

#include "scalekit/levy_measure.hpp"

namespace scalekit {

using Complex = std::complex<double>;

// Characteristic triplet (sigma^2, lambda, mu) of a spectrally negative Levy
// process, with mu taken relative to the cutoff y * 1_{[-V,0)}(y). V = 0 for a
// finite Levy measure and V = 1 otherwise.
class LevyTriplet {
public:
    LevyTriplet(double sigma2, LevyMeasure measure, double mu);

    double sigma2() const { return sigma2_; }
    double mu() const { return mu_; }
    const LevyMeasure& measure() const { return measure_; }
    int cutoff() const { return cutoff_; }

    // Drift of the (finite-variation) form without compensation,
    // mu + V * kappa(0). Only meaningful when kappa(0) < inf.
    double drift_fv() const;

    bool infinite_variation() const { return sigma2_ > 0.0 || !measure_.finite_variation(); }
    // 1 iff the paths have infinite variation.
    int delta0() const { return infinite_variation() ? 1 : 0; }

    // Laplace exponent on Re(beta) >= 0.
    Complex psi(Complex beta) const;
    double psi(double beta) const { return psi(Complex(beta, 0.0)).real(); }

private:
    double sigma2_;
    LevyMeasure measure_;
    double mu_;
    int cutoff_;
};

inline Complex psi(const LevyTriplet& triplet, Complex beta) { return triplet.psi(beta); }

namespace detail {

// e^z - 1 - z and e^z - 1 without cancellation for small |z|.
Complex exp_minus_one_minus_linear(Complex z);
Complex exp_minus_one(Complex z);

}  // namespace detail

}  // namespace scalekit
