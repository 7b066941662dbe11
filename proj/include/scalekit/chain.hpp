#pragma once

#include <Eigen/Core>

#include <vector>

#include "scalekit/levy_triplet.hpp"

namespace scalekit {

enum class Scheme { One, Two };

const char* to_string(Scheme s);

struct SchemeChoice {
    Scheme scheme;
    int cutoff;  // V
};

// Scheme One iff sigma2 > 0; V = 0 iff the Levy measure is finite.
SchemeChoice select_scheme(const LevyTriplet& triplet);

// Upwards skip-free chain on the lattice hZ approximating the triplet.
// bins(k - 1) holds c^h_{-kh} = lambda([-kh - h/2, -kh + h/2)), k = 1..depth;
// tails(k - 1) holds lambda((-inf, -(k - 1/2) h)), k = 1..depth + 1.
struct ChainModel {
    double h = 0.0;
    Scheme scheme = Scheme::One;
    int cutoff = 0;
    int delta0 = 0;
    double sigma2 = 0.0;
    double mu = 0.0;
    double c0h = 0.0;
    double mu_h = 0.0;
    Eigen::VectorXd bins;
    Eigen::VectorXd tails;
    double up_rate = 0.0;
    double down_rate_local = 0.0;
    // Atoms sitting exactly on a bin boundary (k + 1/2) h.
    std::vector<double> half_grid_atoms;

    Eigen::Index depth() const { return bins.size(); }
    double drift_gap() const { return mu - mu_h; }
    double tail_beyond() const { return tails(tails.size() - 1); }
};

ChainModel build_chain(const LevyTriplet& triplet, double h, Eigen::Index depth);

// Linear-recursion coefficients. down(k) = gamma_{-kh}, k = 1..depth.
struct GammaCoefficients {
    double h = 0.0;
    Scheme scheme = Scheme::One;
    int delta0 = 0;
    double gamma_up = 0.0;
    Eigen::VectorXd gamma_down;  // gamma_down(k - 1) = gamma_{-kh}
    double sigma_tilde2 = 0.0;
    double mu_tilde = 0.0;

    Eigen::Index depth() const { return gamma_down.size(); }
    double down(Eigen::Index k) const { return gamma_down(k - 1); }
};

GammaCoefficients gamma_coefficients(const ChainModel& chain, Eigen::Index depth);
inline GammaCoefficients gamma_coefficients(const ChainModel& chain) {
    return gamma_coefficients(chain, chain.depth());
}

// Levy measure of the chain on (-inf, -kh], summed from its jump rates.
double chain_down_tail(const ChainModel& chain, Eigen::Index k);

// Laplace exponent of the chain. Bins beyond the stored depth are lumped at
// -(depth + 1) h, exact up to tail_beyond() * exp(-Re(beta) (depth + 1) h).
Complex psi_h(const ChainModel& chain, Complex beta);
inline double psi_h(const ChainModel& chain, double beta) {
    return psi_h(chain, Complex(beta, 0.0)).real();
}

// Largest candidate step for which build_chain succeeds; candidates descending.
double max_admissible_h(const LevyTriplet& triplet, const std::vector<double>& candidates);

// Grid depth needed to run the recursion up to x.
Eigen::Index depth_for(double x, double h);

}  // namespace scalekit
