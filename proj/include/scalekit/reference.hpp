#pragma once

#include <vector>

#include "scalekit/scale.hpp"

namespace scalekit {

// Brownian motion with drift, (sigma2, 0, mu).
struct BmClosedForm {
    double sigma2 = 1.0;
    double mu = 0.0;
    double q = 0.0;
    double root = 0.0;  // sqrt(mu^2 + 2 sigma2 q)
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
};

BmClosedForm bm_closed_form(double sigma2, double mu, double q);
double bm_W(const BmClosedForm& form, double x);
double bm_Z(const BmClosedForm& form, double x);
LevyTriplet bm_triplet(double sigma2, double mu);

// The (0, delta_{-1}, 1) fixture; W^(q)(x) = e^{(1+q)x} on [0, 1).
LevyTriplet cp_fixture();
double cp_W(double q, double x);
double cp_Z(double q, double x);

// sigma2 = 0, mu = 2, lambda(dy) = |y|^{-5/2} dy on (-inf, 0). Then
// psi(beta) = Gamma(-3/2) beta^{3/2} and W(x) = 3 sqrt(x) / (2 pi) at q = 0.
LevyTriplet stable_fixture();
double stable_W0(double x);

enum class SharpnessCase { BmW, BmZ, CpW, CpZ };

const char* to_string(SharpnessCase c);

// Limit of Delta/h (Delta/h^2 for BmW) along nested dyadic h.
// The BM cases use (sigma2, mu); the CP cases need x in (0, 1).
double sharpness_limit(SharpnessCase c, double q, double x, double sigma2 = 1.0, double mu = 1.0);

struct Benchmark {
    double h = 0.0;
    double q = 0.0;
    std::vector<double> xs;
    std::vector<double> W;  // W_h(x - delta0 h)
    std::vector<double> Z;  // Z_h(x)
};

Benchmark fine_grid_benchmark(const LevyTriplet& triplet, double q, const std::vector<double>& xs,
                              double h_bench, const RecursionOptions& opts = {});

}  // namespace scalekit
