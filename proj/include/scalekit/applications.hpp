#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scalekit/scale.hpp"

namespace scalekit {

// W_h(x) / W_h(x + y) on raw grid values: with q = 0, the chain's chance of
// gaining y before dropping below -x.
double exit_ratio(const ScaleTable& table, double x, double y);

struct DeficitDensityRequest {
    double x = 0.0;  // start
    double a = 0.0;  // upper barrier
    std::vector<double> y_grid;
    std::function<double(double)> claim_density;
};

struct DeficitDensity {
    std::vector<double> y;
    std::vector<double> k;
    std::vector<double> negative_at;  // y values where k_h < 0 (reported unclamped)
};

// Trapezoid form of the deficit-at-ruin density on {tau_0^- < tau_a^+}.
DeficitDensity ruin_deficit_density(const ScaleTable& table, const DeficitDensityRequest& req);

// Measure on (0, inf) given through its interval masses m[a, b), b may be inf.
struct PositiveMeasure {
    std::string label = "zero";
    std::function<double(double, double)> mass;

    static PositiveMeasure zero();
    // intensity * rate * e^{-rate y} dy
    static PositiveMeasure exponential(double intensity = 1.0, double rate = 1.0);
    double operator()(double a, double b) const { return mass ? mass(a, b) : 0.0; }
};

struct CbiK {
    std::vector<double> x;
    std::vector<double> k;
    // The limit law's linear term b W(0) is taken to vanish, which needs delta0 = 1.
    bool delta0_warning = false;
};

CbiK cbi_k(const ScaleTable& table, double b, const PositiveMeasure& m, const std::vector<double>& xs);

struct DerivativeEstimate {
    double value = 0.0;
    bool diffusion_free = false;  // sigma2 = 0: no convergence guarantee
};

// (W_h(x) - W_h(x - 2h)) / (2h)
DerivativeEstimate derivative_estimate(const ScaleTable& table, double x);

// sum_{k=0}^{floor(x/h)-1} F(kh, W_h(kh)) h
double functional_sum(const ScaleTable& table, const std::function<double(double, double)>& F, double x);

}  // namespace scalekit
