#include "scalekit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scalekit {

namespace {

// (e^{a x} - 1) / a, read as x at a = 0.
double expm1_over(double a, double x) { return a == 0.0 ? x : std::expm1(a * x) / a; }

}  // namespace

BmClosedForm bm_closed_form(double sigma2, double mu, double q) {
    if (!(sigma2 > 0.0)) throw ArgumentError("bm_closed_form needs sigma2 > 0");
    if (!(q >= 0.0)) throw ArgumentError("bm_closed_form needs q >= 0");
    BmClosedForm f;
    f.sigma2 = sigma2;
    f.mu = mu;
    f.q = q;
    f.root = std::sqrt(mu * mu + 2 * sigma2 * q);
    f.alpha_plus = (-mu + f.root) / sigma2;
    f.alpha_minus = (-mu - f.root) / sigma2;
    if (f.root > 0.0) {
        const double s2 = sigma2 * sigma2;
        const double a = mu * mu * mu * f.root;
        const double b = 0.5 * q * q * s2 - mu * mu * mu * mu - mu * mu * sigma2 * q;
        const double den = 3 * s2 * sigma2 * f.root;
        f.theta_plus = (a + b) / den;
        f.theta_minus = (a - b) / den;
    }
    return f;
}

double bm_W(const BmClosedForm& f, double x) {
    if (!(x >= 0.0)) return 0.0;
    if (f.root == 0.0) return 2 * x / f.sigma2;
    return std::exp(f.alpha_minus * x) * std::expm1((f.alpha_plus - f.alpha_minus) * x) / f.root;
}

double bm_Z(const BmClosedForm& f, double x) {
    if (!(x >= 0.0) || f.q == 0.0) return 1.0;
    return 1.0 + f.q / f.root * (expm1_over(f.alpha_plus, x) - expm1_over(f.alpha_minus, x));
}

LevyTriplet bm_triplet(double sigma2, double mu) { return LevyTriplet(sigma2, LevyMeasure{}, mu); }

LevyTriplet cp_fixture() { return LevyTriplet(0.0, LevyMeasure::dirac(-1.0, 1.0), 1.0); }

double cp_W(double q, double x) {
    if (x < 0.0) return 0.0;
    if (x >= 1.0) throw ArgumentError("cp_W closed form holds on [0, 1) only");
    return std::exp((1 + q) * x);
}

double cp_Z(double q, double x) {
    if (x < 0.0) return 1.0;
    if (x >= 1.0) throw ArgumentError("cp_Z closed form holds on [0, 1) only");
    return 1.0 + q / (1 + q) * std::expm1((1 + q) * x);
}

LevyTriplet stable_fixture() {
    return LevyTriplet(0.0, LevyMeasure({}, {DensityPiece::power_law(1.0, 1.5)}), 2.0);
}

double stable_W0(double x) { return x <= 0.0 ? 0.0 : 3 * std::sqrt(x) / (2 * std::numbers::pi); }

const char* to_string(SharpnessCase c) {
    switch (c) {
        case SharpnessCase::BmW: return "bm_w";
        case SharpnessCase::BmZ: return "bm_z";
        case SharpnessCase::CpW: return "cp_w";
        case SharpnessCase::CpZ: return "cp_z";
    }
    return "?";
}

double sharpness_limit(SharpnessCase c, double q, double x, double sigma2, double mu) {
    if (!(q >= 0.0)) throw ArgumentError("sharpness_limit needs q >= 0");
    switch (c) {
        case SharpnessCase::BmW: {
            const auto f = bm_closed_form(sigma2, mu, q);
            if (f.root == 0.0) return 0.0;
            return q * q / (2 * f.root * f.root) * bm_W(f, x) +
                   x / f.root * (std::exp(f.alpha_plus * x) * f.theta_plus - std::exp(f.alpha_minus * x) * f.theta_minus);
        }
        case SharpnessCase::BmZ: {
            const auto f = bm_closed_form(sigma2, mu, q);
            if (q == 0.0) return 0.0;
            return -0.5 * q / f.root * (std::exp(f.alpha_plus * x) - std::exp(f.alpha_minus * x));
        }
        case SharpnessCase::CpW:
            if (!(x > 0.0 && x < 1.0)) throw ArgumentError("CP sharpness limits need x in (0, 1)");
            return std::exp(x * (1 + q)) * 0.5 * (1 + q) * (1 + q) * x;
        case SharpnessCase::CpZ:
            if (!(x > 0.0 && x < 1.0)) throw ArgumentError("CP sharpness limits need x in (0, 1)");
            return 0.5 * q * (1 + q) * x * std::exp(x * (1 + q));
    }
    throw ArgumentError("unknown sharpness case");
}

Benchmark fine_grid_benchmark(const LevyTriplet& triplet, double q, const std::vector<double>& xs,
                              double h_bench, const RecursionOptions& opts) {
    if (xs.empty()) throw ArgumentError("fine_grid_benchmark needs evaluation points");
    double x_max = 0.0;
    for (double x : xs) {
        grid_index(x, h_bench);
        x_max = std::max(x_max, x);
    }
    const ScaleTable table = scale_table_for(triplet, h_bench, q, x_max, opts);
    Benchmark b;
    b.h = h_bench;
    b.q = q;
    b.xs = xs;
    for (double x : xs) {
        b.W.push_back(evaluate_W_at(table, x));
        b.Z.push_back(evaluate_Z_at(table, x));
    }
    return b;
}

}  // namespace scalekit
