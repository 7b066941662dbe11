#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/reference.hpp"

namespace scalekit {

// Truth for a sweep: a closed form (h == 0) or a fine-grid table.
struct Oracle {
    std::string label;
    double h = 0.0;
    std::function<double(double)> W;
    std::function<double(double)> Z;  // optional
};

Oracle closed_form_oracle(std::string label, std::function<double(double)> W,
                          std::function<double(double)> Z = {});
Oracle benchmark_oracle(const Benchmark& bench, std::string label = "fine_grid");

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool exact = false;  // some error vanished; no slope reported
    int dropped = 0;     // coarse points discarded for pre-asymptotic pollution
    int points = 0;
};

struct FitOptions {
    double min_r2 = 0.98;
    int max_drops = 2;
    double exact_tol = 0.0;  // errors at or below this count as zero
};

FitResult fit_rate(const std::vector<double>& hs, const std::vector<double>& errs, const FitOptions& opts = {});

struct SweepOptions {
    int threads = 1;
    RecursionOptions recursion;
    FitOptions fit{0.98, 2, 1e-13};
};

struct SweepReport {
    std::string triplet_id;
    double q = 0.0;
    std::vector<double> K;
    std::vector<double> hs;
    // Signed oracle(x) - approximant at (h index, x index).
    Eigen::MatrixXd deltaW;
    Eigen::MatrixXd deltaZ;
    std::vector<double> errW;
    std::vector<double> errZ;
    FitResult fitW;
    std::optional<FitResult> fitZ;
    double expected_slope_W = 0.0;
    double expected_slope_Z = 0.0;
    std::string oracle;
};

// Throws ArgumentError unless hs descends, is nested, and holds every x of K on
// its grid, and unless the oracle grid is strictly finer than min(hs).
void validate_sweep(const std::vector<double>& K, const std::vector<double>& hs, const Oracle& oracle);

SweepReport error_sweep(const LevyTriplet& triplet, double q, const std::vector<double>& K,
                        const std::vector<double>& hs, const Oracle& oracle, const SweepOptions& opts = {},
                        std::string triplet_id = "triplet");

// delta(h, x) / h^power divided by limit(x), per sweep entry.
Eigen::MatrixXd asymptotic_ratios(const SweepReport& report, bool w, int power,
                                  const std::function<double(double)>& limit);

struct RateExpectation {
    double w = 0.0;
    double z = 0.0;
    PathClass path_class = PathClass::BmOnly;
    std::optional<double> epsilon;
};

// Expected W and Z rates by path class. Infinite variation jumps need a fitted epsilon that passes
// both assumption checks; otherwise a ConsistencyError is raised.
RateExpectation rate_expectation(const LevyTriplet& triplet, const std::vector<double>& deltas = {});

std::vector<double> dyadic(int from, int to);

}  // namespace scalekit
