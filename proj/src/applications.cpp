#include "scalekit/applications.hpp"

#include <cmath>
#include <limits>

namespace scalekit {

namespace {

Eigen::Index checked_index(const ScaleTable& t, double x, const char* what) {
    const Eigen::Index k = grid_index(x, t.h);
    if (k < 0 || k > t.n || k >= t.W.size()) {
        throw ArgumentError(std::string(what) + " = " + std::to_string(x) + " is outside the computed grid");
    }
    return k;
}

double eval_f(const std::function<double(double)>& f, double at) {
    const double v = f(at);
    if (!std::isfinite(v)) throw ArgumentError("claim density is not finite at " + std::to_string(at));
    return v;
}

}  // namespace

double exit_ratio(const ScaleTable& table, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw ArgumentError("exit_ratio needs x > 0 and y > 0");
    const Eigen::Index i = checked_index(table, x, "x");
    const Eigen::Index j = checked_index(table, x + y, "x + y");
    return table.W(i) / table.W(j);
}

DeficitDensity ruin_deficit_density(const ScaleTable& table, const DeficitDensityRequest& req) {
    if (!req.claim_density) throw ArgumentError("deficit density needs a claim density");
    if (!(req.x > 0.0 && req.x < req.a)) throw ArgumentError("deficit density needs 0 < x < a");
    const Eigen::Index ix = checked_index(table, req.x, "x");
    const Eigen::Index ia = checked_index(table, req.a, "a");
    const double h = table.h;
    const auto& W = table.W;
    const double wx = W(ix), wa = W(ia), w0 = W(0);
    const auto& f = req.claim_density;

    DeficitDensity out;
    for (double y : req.y_grid) {
        if (!(y > 0.0)) throw ArgumentError("deficit points must be positive");
        double up = 0.0;
        for (Eigen::Index k = 1; k <= ia - 1; ++k) up += eval_f(f, k * h + y) * W(ia - k);
        double down = 0.0;
        for (Eigen::Index k = 1; k <= ix - 1; ++k) down += W(ix - k) * eval_f(f, k * h + y);
        const double v = h * (eval_f(f, y + req.a) * wx * w0 / (2 * wa) + up * wx / wa - down -
                              w0 * eval_f(f, req.x + y) / 2);
        out.y.push_back(y);
        out.k.push_back(v);
        if (v < 0.0) out.negative_at.push_back(y);
    }
    return out;
}

PositiveMeasure PositiveMeasure::zero() { return {"zero", [](double, double) { return 0.0; }}; }

PositiveMeasure PositiveMeasure::exponential(double intensity, double rate) {
    if (!(intensity >= 0.0) || !(rate > 0.0)) throw ArgumentError("exponential measure needs intensity >= 0, rate > 0");
    return {"exponential", [intensity, rate](double a, double b) {
                if (!(a >= 0.0) || !(b >= a)) throw ArgumentError("measure interval must satisfy 0 <= a <= b");
                const double tail_b = std::isinf(b) ? 0.0 : std::exp(-rate * b);
                return intensity * (std::exp(-rate * a) - tail_b);
            }};
}

CbiK cbi_k(const ScaleTable& table, double b, const PositiveMeasure& m, const std::vector<double>& xs) {
    if (!(b >= 0.0)) throw ArgumentError("cbi_k needs b >= 0");
    const double h = table.h;
    const auto& W = table.W;
    CbiK out;
    out.delta0_warning = table.delta0 != 1;
    const double far = m(h / 2, std::numeric_limits<double>::infinity());
    for (double x : xs) {
        const Eigen::Index ix = checked_index(table, x, "x");
        if (ix < 1) throw ArgumentError("cbi_k needs x > 0");
        double s = 0.0;
        for (Eigen::Index k = 1; k <= ix - 1; ++k) {
            s += W(ix - k - 1) * m(k * h - h / 2, k * h + h / 2);
        }
        out.x.push_back(x);
        out.k.push_back(b * (W(ix) - W(ix - 1)) / h + W(ix - 1) * far - s);
    }
    return out;
}

DerivativeEstimate derivative_estimate(const ScaleTable& table, double x) {
    const Eigen::Index ix = checked_index(table, x, "x");
    if (ix < 2) throw ArgumentError("derivative_estimate needs x >= 2h");
    return {(table.W(ix) - table.W(ix - 2)) / (2 * table.h), table.scheme == Scheme::Two};
}

double functional_sum(const ScaleTable& table, const std::function<double(double, double)>& F, double x) {
    const double r = x / table.h;
    auto top = static_cast<Eigen::Index>(std::floor(r + 1e-9 * std::max(1.0, r)));
    if (x < 0.0) throw ArgumentError("functional_sum needs x >= 0");
    if (top > table.n) throw ArgumentError("functional_sum: x beyond the computed grid");
    double s = 0.0;
    for (Eigen::Index k = 0; k < top; ++k) s += F(static_cast<double>(k) * table.h, table.W(k)) * table.h;
    return s;
}

}  // namespace scalekit
