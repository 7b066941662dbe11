#include "scalekit/scale.hpp"

#include <algorithm>
#include <cmath>

namespace scalekit {

namespace {

void check_inputs(const GammaCoefficients& gamma, double q, Eigen::Index n) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw ArgumentError("q must be finite and nonnegative");
    if (n < 0) throw ArgumentError("n must be nonnegative");
    if (gamma.depth() < n) {
        throw ArgumentError("gamma depth " + std::to_string(gamma.depth()) + " is shorter than n = " +
                            std::to_string(n));
    }
}

ScaleTable empty_table(const GammaCoefficients& gamma, double q, Eigen::Index n) {
    ScaleTable t;
    t.h = gamma.h;
    t.q = q;
    t.n = n;
    t.delta0 = gamma.delta0;
    t.scheme = gamma.scheme;
    return t;
}

}  // namespace

Eigen::VectorXd recursion_coefficients(const GammaCoefficients& gamma, double q, Eigen::Index n) {
    return ((gamma.gamma_down.head(n).array() + q) / gamma.gamma_up).matrix();
}

ScaleTable compute_W(const GammaCoefficients& gamma, double q, Eigen::Index n, const RecursionOptions& opts) {
    check_inputs(gamma, q, n);
    ScaleTable t = empty_table(gamma, q, n);
    const double w0 = 1.0 / (gamma.h * gamma.gamma_up);
    t.W = w_recursion<double>(recursion_coefficients(gamma, q, n), w0, n, opts);
    return t;
}

ScaleTable compute_Z(const GammaCoefficients& gamma, double q, Eigen::Index n, const RecursionOptions& opts) {
    check_inputs(gamma, q, n);
    ScaleTable t = empty_table(gamma, q, n);
    t.Ztilde = ztilde_recursion<double>(recursion_coefficients(gamma, q, n), q / gamma.gamma_up, n, opts);
    return t;
}

ScaleTable compute_scale_table(const GammaCoefficients& gamma, double q, Eigen::Index n,
                               const RecursionOptions& opts) {
    check_inputs(gamma, q, n);
    ScaleTable t = empty_table(gamma, q, n);
    const Eigen::VectorXd coeff = recursion_coefficients(gamma, q, n);
    t.W = w_recursion<double>(coeff, 1.0 / (gamma.h * gamma.gamma_up), n, opts);
    t.Ztilde = ztilde_recursion<double>(coeff, q / gamma.gamma_up, n, opts);
    return t;
}

ScaleTable scale_table_for(const LevyTriplet& triplet, double h, double q, double x_max,
                           const RecursionOptions& opts) {
    const Eigen::Index n = grid_index(x_max, h);
    const ChainModel chain = build_chain(triplet, h, std::max<Eigen::Index>(n, 1));
    return compute_scale_table(gamma_coefficients(chain), q, n, opts);
}

Eigen::VectorXd z_from_w(const ScaleTable& table) {
    if (table.W.size() == 0) throw ArgumentError("z_from_w needs W values");
    Eigen::VectorXd z(table.W.size());
    double acc = 0.0;
    z(0) = 1.0;
    for (Eigen::Index m = 1; m < z.size(); ++m) {
        acc += table.W(m - 1);
        z(m) = 1.0 + table.q * table.h * acc;
    }
    return z;
}

Eigen::Index grid_index(double x, double h) {
    if (!(h > 0.0)) throw ArgumentError("grid step must be positive");
    const double r = x / h;
    const double k = std::round(r);
    if (!std::isfinite(r) || std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) {
        throw ArgumentError("x = " + std::to_string(x) + " is not on the grid of step " + std::to_string(h));
    }
    return static_cast<Eigen::Index>(k);
}

double w_grid(const ScaleTable& table, double x) {
    const Eigen::Index k = grid_index(x, table.h);
    if (k < 0) return 0.0;
    if (k > table.n || k >= table.W.size()) throw ArgumentError("x beyond the computed grid");
    return table.W(k);
}

double evaluate_W_at(const ScaleTable& table, double x) {
    const Eigen::Index k = grid_index(x, table.h) - table.delta0;
    if (k < 0) throw ArgumentError("x below the first shifted grid point");
    if (k > table.n || k >= table.W.size()) throw ArgumentError("x beyond the computed grid");
    return table.W(k);
}

double evaluate_Z_at(const ScaleTable& table, double x) {
    const Eigen::Index k = grid_index(x, table.h);
    if (k < 0) throw ArgumentError("x must be nonnegative");
    if (k > table.n) throw ArgumentError("x beyond the computed grid");
    if (table.Ztilde.size() > k) return 1.0 + table.Ztilde(k);
    if (table.W.size() > k) return z_from_w(table)(k);
    throw ArgumentError("table holds neither Z nor W values");
}

Eigen::VectorXd ide_recursion_W(const ChainModel& chain, double q, Eigen::Index n) {
    if (n < 0) throw ArgumentError("n must be nonnegative");
    if (chain.depth() < n) throw ArgumentError("chain depth shorter than n");
    const double h = chain.h;
    const double gap = chain.drift_gap();
    const double diff = (chain.sigma2 + chain.c0h) / (2 * h);
    double lead, prev;
    if (chain.scheme == Scheme::Two) {
        lead = chain.c0h / (2 * h) + gap;
        prev = chain.c0h / (2 * h);
    } else {
        lead = diff + gap / 2;
        prev = diff - gap / 2;
    }
    if (!(lead > 0.0)) throw InadmissibleStepError("leading IDE coefficient vanishes at h = " + std::to_string(h));

    Eigen::VectorXd w(n + 1);
    w(0) = chain.scheme == Scheme::Two ? 1.0 / lead : 2 * h / (chain.sigma2 + chain.c0h + gap * h);
    for (Eigen::Index m = 1; m <= n; ++m) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) s += w(j) * (chain.tails(m - j - 1) + q);
        w(m) = (1.0 + prev * w(m - 1) + h * s) / lead;
    }
    return w;
}

PhiValue phi_root(const std::function<double(double)>& psi, double q) {
    if (!(q >= 0.0)) throw ArgumentError("phi_root needs q >= 0");
    auto f = [&](double b) { return psi(b) - q; };

    double hi = 1.0;
    int doublings = 0;
    while (!(f(hi) > 0.0 && psi(hi) > psi(hi / 2))) {
        if (++doublings > 200) throw DivergenceError("phi_root failed to bracket after 200 doublings");
        hi *= 2;
    }

    // Minimum of the convex psi on [0, hi].
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = 0.0, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = psi(c), fd = psi(d);
    for (int i = 0; i < 200 && b - a > 1e-13 * std::max(1.0, b); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = psi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = psi(d);
        }
    }
    double lo = (a + b) / 2;
    if (!(f(lo) < 0.0)) {
        if (f(0.0) <= 0.0) lo = 0.0;
        if (f(lo) >= 0.0) return {q, lo, f(lo)};
    }

    // Right branch: f(lo) < 0 < f(hi).
    for (int i = 0; i < 400; ++i) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double root = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
    return {q, root, f(root)};
}

LaplaceCheck laplace_identity_check(const ScaleTable& table, const ChainModel& chain, double beta) {
    if (table.W.size() == 0) throw ArgumentError("laplace_identity_check needs W values");
    const double h = table.h;
    const double q = table.q;
    const double phi_h = phi_root([&](double b) { return psi_h(chain, b); }, q).phi;
    if (!(beta > phi_h + 0.1)) {
        throw ArgumentError("beta = " + std::to_string(beta) + " leaves insufficient margin over Phi^h(q) = " +
                            std::to_string(phi_h));
    }
    const double growth = phi_h + 0.05;
    const Eigen::Index n = table.W.size() - 1;

    const double cell = -std::expm1(-beta * h) / beta;
    double partial = 0.0;
    for (Eigen::Index m = n; m >= 0; --m) {
        partial += table.W(m) * std::exp(-beta * static_cast<double>(m) * h);
    }
    partial *= cell;
    // Beyond nh, W_h(y) <= W_h(nh) e^{growth (y - nh)}.
    const double nh = static_cast<double>(n) * h;
    const double tail = table.W(n) * std::exp(-growth * nh - (beta - growth) * (nh + h)) / (beta - growth);

    LaplaceCheck out;
    out.phi_h = phi_h;
    out.lhs = partial + tail;
    out.rhs = std::expm1(beta * h) / (beta * h * (psi_h(chain, beta) - q));
    out.residual = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
    out.tail_bound = tail / std::abs(out.rhs);
    return out;
}

}  // namespace scalekit
