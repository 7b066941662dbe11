#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <string>

#include "scalekit/chain.hpp"

namespace scalekit {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct RecursionOptions {
    bool compensated = false;       // Neumaier summation of the inner sums
    double overflow_limit = 1e300;  // RangeError once a value exceeds this
};

// W^(q)_h and Z~^(q)_h = Z^(q)_h - 1 on the grid {0, h, ..., n h}.
struct ScaleTable {
    double h = 0.0;
    double q = 0.0;
    Eigen::Index n = 0;
    Eigen::VectorXd W;
    Eigen::VectorXd Ztilde;
    int delta0 = 0;
    Scheme scheme = Scheme::One;
};

namespace detail {

template <typename Scalar>
struct Summer {
    bool compensated;
    Scalar sum{0};
    Scalar carry{0};

    void add(Scalar v) {
        if (!compensated) {
            sum += v;
            return;
        }
        const Scalar t = sum + v;
        using std::abs;
        if (abs(sum) >= abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    Scalar value() const { return sum + carry; }
};

template <typename Scalar>
void check_range(Scalar v, Eigen::Index m, double limit, const char* what) {
    if (!(v <= Scalar(limit))) {
        throw RangeError(std::string(what) + " exceeds " + std::to_string(limit) + " at grid index " +
                         std::to_string(m) + "; reduce x * Phi(q)");
    }
}

}  // namespace detail

// W(0) = w0, W(m+1) = w0 + sum_{k=1}^{m+1} W(m+1-k) coeff(k-1).
// The inner sum runs from k = m+1 down to 1, so the smallest values enter first.
template <typename Scalar>
Vector<Scalar> w_recursion(const Vector<Scalar>& coeff, Scalar w0, Eigen::Index n,
                           const RecursionOptions& opts = {}) {
    if (coeff.size() < n) throw ArgumentError("w_recursion: coefficient depth shortfall");
    Vector<Scalar> w(n + 1);
    w(0) = w0;
    for (Eigen::Index m = 0; m < n; ++m) {
        detail::Summer<Scalar> s{opts.compensated};
        s.add(w0);
        for (Eigen::Index j = 0; j <= m; ++j) s.add(w(j) * coeff(m - j));
        w(m + 1) = s.value();
        detail::check_range(w(m + 1), m + 1, opts.overflow_limit, "W");
    }
    return w;
}

// Z~(0) = 0, Z~(m+1) = (m+1) lead + sum_{k=1}^{m} Z~(m+1-k) coeff(k-1).
template <typename Scalar>
Vector<Scalar> ztilde_recursion(const Vector<Scalar>& coeff, Scalar lead, Eigen::Index n,
                                const RecursionOptions& opts = {}) {
    if (coeff.size() < n) throw ArgumentError("ztilde_recursion: coefficient depth shortfall");
    Vector<Scalar> z(n + 1);
    z(0) = Scalar(0);
    for (Eigen::Index m = 0; m < n; ++m) {
        detail::Summer<Scalar> s{opts.compensated};
        s.add(Scalar(m + 1) * lead);
        for (Eigen::Index j = 1; j <= m; ++j) s.add(z(j) * coeff(m - j));
        z(m + 1) = s.value();
        detail::check_range(z(m + 1), m + 1, opts.overflow_limit, "Z");
    }
    return z;
}

// (q + gamma_{-kh}) / gamma_h for k = 1..n.
Eigen::VectorXd recursion_coefficients(const GammaCoefficients& gamma, double q, Eigen::Index n);

ScaleTable compute_W(const GammaCoefficients& gamma, double q, Eigen::Index n,
                     const RecursionOptions& opts = {});
ScaleTable compute_Z(const GammaCoefficients& gamma, double q, Eigen::Index n,
                     const RecursionOptions& opts = {});
ScaleTable compute_scale_table(const GammaCoefficients& gamma, double q, Eigen::Index n,
                               const RecursionOptions& opts = {});

// Convenience: chain + coefficients + table covering [0, x_max].
ScaleTable scale_table_for(const LevyTriplet& triplet, double h, double q, double x_max,
                           const RecursionOptions& opts = {});

// Z(m) = 1 + q h sum_{j<m} W(j).
Eigen::VectorXd z_from_w(const ScaleTable& table);

// Grid index of x; throws ArgumentError when x/h is not an integer.
Eigen::Index grid_index(double x, double h);

// W_h(x - delta0 h), the approximant of W^(q)(x).
double evaluate_W_at(const ScaleTable& table, double x);
// Z_h(x) (no shift).
double evaluate_Z_at(const ScaleTable& table, double x);
// Raw grid value W_h(x), zero for x < 0.
double w_grid(const ScaleTable& table, double x);

// Integro-differential rearrangement of the recursion; an independent route to W.
Eigen::VectorXd ide_recursion_W(const ChainModel& chain, double q, Eigen::Index n);

struct PhiValue {
    double q = 0.0;
    double phi = 0.0;
    double residual = 0.0;
};

// Largest root of psi(beta) = q on [0, inf) for a convex psi with psi(0) = 0.
PhiValue phi_root(const std::function<double(double)>& psi, double q);

struct LaplaceCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;    // |lhs - rhs| / |rhs|
    double tail_bound = 0.0;  // relative size of the tail beyond n h
    double phi_h = 0.0;
};

// Transform of the piecewise-constant W_h against (e^{beta h}-1)/(beta h (psi^h(beta)-q)).
LaplaceCheck laplace_identity_check(const ScaleTable& table, const ChainModel& chain, double beta);

}  // namespace scalekit
