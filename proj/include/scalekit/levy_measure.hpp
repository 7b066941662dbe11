#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/errors.hpp"
#include "scalekit/quadrature.hpp"

namespace scalekit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
    double location;  // strictly negative
    double mass;      // strictly positive
};

enum class DensityKind { PowerLaw, Exponential, LogNormal, Generic };

// One absolutely continuous component of a Levy measure on (-inf, 0),
// supported on [lo, hi).
//
//   PowerLaw     coef * (anchor - y)^exponent, anchor >= hi (anchor = 0 gives
//                the stable-like coef * |y|^(-1-beta) with beta = -1 - exponent)
//   Exponential  a * rho * exp(rho * y)
//   LogNormal    weight * exp(-(log(-y))^2 / 2) / (sqrt(2 pi) * (-y))
//   Generic      user supplied pointwise evaluator
class DensityPiece {
public:
    static DensityPiece power_law(double coef, double beta, double lo = -kInf, double hi = 0.0);
    static DensityPiece shifted_power(double coef, double exponent, double anchor, double lo,
                                      double hi);
    static DensityPiece exponential(double a, double rho, double lo = -kInf, double hi = 0.0);
    static DensityPiece log_normal(double weight = 1.0, double lo = -kInf, double hi = 0.0);
    static DensityPiece generic(std::function<double(double)> density, double lo, double hi,
                                std::string label = "generic");

    DensityKind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::string& label() const { return label_; }

    // PowerLaw: coef, exponent, anchor.  Exponential: a, rho.  LogNormal: weight.
    double coef() const { return p0_; }
    double exponent() const { return p1_; }
    double anchor() const { return p2_; }
    double beta() const { return -1.0 - p1_; }
    double rate_scale() const { return p0_; }
    double rho() const { return p1_; }
    double weight() const { return p0_; }

    double operator()(double y) const;

    // Closed form of the integral of |y|^order (order 0, 1, 2) against the
    // density over [a, b) intersected with the support. Returns +inf when the
    // integral diverges and nullopt when no closed form exists (Generic).
    std::optional<double> closed_moment(int order, double a, double b) const;

    // True when the density has a non-integrable or integrable algebraic
    // singularity at the upper end of its support.
    bool singular_at(double y) const;

private:
    DensityPiece() = default;

    DensityKind kind_ = DensityKind::Generic;
    double lo_ = -kInf;
    double hi_ = 0.0;
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
    std::function<double(double)> fn_;
    std::string label_;
};

namespace detail {

template <typename T>
struct Accumulated {
    T value{};
    bool converged = true;
};

// Integrates g(y) * piece(y) over [a, b) restricted to the support. Splits the
// domain so that singularities at 0 (or at a power-law anchor) and infinite
// lower limits are handled by geometric shells, each integrated adaptively.
template <typename T, typename G>
Accumulated<T> integrate_piece(const DensityPiece& piece, G& g, double a, double b,
                               const quadrature::Options& opts) {
    Accumulated<T> acc;
    a = std::max(a, piece.lo());
    b = std::min(b, piece.hi());
    if (!(b > a)) return acc;

    auto integrand = [&](double y) -> T { return g(y) * piece(y); };
    quadrature::Options shell_opts = opts;
    shell_opts.max_panels = std::max(50, opts.max_panels / 50);

    constexpr int kMaxShells = 400;
    constexpr int kQuietShells = 4;
    constexpr double kNegligible = 1e-14;
    // A shell that exhausts the small budget is redone with the full one; the
    // estimate from an unresolved run is not trustworthy. A full-budget shell
    // that still runs out (fast oscillation far out) is kept unless its error
    // is material against the running total. Divergence shows up instead as
    // shells that never go quiet.
    constexpr double kUnresolvedTol = 1e-8;
    auto shell_ok = [&](const auto& r, const T& sum) {
        return r.converged || r.error <= std::max(opts.abs_tol, kUnresolvedTol * std::abs(sum));
    };
    auto quiet_shell = [&](const auto& r, const T& sum) {
        return std::abs(r.value) + r.error <= std::max(1e-3 * opts.abs_tol, kNegligible * std::abs(sum));
    };

    // Infinite lower end: y = m / t with t in (0, 1], t shells [2^-(k+1), 2^-k].
    if (std::isinf(a)) {
        const double m = std::min(b, -1.0);
        auto tail = [&](double t) -> T {
            const double y = m / t;
            return integrand(y) * (-m / (t * t));
        };
        T sum{};
        int quiet = 0;
        bool done = false;
        for (int k = 0; k < kMaxShells && !done; ++k) {
            const double hi = std::ldexp(1.0, -k);
            const double lo = std::ldexp(1.0, -k - 1);
            auto r = quadrature::integrate(tail, lo, hi, shell_opts);
            if (!r.converged) r = quadrature::integrate(tail, lo, hi, opts);
            sum += r.value;
            if (!shell_ok(r, sum)) acc.converged = false;
            if (quiet_shell(r, sum)) {
                if (++quiet >= kQuietShells) done = true;
            } else {
                quiet = 0;
            }
        }
        if (!done) acc.converged = false;
        acc.value += sum;
        a = m;
        if (!(b > a)) return acc;
    }

    if (piece.singular_at(b)) {
        // Shells accumulating at the singular upper end b.
        const double width = b - a;
        T sum{};
        int quiet = 0;
        bool done = false;
        for (int k = 0; k < kMaxShells && !done; ++k) {
            const double lo = b - width * std::ldexp(1.0, -k);
            const double hi = b - width * std::ldexp(1.0, -k - 1);
            if (!(hi > lo)) {
                done = true;
                break;
            }
            auto r = quadrature::integrate(integrand, lo, hi, shell_opts);
            if (!r.converged) r = quadrature::integrate(integrand, lo, hi, opts);
            sum += r.value;
            if (!shell_ok(r, sum)) acc.converged = false;
            if (quiet_shell(r, sum)) {
                if (++quiet >= kQuietShells) done = true;
            } else {
                quiet = 0;
            }
        }
        if (!done) acc.converged = false;
        acc.value += sum;
        return acc;
    }

    if (b < 0.0 && a / b > 4.0) {
        // Wide relative range near 0: split geometrically at b * 2^k.
        double hi = b;
        while (hi > a) {
            const double lo = std::max(a, 2.0 * hi);
            auto r = quadrature::integrate(integrand, lo, hi, shell_opts);
            acc.value += r.value;
            if (!r.converged) acc.converged = false;
            hi = lo;
        }
        return acc;
    }

    auto r = quadrature::integrate(integrand, a, b, opts);
    acc.value += r.value;
    if (!r.converged) acc.converged = false;
    return acc;
}

}  // namespace detail

// Levy measure concentrated on (-inf, 0): finitely many atoms plus density
// pieces. Overlapping pieces add. Immutable after construction.
class LevyMeasure {
public:
    LevyMeasure() = default;
    LevyMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

    static LevyMeasure dirac(double location, double mass = 1.0);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& pieces() const { return pieces_; }

    bool is_zero() const { return atoms_.empty() && pieces_.empty(); }
    // lambda(R) < inf
    bool finite_mass() const { return finite_mass_; }
    // kappa(0) = int_{[-1,0)} |y| lambda(dy) < inf
    bool finite_variation() const { return finite_variation_; }

    // lambda([a, b)), a < b <= 0.
    double interval_mass(double a, double b) const;
    // lambda((a, b)), both ends open.
    double open_interval_mass(double a, double b) const;
    // lambda((-inf, -t)), t > 0. Atoms at -t are excluded.
    double tail_mass(double t) const;
    // int_{[a,b)} |y| lambda(dy)
    double abs_moment(double a, double b) const;
    // int_{[a,b)} y^2 lambda(dy)
    double second_moment(double a, double b) const;
    // int_{[-delta,0)} y^2 lambda(dy)
    double second_moment_zero(double delta) const { return second_moment(-delta, 0.0); }

    // int_{[a,b)} g(y) lambda(dy) with densities integrated numerically.
    // Throws InfiniteMassError if the density integral does not settle.
    template <typename G>
    auto integrate(G&& g, double a, double b, const quadrature::Options& opts = {}) const
        -> decltype(g(a)) {
        using T = decltype(g(a));
        T total{};
        for (const auto& atom : atoms_) {
            if (atom.location >= a && atom.location < b) total += g(atom.location) * atom.mass;
        }
        for (const auto& piece : pieces_) {
            auto r = detail::integrate_piece<T>(piece, g, a, b, opts);
            if (!r.converged) {
                throw InfiniteMassError("density integral over [" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") did not converge");
            }
            total += r.value;
        }
        return total;
    }

private:
    double moment(int order, double a, double b) const;

    std::vector<Atom> atoms_;
    std::vector<DensityPiece> pieces_;
    bool finite_mass_ = true;
    bool finite_variation_ = true;
};

enum class PathClass { BmOnly, FiniteActivity, InfiniteActivityFiniteVariation, InfiniteVariation };

const char* to_string(PathClass c);

struct AssumptionCheck {
    std::optional<double> epsilon;  // fitted exponent of lambda(-1,-delta) ~ delta^-eps
    double fit_residual = 0.0;      // RMS residual of the log-log fit
    bool bounded_limsup = false;    // delta^eps lambda(-1,-delta) stays bounded
    bool positive_liminf = false;   // xi(delta) / delta^(2-eps) stays away from 0
};

struct SmallJumpDiagnostics {
    std::vector<double> deltas;
    std::vector<double> kappa;
    std::vector<double> xi;
    std::vector<double> zeta;
    std::vector<double> gamma_small;
    PathClass path_class = PathClass::FiniteActivity;
    AssumptionCheck assumption;
};

SmallJumpDiagnostics small_jump_diagnostics(const LevyMeasure& measure,
                                            const std::vector<double>& deltas);

// Free-function spellings of the measure primitives.
inline double interval_mass(const LevyMeasure& m, double a, double b) {
    return m.interval_mass(a, b);
}
inline double tail_mass(const LevyMeasure& m, double t) { return m.tail_mass(t); }
inline double second_moment_zero(const LevyMeasure& m, double delta) {
    return m.second_moment_zero(delta);
}

}  // namespace scalekit
