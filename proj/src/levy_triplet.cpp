#include "scalekit/levy_triplet.hpp"

namespace scalekit {

namespace detail {

Complex exp_minus_one_minus_linear(Complex z) {
    if (std::abs(z) < 0.5) {
        Complex term = z * z / 2.0;
        Complex sum = term;
        for (int k = 3; k < 30; ++k) {
            term *= z / static_cast<double>(k);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::exp(z) - 1.0 - z;
}

Complex exp_minus_one(Complex z) {
    if (z.imag() == 0.0) return {std::expm1(z.real()), 0.0};
    if (std::abs(z) < 0.5) return exp_minus_one_minus_linear(z) + z;
    return std::exp(z) - 1.0;
}

}  // namespace detail

LevyTriplet::LevyTriplet(double sigma2, LevyMeasure measure, double mu)
    : sigma2_(sigma2), measure_(std::move(measure)), mu_(mu) {
    if (!(sigma2_ >= 0.0) || !std::isfinite(sigma2_)) {
        throw ArgumentError("sigma2 must be finite and nonnegative");
    }
    if (!std::isfinite(mu_)) throw ArgumentError("mu must be finite");
    cutoff_ = measure_.finite_mass() ? 0 : 1;
    if (sigma2_ == 0.0) {
        if (measure_.is_zero()) {
            throw ArgumentError("a pure drift is not a spectrally negative Levy process");
        }
        if (measure_.finite_variation() && !(drift_fv() > 0.0)) {
            throw ArgumentError(
                "sigma2 = 0 with finite-variation jumps requires mu + V*kappa(0) > 0");
        }
    }
}

double LevyTriplet::drift_fv() const {
    if (cutoff_ == 0) return mu_;
    return mu_ + measure_.abs_moment(-1.0, 0.0);
}

Complex LevyTriplet::psi(Complex beta) const {
    if (beta.real() < 0.0) throw ArgumentError("psi requires Re(beta) >= 0");
    Complex value = 0.5 * sigma2_ * beta * beta + mu_ * beta;
    if (measure_.is_zero()) return value;

    const double v = cutoff_;
    // psi is needed to an absolute accuracy; near beta = 0 it is itself tiny.
    quadrature::Options opts;
    opts.abs_tol = 1e-12;
    Complex jumps{};
    try {
        if (cutoff_ == 1) {
            auto near = [beta](double y) { return detail::exp_minus_one_minus_linear(beta * y); };
            auto far = [beta](double y) { return detail::exp_minus_one(beta * y); };
            jumps = measure_.integrate(near, -v, 0.0, opts) + measure_.integrate(far, -kInf, -v, opts);
        } else {
            auto f = [beta](double y) { return detail::exp_minus_one(beta * y); };
            jumps = measure_.integrate(f, -kInf, 0.0, opts);
        }
    } catch (const InfiniteMassError& e) {
        throw ConsistencyError(std::string("psi integral diverged: ") + e.what());
    }
    return value + jumps;
}

}  // namespace scalekit
