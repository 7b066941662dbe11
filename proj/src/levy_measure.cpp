#include "scalekit/levy_measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>

namespace scalekit {

const char* to_string(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Argument: return "argument";
        case ErrorCategory::InfiniteMass: return "infinite-mass";
        case ErrorCategory::InadmissibleStep: return "inadmissible-h";
        case ErrorCategory::Range: return "range";
        case ErrorCategory::Divergence: return "divergence";
        case ErrorCategory::Consistency: return "consistency";
        case ErrorCategory::Config: return "config";
    }
    return "unknown";
}

const char* to_string(PathClass c) {
    switch (c) {
        case PathClass::BmOnly: return "bm-only";
        case PathClass::FiniteActivity: return "finite-activity";
        case PathClass::InfiniteActivityFiniteVariation:
            return "infinite-activity-finite-variation";
        case PathClass::InfiniteVariation: return "infinite-variation";
    }
    return "unknown";
}

namespace {

std::string fmt_interval(double a, double b) {
    std::ostringstream os;
    os << '[' << a << ", " << b << ')';
    return os.str();
}

// int_{tl}^{th} t^(e-1) dt, 0 <= tl < th <= inf; +inf when divergent.
double power_integral(double e, double tl, double th) {
    if (e == 0.0) {
        if (tl == 0.0 || std::isinf(th)) return kInf;
        return std::log1p((th - tl) / tl);
    }
    if (e > 0.0) {
        if (std::isinf(th)) return kInf;
        if (tl == 0.0) return std::pow(th, e) / e;
        return std::pow(tl, e) * std::expm1(e * std::log1p((th - tl) / tl)) / e;
    }
    if (tl == 0.0) return kInf;
    if (std::isinf(th)) return std::pow(tl, e) / (-e);
    return -std::pow(tl, e) * std::expm1(e * std::log1p((th - tl) / tl)) / (-e);
}

// Phi(u2) - Phi(u1) for the standard normal cdf, u1 <= u2.
double normal_mass(double u1, double u2) {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    if (u1 >= 0.0) return 0.5 * (std::erfc(u1 * kInvSqrt2) - std::erfc(u2 * kInvSqrt2));
    return 0.5 * (std::erfc(-u2 * kInvSqrt2) - std::erfc(-u1 * kInvSqrt2));
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

DensityPiece DensityPiece::power_law(double coef, double beta, double lo, double hi) {
    return shifted_power(coef, -1.0 - beta, 0.0, lo, hi);
}

DensityPiece DensityPiece::shifted_power(double coef, double exponent, double anchor, double lo,
                                         double hi) {
    DensityPiece p;
    p.kind_ = DensityKind::PowerLaw;
    p.p0_ = coef;
    p.p1_ = exponent;
    p.p2_ = anchor;
    p.lo_ = lo;
    p.hi_ = hi;
    p.label_ = "power_law";
    return p;
}

DensityPiece DensityPiece::exponential(double a, double rho, double lo, double hi) {
    DensityPiece p;
    p.kind_ = DensityKind::Exponential;
    p.p0_ = a;
    p.p1_ = rho;
    p.lo_ = lo;
    p.hi_ = hi;
    p.label_ = "exponential";
    return p;
}

DensityPiece DensityPiece::log_normal(double weight, double lo, double hi) {
    DensityPiece p;
    p.kind_ = DensityKind::LogNormal;
    p.p0_ = weight;
    p.lo_ = lo;
    p.hi_ = hi;
    p.label_ = "log_normal";
    return p;
}

DensityPiece DensityPiece::generic(std::function<double(double)> density, double lo, double hi,
                                   std::string label) {
    DensityPiece p;
    p.kind_ = DensityKind::Generic;
    p.fn_ = std::move(density);
    p.lo_ = lo;
    p.hi_ = hi;
    p.label_ = std::move(label);
    return p;
}

double DensityPiece::operator()(double y) const {
    if (!(y >= lo_ && y < hi_)) return 0.0;
    switch (kind_) {
        case DensityKind::PowerLaw: return p0_ * std::pow(p2_ - y, p1_);
        case DensityKind::Exponential: return p0_ * p1_ * std::exp(p1_ * y);
        case DensityKind::LogNormal: {
            const double t = -y;
            const double l = std::log(t);
            return p0_ * std::exp(-0.5 * l * l) / (2.506628274631000502415765 * t);
        }
        case DensityKind::Generic: return fn_(y);
    }
    return 0.0;
}

bool DensityPiece::singular_at(double y) const {
    if (y != hi_) return false;
    if (y == 0.0) return true;
    return kind_ == DensityKind::PowerLaw && p2_ == y && p1_ < 0.0;
}

std::optional<double> DensityPiece::closed_moment(int order, double a, double b) const {
    a = std::max(a, lo_);
    b = std::min(b, hi_);
    if (!(b > a)) return 0.0;
    switch (kind_) {
        case DensityKind::PowerLaw: {
            // t = anchor - y, |y| = t - anchor = t + |anchor|.
            const double tl = p2_ - b;
            const double th = std::isinf(a) ? kInf : p2_ - a;
            const double shift = -p2_;
            double total = 0.0;
            for (int j = 0; j <= order; ++j) {
                const double c = binomial(order, j) * std::pow(shift, order - j);
                if (c == 0.0) continue;
                total += c * power_integral(p1_ + j + 1.0, tl, th);
            }
            return p0_ * total;
        }
        case DensityKind::Exponential: {
            const double rho = p1_;
            auto anti = [&](double y) -> double {
                if (std::isinf(y)) return 0.0;
                const double e = std::exp(rho * y);
                switch (order) {
                    case 0: return e;
                    case 1: return (1.0 / rho - y) * e;
                    default: return (y * y - 2.0 * y / rho + 2.0 / (rho * rho)) * e;
                }
            };
            if (order == 0) {
                return p0_ * std::exp(rho * b) * -std::expm1(rho * (a - b));
            }
            return p0_ * (anti(b) - anti(a));
        }
        case DensityKind::LogNormal: {
            const double c = -b;
            const double d = -a;
            const double k = order;
            const double u1 = c == 0.0 ? -kInf : std::log(c) - k;
            const double u2 = std::isinf(d) ? kInf : std::log(d) - k;
            return p0_ * std::exp(0.5 * k * k) * normal_mass(u1, u2);
        }
        case DensityKind::Generic: return std::nullopt;
    }
    return std::nullopt;
}

LevyMeasure::LevyMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
    for (const auto& atom : atoms_) {
        if (!(atom.location < 0.0) || !std::isfinite(atom.location)) {
            throw ArgumentError("atom location must be finite and strictly negative");
        }
        if (!(atom.mass > 0.0) || !std::isfinite(atom.mass)) {
            throw ArgumentError("atom mass must be finite and strictly positive");
        }
    }
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const Atom& x, const Atom& y) { return x.location > y.location; });

    for (const auto& piece : pieces_) {
        if (!(piece.lo() < piece.hi()) || !(piece.hi() <= 0.0) || std::isnan(piece.lo())) {
            throw ArgumentError("density support must be a nonempty interval in (-inf, 0]");
        }
        switch (piece.kind()) {
            case DensityKind::PowerLaw: {
                const double p = piece.exponent();
                if (!(piece.coef() > 0.0)) throw ArgumentError("power-law coefficient must be > 0");
                if (piece.anchor() < piece.hi()) {
                    throw ArgumentError("power-law anchor must lie at or above the support");
                }
                if (piece.anchor() == piece.hi()) {
                    if (piece.anchor() == 0.0) {
                        if (!(p > -3.0)) {
                            throw ArgumentError("power law near 0 violates int y^2 lambda(dy) < inf");
                        }
                        if (p <= -1.0) finite_mass_ = false;
                        if (p <= -2.0) finite_variation_ = false;
                    } else if (!(p > -1.0)) {
                        throw ArgumentError("power-law singularity away from 0 is not integrable");
                    }
                }
                if (std::isinf(piece.lo()) && !(p < -1.0)) {
                    throw ArgumentError("power-law far tail is not integrable");
                }
                break;
            }
            case DensityKind::Exponential:
                if (!(piece.rate_scale() > 0.0) || !(piece.rho() > 0.0)) {
                    throw ArgumentError("exponential density needs a > 0 and rho > 0");
                }
                break;
            case DensityKind::LogNormal:
                if (!(piece.weight() > 0.0)) throw ArgumentError("log-normal weight must be > 0");
                break;
            case DensityKind::Generic: {
                auto one = [](double) { return 1.0; };
                auto abs_y = [](double y) { return -y; };
                auto sq = [](double y) { return y * y; };
                const quadrature::Options opts;
                if (std::isinf(piece.lo())) {
                    auto r = detail::integrate_piece<double>(piece, one, -kInf,
                                                             std::min(piece.hi(), -1.0), opts);
                    if (!r.converged || !std::isfinite(r.value)) {
                        throw ArgumentError("generic density has an infinite far tail");
                    }
                }
                if (piece.hi() == 0.0) {
                    const double a0 = std::max(piece.lo(), -1.0);
                    auto r2 = detail::integrate_piece<double>(piece, sq, a0, 0.0, opts);
                    if (!r2.converged) {
                        throw ArgumentError("generic density violates int y^2 lambda(dy) < inf");
                    }
                    auto r0 = detail::integrate_piece<double>(piece, one, a0, 0.0, opts);
                    if (!r0.converged) finite_mass_ = false;
                    auto r1 = detail::integrate_piece<double>(piece, abs_y, a0, 0.0, opts);
                    if (!r1.converged) finite_variation_ = false;
                }
                break;
            }
        }
    }
}

LevyMeasure LevyMeasure::dirac(double location, double mass) {
    return LevyMeasure({{location, mass}}, {});
}

double LevyMeasure::moment(int order, double a, double b) const {
    if (!(a < b) || !(b <= 0.0)) {
        throw ArgumentError("interval " + fmt_interval(a, b) + " must satisfy a < b <= 0");
    }
    double total = 0.0;
    for (const auto& atom : atoms_) {
        if (atom.location >= a && atom.location < b) {
            total += atom.mass * std::pow(-atom.location, order);
        }
    }
    for (const auto& piece : pieces_) {
        double v;
        if (auto closed = piece.closed_moment(order, a, b)) {
            v = *closed;
        } else {
            auto g = [order](double y) { return std::pow(-y, order); };
            auto r = detail::integrate_piece<double>(piece, g, a, b, quadrature::Options{});
            v = r.converged ? r.value : kInf;
        }
        if (std::isinf(v)) {
            throw InfiniteMassError("moment of order " + std::to_string(order) + " over " +
                                    fmt_interval(a, b) + " is infinite");
        }
        total += v;
    }
    return total;
}

double LevyMeasure::interval_mass(double a, double b) const { return moment(0, a, b); }

double LevyMeasure::open_interval_mass(double a, double b) const {
    double m = interval_mass(a, b);
    for (const auto& atom : atoms_) {
        if (atom.location == a) m -= atom.mass;
    }
    return std::max(m, 0.0);
}

double LevyMeasure::tail_mass(double t) const {
    if (!(t > 0.0)) throw ArgumentError("tail_mass requires t > 0");
    return interval_mass(-kInf, -t);
}

double LevyMeasure::abs_moment(double a, double b) const { return moment(1, a, b); }

double LevyMeasure::second_moment(double a, double b) const { return moment(2, a, b); }

SmallJumpDiagnostics small_jump_diagnostics(const LevyMeasure& measure,
                                            const std::vector<double>& deltas) {
    if (deltas.empty()) throw ArgumentError("small_jump_diagnostics needs at least one delta");
    SmallJumpDiagnostics d;
    d.deltas = deltas;
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta <= 1.0)) {
            throw ArgumentError("small-jump deltas must lie in (0, 1]");
        }
        const double kappa = delta < 1.0 ? measure.abs_moment(-1.0, -delta) : 0.0;
        const double mass = delta < 1.0 ? measure.interval_mass(-1.0, -delta) : 0.0;
        d.kappa.push_back(kappa);
        d.xi.push_back(measure.second_moment_zero(delta));
        d.zeta.push_back(delta * kappa);
        d.gamma_small.push_back(delta * delta * mass);
    }

    if (measure.is_zero()) {
        d.path_class = PathClass::BmOnly;
    } else if (measure.finite_mass()) {
        d.path_class = PathClass::FiniteActivity;
    } else if (measure.finite_variation()) {
        d.path_class = PathClass::InfiniteActivityFiniteVariation;
    } else {
        d.path_class = PathClass::InfiniteVariation;
    }
    if (d.path_class != PathClass::InfiniteVariation) return d;

    // Least squares of log lambda(-1,-delta) against log delta.
    std::vector<std::pair<double, double>> pts;  // (delta, mass)
    for (double delta : deltas) {
        if (delta >= 1.0) continue;
        const double m = measure.open_interval_mass(-1.0, -delta);
        if (m > 0.0) pts.emplace_back(delta, m);
    }
    if (pts.size() < 2) return d;
    std::sort(pts.begin(), pts.end());

    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::log(pts[i].first);
        rhs(i) = std::log(pts[i].second);
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    const double eps = -coef(1);
    d.assumption.epsilon = eps;
    d.assumption.fit_residual = std::sqrt((design * coef - rhs).squaredNorm() / n);

    // Compare the smallest-delta behaviour to the median of the sweep.
    std::vector<double> r, s;
    for (const auto& [delta, m] : pts) {
        r.push_back(std::pow(delta, eps) * m);
        s.push_back(measure.second_moment_zero(delta) / std::pow(delta, 2.0 - eps));
    }
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    const bool eps_ok = eps > 1.0 && eps < 2.0;
    d.assumption.bounded_limsup = eps_ok && r.front() <= 4.0 * median(r);
    d.assumption.positive_liminf = eps_ok && s.front() > 0.0 && s.front() >= 0.25 * median(s);
    return d;
}

}  // namespace scalekit
