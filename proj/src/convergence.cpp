#include "scalekit/convergence.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace scalekit {

Oracle closed_form_oracle(std::string label, std::function<double(double)> W, std::function<double(double)> Z) {
    return {std::move(label), 0.0, std::move(W), std::move(Z)};
}

Oracle benchmark_oracle(const Benchmark& bench, std::string label) {
    auto lookup = [xs = bench.xs](const std::vector<double>& vals) {
        return [xs, vals](double x) {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (std::abs(xs[i] - x) <= 1e-12 * std::max(1.0, std::abs(x))) return vals[i];
            }
            throw ArgumentError("benchmark has no value at x = " + std::to_string(x));
        };
    };
    return {std::move(label), bench.h, lookup(bench.W), lookup(bench.Z)};
}

std::vector<double> dyadic(int from, int to) {
    std::vector<double> hs;
    for (int k = from; k <= to; ++k) hs.push_back(std::ldexp(1.0, -k));
    return hs;
}

FitResult fit_rate(const std::vector<double>& hs, const std::vector<double>& errs, const FitOptions& opts) {
    if (hs.size() != errs.size()) throw ArgumentError("fit_rate: hs and errs differ in length");
    if (hs.size() < 3) throw ArgumentError("fit_rate needs at least 3 points");
    FitResult out;
    out.points = static_cast<int>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(hs[i] > 0.0)) throw ArgumentError("fit_rate needs positive h");
        if (!(errs[i] > opts.exact_tol)) {
            out.exact = true;
            return out;
        }
    }

    std::vector<std::size_t> order(hs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return hs[a] > hs[b]; });

    std::size_t first = 0;
    for (;;) {
        const auto m = static_cast<Eigen::Index>(order.size() - first);
        Eigen::MatrixXd A(m, 2);
        Eigen::VectorXd b(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto j = order[first + static_cast<std::size_t>(i)];
            A(i, 0) = std::log(hs[j]);
            A(i, 1) = 1.0;
            b(i) = std::log(errs[j]);
        }
        const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
        const double ss_res = (A * c - b).squaredNorm();
        const double ss_tot = (b.array() - b.mean()).matrix().squaredNorm();
        out.slope = c(0);
        out.intercept = c(1);
        out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
        out.points = static_cast<int>(m);
        out.dropped = static_cast<int>(first);
        if (out.r2 >= opts.min_r2 || out.dropped >= opts.max_drops || m <= 3) break;
        ++first;
    }
    return out;
}

void validate_sweep(const std::vector<double>& K, const std::vector<double>& hs, const Oracle& oracle) {
    if (K.empty()) throw ArgumentError("sweep needs evaluation points K");
    if (hs.size() < 2) throw ArgumentError("sweep needs at least two step sizes");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(hs[i] > 0.0)) throw ArgumentError("sweep steps must be positive");
        if (i == 0) continue;
        const double r = hs[i - 1] / hs[i];
        if (!(r > 1.0) || std::abs(r - std::round(r)) > 1e-9 * r) {
            throw ArgumentError("sweep steps are not nested: h = " + std::to_string(hs[i - 1]) + " then " +
                                std::to_string(hs[i]));
        }
    }
    for (double x : K) {
        if (!(x > 0.0)) throw ArgumentError("sweep points must be positive");
        for (double h : hs) grid_index(x, h);
        if (oracle.h > 0.0) grid_index(x, oracle.h);
    }
    if (!oracle.W) throw ArgumentError("oracle has no W evaluator");
    if (oracle.h > 0.0 && !(oracle.h < hs.back())) {
        throw ArgumentError("oracle grid " + std::to_string(oracle.h) + " is not finer than the finest sweep step " +
                            std::to_string(hs.back()));
    }
}

SweepReport error_sweep(const LevyTriplet& triplet, double q, const std::vector<double>& K,
                        const std::vector<double>& hs, const Oracle& oracle, const SweepOptions& opts,
                        std::string triplet_id) {
    validate_sweep(K, hs, oracle);
    SweepReport rep;
    rep.triplet_id = std::move(triplet_id);
    rep.q = q;
    rep.K = K;
    rep.hs = hs;
    rep.oracle = oracle.label;
    const auto nh = static_cast<Eigen::Index>(hs.size());
    const auto nk = static_cast<Eigen::Index>(K.size());
    rep.deltaW.resize(nh, nk);
    rep.deltaZ.resize(nh, nk);
    const double x_max = *std::max_element(K.begin(), K.end());

    std::vector<double> truthW(K.size()), truthZ(K.size());
    for (std::size_t j = 0; j < K.size(); ++j) {
        truthW[j] = oracle.W(K[j]);
        truthZ[j] = oracle.Z ? oracle.Z(K[j]) : 0.0;
    }

    std::atomic<Eigen::Index> next{0};
    std::vector<std::exception_ptr> failures(hs.size());
    auto worker = [&] {
        for (Eigen::Index i = next++; i < nh; i = next++) {
            try {
                const double h = hs[static_cast<std::size_t>(i)];
                const ScaleTable t = scale_table_for(triplet, h, q, x_max, opts.recursion);
                for (Eigen::Index j = 0; j < nk; ++j) {
                    const double x = K[static_cast<std::size_t>(j)];
                    rep.deltaW(i, j) = truthW[static_cast<std::size_t>(j)] - evaluate_W_at(t, x);
                    rep.deltaZ(i, j) = truthZ[static_cast<std::size_t>(j)] - evaluate_Z_at(t, x);
                }
            } catch (...) {
                failures[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(opts.threads, 1, static_cast<int>(hs.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    for (Eigen::Index i = 0; i < nh; ++i) {
        rep.errW.push_back(rep.deltaW.row(i).cwiseAbs().maxCoeff());
        rep.errZ.push_back(rep.deltaZ.row(i).cwiseAbs().maxCoeff());
    }
    if (hs.size() >= 3) {
        rep.fitW = fit_rate(hs, rep.errW, opts.fit);
        if (oracle.Z) rep.fitZ = fit_rate(hs, rep.errZ, opts.fit);
    }
    if (!oracle.Z) rep.deltaZ.setZero();
    return rep;
}

Eigen::MatrixXd asymptotic_ratios(const SweepReport& report, bool w, int power,
                                  const std::function<double(double)>& limit) {
    const Eigen::MatrixXd& d = w ? report.deltaW : report.deltaZ;
    Eigen::MatrixXd out(d.rows(), d.cols());
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        const double scale = std::pow(report.hs[static_cast<std::size_t>(i)], power);
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            out(i, j) = d(i, j) / scale / limit(report.K[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

RateExpectation rate_expectation(const LevyTriplet& triplet, const std::vector<double>& deltas) {
    const LevyMeasure& m = triplet.measure();
    RateExpectation r;
    if (m.is_zero()) {
        r.path_class = PathClass::BmOnly;
        r.w = 2.0;
        r.z = 1.0;
        return r;
    }
    if (m.finite_variation()) {
        r.path_class = m.finite_mass() ? PathClass::FiniteActivity : PathClass::InfiniteActivityFiniteVariation;
        r.w = r.z = 1.0;
        return r;
    }
    const auto diag = small_jump_diagnostics(m, deltas.empty() ? dyadic(6, 20) : deltas);
    r.path_class = diag.path_class;
    const auto& a = diag.assumption;
    if (!a.epsilon || !a.bounded_limsup || !a.positive_liminf) {
        throw ConsistencyError("small-jump exponent unavailable: the power-law assumption fails for this measure");
    }
    r.epsilon = a.epsilon;
    r.w = r.z = 2.0 - *a.epsilon;
    return r;
}

}  // namespace scalekit
