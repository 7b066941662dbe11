#include "scalekit/chain.hpp"

#include <cmath>
#include <sstream>

namespace scalekit {

const char* to_string(Scheme s) { return s == Scheme::One ? "one" : "two"; }

SchemeChoice select_scheme(const LevyTriplet& triplet) {
    return {triplet.sigma2() > 0.0 ? Scheme::One : Scheme::Two, triplet.cutoff()};
}

Eigen::Index depth_for(double x, double h) {
    if (!(h > 0.0) || !(x >= 0.0)) throw ArgumentError("depth_for needs h > 0 and x >= 0");
    return static_cast<Eigen::Index>(std::ceil(x / h - 1e-9)) + 1;
}

namespace {

double sigma_tilde2_of(double sigma2, double c0h, double h) { return (sigma2 + c0h) / (2 * h * h); }
double mu_tilde_of(double gap, double h) { return gap / (2 * h); }

}  // namespace

ChainModel build_chain(const LevyTriplet& triplet, double h, Eigen::Index depth) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("build_chain requires h > 0");
    if (depth < 1) throw ArgumentError("build_chain requires depth >= 1");

    const auto& lambda = triplet.measure();
    const auto choice = select_scheme(triplet);

    ChainModel chain;
    chain.h = h;
    chain.scheme = choice.scheme;
    chain.cutoff = choice.cutoff;
    chain.delta0 = triplet.delta0();
    chain.sigma2 = triplet.sigma2();
    chain.mu = triplet.mu();

    if (chain.cutoff == 1) {
        chain.c0h = lambda.second_moment_zero(std::min(h / 2, 1.0));
        // mu^h = sum_y y * lambda(A_y^h cap [-1, 0)), truncated at the bin holding -1.
        double mu_h = 0.0;
        for (Eigen::Index k = 1; (k - 0.5) * h < 1.0; ++k) {
            const double y = -static_cast<double>(k) * h;
            const double lo = std::max(y - h / 2, -1.0);
            mu_h += y * lambda.interval_mass(lo, y + h / 2);
        }
        chain.mu_h = mu_h;
    }

    chain.bins.resize(depth);
    for (Eigen::Index k = 1; k <= depth; ++k) {
        const double y = -static_cast<double>(k) * h;
        chain.bins(k - 1) = lambda.is_zero() ? 0.0 : lambda.interval_mass(y - h / 2, y + h / 2);
    }
    // Open tails accumulated from the far end, so tails(k - 1) = bins(k - 1) + tails(k)
    // holds exactly and only one far-tail integral is needed.
    chain.tails.resize(depth + 1);
    chain.tails(depth) = lambda.is_zero() ? 0.0 : lambda.tail_mass((static_cast<double>(depth) + 0.5) * h);
    for (Eigen::Index k = depth; k >= 1; --k) chain.tails(k - 1) = chain.tails(k) + chain.bins(k - 1);
    for (const auto& atom : lambda.atoms()) {
        const double r = -atom.location / h - 0.5;
        if (std::abs(r - std::round(r)) <= 1e-12 * std::max(1.0, std::abs(r))) {
            chain.half_grid_atoms.push_back(atom.location);
        }
    }

    const double gap = chain.drift_gap();
    const double st2 = sigma_tilde2_of(chain.sigma2, chain.c0h, h);
    const double mt = mu_tilde_of(gap, h);
    std::ostringstream why;
    if (chain.scheme == Scheme::One) {
        chain.up_rate = st2 + mt;
        chain.down_rate_local = st2 - mt;
        if (chain.down_rate_local < 0.0) {
            why << "h = " << h << " inadmissible: local down rate (sigma2 + c0h)/(2h^2) - (mu - mu^h)/(2h) = "
                << chain.down_rate_local << " < 0 (drift term (mu - mu^h)/(2h) = " << mt << ")";
        } else if (!(chain.up_rate > 0.0)) {
            why << "h = " << h << " inadmissible: up rate " << chain.up_rate
                << " <= 0 (drift term (mu - mu^h)/(2h) = " << mt << ")";
        }
    } else {
        chain.up_rate = st2 + 2 * mt;
        chain.down_rate_local = st2;
        if (gap < 0.0) {
            why << "h = " << h << " inadmissible: drift gap mu - mu^h = " << gap
                << " < 0 under scheme two (mu^h = " << chain.mu_h << ")";
        } else if (!(chain.up_rate > 0.0)) {
            why << "h = " << h << " inadmissible: up rate (mu - mu^h)/h + c0h/(2h^2) vanishes";
        }
    }
    if (!why.str().empty()) throw InadmissibleStepError(why.str());
    return chain;
}

GammaCoefficients gamma_coefficients(const ChainModel& chain, Eigen::Index depth) {
    if (depth < 1 || depth > chain.depth()) {
        throw ArgumentError("gamma_coefficients depth exceeds the chain depth");
    }
    GammaCoefficients g;
    g.h = chain.h;
    g.scheme = chain.scheme;
    g.delta0 = chain.delta0;
    g.sigma_tilde2 = sigma_tilde2_of(chain.sigma2, chain.c0h, chain.h);
    g.mu_tilde = mu_tilde_of(chain.drift_gap(), chain.h);
    const bool one = chain.scheme == Scheme::One;
    g.gamma_up = one ? g.sigma_tilde2 + g.mu_tilde : g.sigma_tilde2 + 2 * g.mu_tilde;
    g.gamma_down = chain.tails.head(depth);
    g.gamma_down(0) += one ? g.sigma_tilde2 - g.mu_tilde : g.sigma_tilde2;
    return g;
}

double chain_down_tail(const ChainModel& chain, Eigen::Index k) {
    if (k < 1 || k > chain.depth()) throw ArgumentError("chain_down_tail index out of range");
    double s = chain.tail_beyond();
    for (Eigen::Index j = chain.depth(); j >= k; --j) s += chain.bins(j - 1);
    if (k == 1) s += chain.down_rate_local;
    return s;
}

Complex psi_h(const ChainModel& chain, Complex beta) {
    const double h = chain.h;
    const Complex bh = beta * h;
    const Complex sh = std::sinh(bh / 2.0);
    const Complex second = (chain.sigma2 + chain.c0h) * 4.0 * sh * sh / (2 * h * h);
    Complex drift;
    if (chain.scheme == Scheme::One) {
        drift = chain.drift_gap() * std::sinh(bh) / h;
    } else {
        drift = chain.drift_gap() * detail::exp_minus_one(bh) / h;
    }
    Complex jumps{};
    for (Eigen::Index k = chain.depth(); k >= 1; --k) {
        const double c = chain.bins(k - 1);
        if (c != 0.0) jumps += c * detail::exp_minus_one(-beta * (static_cast<double>(k) * h));
    }
    // Mass beyond the stored bins is lumped at the next lattice point.
    const double beyond = chain.tail_beyond();
    if (beyond != 0.0) {
        jumps += beyond * detail::exp_minus_one(-beta * (static_cast<double>(chain.depth() + 1) * h));
    }
    return drift + second + jumps;
}

double max_admissible_h(const LevyTriplet& triplet, const std::vector<double>& candidates) {
    if (candidates.empty()) throw ArgumentError("max_admissible_h needs candidates");
    for (double h : candidates) {
        try {
            build_chain(triplet, h, 1);
            return h;
        } catch (const InadmissibleStepError&) {
        }
    }
    throw InadmissibleStepError("no candidate step is admissible");
}

}  // namespace scalekit
