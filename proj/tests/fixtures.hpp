#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "scalekit/applications.hpp"
#include "scalekit/config.hpp"
#include "scalekit/convergence.hpp"

namespace fixtures {

using namespace scalekit;

inline LevyTriplet example61() {
    TripletSpec s;
    s.sigma2 = 0.0;
    s.mu = 5.0;
    DensitySpec d;
    d.kind = "log_normal";
    s.densities.push_back(d);
    return build_triplet(s);
}

inline TripletSpec example62_spec() {
    TripletSpec s;
    s.sigma2 = 0.0;
    s.mu = 15.0;
    s.atoms = {{-1.0, 0.5}, {-2.0, 0.5}};
    DensitySpec near;
    near.kind = "power_law";
    near.coef = 1.5;
    near.beta = 1.5;
    near.lo = -1.0;
    near.hi = 0.0;
    DensitySpec mid;
    mid.kind = "shifted_power";
    mid.coef = 0.5;
    mid.exponent = -0.5;
    mid.anchor = -1.0;
    mid.lo = -2.0;
    mid.hi = -1.0;
    DensitySpec far;
    far.kind = "named";
    far.name = "oscillating_tail";
    far.lo = -kInf;
    far.hi = -1.0;
    s.densities = {near, mid, far};
    return s;
}

inline LevyTriplet example62() { return build_triplet(example62_spec()); }

// Steps used by the property suites.
inline std::vector<double> property_hs() { return dyadic(3, 8); }

inline bool admissible(const LevyTriplet& t, const std::vector<double>& hs) {
    for (double h : hs) {
        try {
            build_chain(t, h, 4);
        } catch (const InadmissibleStepError&) {
            return false;
        }
    }
    return true;
}

// Random triplet mixing Brownian part, atoms, and one density piece; redrawn
// until every step in hs is admissible.
inline LevyTriplet random_triplet(std::mt19937_64& rng, const std::vector<double>& hs = property_hs()) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const double sigma2 = u(rng) < 0.5 ? 0.0 : 0.1 + 1.9 * u(rng);
        const double mu = -1.0 + 4.0 * u(rng);
        std::vector<Atom> atoms;
        const int n_atoms = static_cast<int>(4 * u(rng));
        for (int i = 0; i < n_atoms; ++i) atoms.push_back({-0.05 - 3.0 * u(rng), 0.1 + 1.9 * u(rng)});
        std::vector<DensityPiece> pieces;
        const double pick = u(rng);
        if (pick < 0.35) {
            pieces.push_back(DensityPiece::power_law(0.1 + 0.9 * u(rng), 0.2 + 1.6 * u(rng), -1.0, 0.0));
        } else if (pick < 0.65) {
            pieces.push_back(DensityPiece::exponential(0.2 + 1.8 * u(rng), 0.5 + 2.0 * u(rng)));
        } else if (pick < 0.8) {
            pieces.push_back(DensityPiece::log_normal(0.2 + 0.8 * u(rng)));
        }
        try {
            LevyTriplet t(sigma2, LevyMeasure(atoms, pieces), mu);
            if (admissible(t, hs)) return t;
        } catch (const ArgumentError&) {
            // pure drift, or finite-variation jumps without positive drift
        }
    }
}

// Two measures that agree on [-2.5, 0) and put the same dyadic mass below it.
struct TailSwap {
    LevyTriplet original;
    LevyTriplet modified;
    double x;
};

inline TailSwap tail_swap() {
    std::vector<DensityPiece> near{DensityPiece::power_law(0.5, 1.25, -1.0, 0.0)};
    LevyMeasure a({{-0.5, 0.25}, {-3.0, 0.5}, {-4.0, 0.25}}, near);
    LevyMeasure b({{-0.5, 0.25}, {-7.0, 0.75}}, near);
    return {LevyTriplet(0.5, a, 1.0), LevyTriplet(0.5, b, 1.0), 2.0};
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

template <typename A, typename B>
double max_rel_diff(const A& a, const B& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.size()); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
    return worst;
}

}  // namespace fixtures
