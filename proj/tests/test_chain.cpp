#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace scalekit;
using doctest::Approx;

namespace {

const LevyTriplet& bm2() {
    static const LevyTriplet t(2.0, LevyMeasure{}, 0.0);
    return t;
}

// sigma2 = 0, |y|^{-3/2} dy on [-1, 0), mu = -1.5; mu_0 = mu + kappa(0) = 0.5.
LevyTriplet drift_starved() {
    return LevyTriplet(0.0, LevyMeasure({}, {DensityPiece::power_law(1.0, 0.5, -1.0, 0.0)}), -1.5);
}

// mu - mu^h for drift_starved, from the antiderivative 2 t^{-1/2}.
double drift_starved_gap(double h) {
    double mu_h = 0.0;
    for (int k = 1; k * h - h / 2 < 1.0; ++k) {
        const double a = k * h - h / 2, b = std::min(k * h + h / 2, 1.0);
        mu_h -= k * h * 2.0 * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(b));
    }
    return -1.5 - mu_h;
}

std::vector<LevyTriplet> sample_triplets() {
    std::vector<LevyTriplet> ts{bm2(), cp_fixture(), stable_fixture(), fixtures::example61(), fixtures::example62(),
                                LevyTriplet(1.0, LevyMeasure::dirac(-0.75, 2.0), 1.0)};
    std::mt19937_64 rng(3);
    for (int i = 0; i < 8; ++i) ts.push_back(fixtures::random_triplet(rng));
    return ts;
}

}  // namespace

TEST_CASE("select_scheme examples") {
    const auto a = select_scheme(bm2());
    CHECK(a.scheme == Scheme::One);
    CHECK(a.cutoff == 0);
    const auto b = select_scheme(cp_fixture());
    CHECK(b.scheme == Scheme::Two);
    CHECK(b.cutoff == 0);
    const LevyTriplet st(0.0, LevyMeasure({}, {DensityPiece::power_law(1.0, 1.5, -1.0, 0.0)}), 1.0);
    const auto c = select_scheme(st);
    CHECK(c.scheme == Scheme::Two);
    CHECK(c.cutoff == 1);
    CHECK(select_scheme(LevyTriplet(0.5, LevyMeasure({}, {DensityPiece::power_law(1.0, 1.5)}), 0.0)).scheme ==
          Scheme::One);
}

TEST_CASE("build_chain examples") {
    const auto bm = build_chain(bm2(), 0.5, 8);
    CHECK(bm.scheme == Scheme::One);
    CHECK(bm.up_rate == 4.0);
    CHECK(bm.down_rate_local == 4.0);
    CHECK(bm.bins.isZero());
    CHECK(bm.delta0 == 1);

    const auto cp = build_chain(cp_fixture(), 0.5, 4);
    CHECK(cp.mu_h == 0.0);
    CHECK(cp.c0h == 0.0);
    CHECK(cp.up_rate == 2.0);
    CHECK(cp.bins(0) == 0.0);
    CHECK(cp.bins(1) == 1.0);
    CHECK(cp.bins(2) == 0.0);
    CHECK(cp.bins(3) == 0.0);
    CHECK(cp.delta0 == 0);

    const auto drift = build_chain(LevyTriplet(1.0, LevyMeasure{}, 1.0), 0.1, 2);
    CHECK(drift.up_rate == Approx(55.0).epsilon(1e-14));
    CHECK(drift.down_rate_local == Approx(45.0).epsilon(1e-14));
}

TEST_CASE("build_chain argument and admissibility errors") {
    CHECK_THROWS_AS(build_chain(bm2(), 0.0, 4), ArgumentError);
    CHECK_THROWS_AS(build_chain(bm2(), -0.5, 4), ArgumentError);
    CHECK_THROWS_AS(build_chain(bm2(), 0.5, 0), ArgumentError);
    REQUIRE(drift_starved_gap(1.0) < 0.0);
    CHECK_THROWS_AS(build_chain(drift_starved(), 1.0, 4), InadmissibleStepError);
    // Scheme one with mu > 1/h: the local down rate turns negative.
    CHECK_THROWS_AS(build_chain(LevyTriplet(1.0, LevyMeasure{}, 30.0), 0.5, 4), InadmissibleStepError);
}

TEST_CASE("compensator and small-jump variance by hand") {
    const auto t = drift_starved();
    for (double h : {0.015625, 0.00390625}) {
        REQUIRE(drift_starved_gap(h) >= 0.0);
        const auto c = build_chain(t, h, 32);
        CHECK(c.drift_gap() == Approx(drift_starved_gap(h)).epsilon(1e-10));
        // c_0 = int_{[-h/2, 0)} y^2 |y|^{-3/2} dy = (2/3) (h/2)^{3/2}
        CHECK(c.c0h == Approx(2.0 / 3.0 * std::pow(h / 2, 1.5)).epsilon(1e-10));
    }
}

TEST_CASE("gamma_coefficients examples") {
    const auto bm = gamma_coefficients(build_chain(bm2(), 0.5, 4));
    CHECK(bm.gamma_up == 4.0);
    CHECK(bm.down(1) == 4.0);
    CHECK(bm.down(2) == 0.0);
    CHECK(bm.down(4) == 0.0);

    const auto cp = gamma_coefficients(build_chain(cp_fixture(), 0.5, 4));
    CHECK(cp.gamma_up == 2.0);
    CHECK(cp.down(1) == 1.0);
    CHECK(cp.down(2) == 1.0);
    CHECK(cp.down(3) == 0.0);

    const auto drift = gamma_coefficients(build_chain(LevyTriplet(1.0, LevyMeasure{}, 1.0), 0.1, 2));
    CHECK(drift.gamma_up == Approx(55.0).epsilon(1e-14));
    CHECK(drift.down(1) == Approx(45.0).epsilon(1e-14));
    CHECK(drift.sigma_tilde2 == Approx(50.0).epsilon(1e-14));
    CHECK(drift.mu_tilde == Approx(5.0).epsilon(1e-14));

    CHECK_THROWS_AS(gamma_coefficients(build_chain(bm2(), 0.5, 4), 5), ArgumentError);
}

TEST_CASE("gamma coefficients match the closed-form definitions") {
    for (const auto& t : sample_triplets()) {
        for (double h : {0.25, 0.03125}) {
            const auto c = build_chain(t, h, 40);
            const auto g = gamma_coefficients(c);
            const bool one = t.sigma2() > 0.0;
            const double s2 = (t.sigma2() + c.c0h) / (2 * h * h);
            const double mt = c.drift_gap() / (2 * h);
            CHECK(g.gamma_up == Approx(one ? s2 + mt : s2 + 2 * mt).epsilon(1e-13));
            CHECK(g.gamma_up == Approx(c.up_rate).epsilon(1e-13));
            const auto& m = t.measure();
            const double tail1 = m.is_zero() ? 0.0 : m.tail_mass(h / 2);
            CHECK(fixtures::rel_diff(g.down(1), s2 - (one ? mt : 0.0) + tail1) <= 1e-10);
            for (int k = 2; k <= 40; ++k) {
                const double direct = m.is_zero() ? 0.0 : m.tail_mass((k - 0.5) * h);
                CHECK(fixtures::rel_diff(g.down(k), direct) <= 1e-10);
            }
        }
    }
}

TEST_CASE("gamma and chain tails are dual") {
    for (const auto& t : sample_triplets()) {
        for (double h : {0.125, 0.03125, 0.0078125}) {
            const auto c = build_chain(t, h, 64);
            const auto g = gamma_coefficients(c);
            for (Eigen::Index k = 1; k <= g.depth(); ++k) {
                const double chain_tail = chain_down_tail(c, k);
                CHECK(fixtures::rel_diff(g.down(k), chain_tail) <= 1e-12);
            }
        }
    }
}

TEST_CASE("rates, bins, tails and gammas are nonnegative") {
    for (const auto& t : sample_triplets()) {
        for (double h : {0.25, 0.0625, 0.0078125}) {
            const auto c = build_chain(t, h, 100);
            CHECK(c.up_rate > 0.0);
            CHECK(c.down_rate_local >= 0.0);
            CHECK(c.c0h >= 0.0);
            CHECK((c.bins.array() >= 0.0).all());
            CHECK((c.tails.array() >= 0.0).all());
            const auto g = gamma_coefficients(c);
            CHECK(g.gamma_up > 0.0);
            CHECK((g.gamma_down.array() >= 0.0).all());
            for (Eigen::Index k = 3; k <= g.depth(); ++k) CHECK(g.down(k) <= g.down(k - 1));
        }
    }
}

TEST_CASE("atoms on half-grid points are reported") {
    const LevyTriplet t(1.0, LevyMeasure::dirac(-0.75, 2.0), 1.0);
    const auto c = build_chain(t, 0.5, 4);
    REQUIRE(c.half_grid_atoms.size() == 1);
    CHECK(c.half_grid_atoms[0] == -0.75);
    CHECK(build_chain(t, 0.25, 8).half_grid_atoms.empty());
    // Left-closed bins put the atom in [-0.75, -0.25); the open tail at 0.75 misses it.
    CHECK(c.bins(0) == 2.0);
    CHECK(c.bins(1) == 0.0);
    CHECK(c.tails(0) == 2.0);
    CHECK(c.tails(1) == 0.0);
}

TEST_CASE("psi_h examples") {
    const auto bm = build_chain(bm2(), 0.5, 4);
    CHECK(psi_h(bm, 1.0) == Approx(4.0 * (std::exp(0.5) + std::exp(-0.5) - 2.0)).epsilon(1e-14));
    for (const auto& t : sample_triplets()) CHECK(std::abs(psi_h(build_chain(t, 0.125, 16), Complex(0.0))) == 0.0);
    // CP chain: (e^{bh}-1)/h + e^{-2bh} - 1 at h = 0.5
    const auto cp = build_chain(cp_fixture(), 0.5, 4);
    CHECK(psi_h(cp, 1.0) == Approx((std::exp(0.5) - 1) / 0.5 + std::exp(-1.0) - 1).epsilon(1e-14));
}

TEST_CASE("psi_h converges to psi along dyadic steps") {
    std::vector<LevyTriplet> ts{bm2(), cp_fixture(), stable_fixture(), fixtures::example61(),
                                LevyTriplet(1.0, LevyMeasure{}, 1.0), LevyTriplet(1.0, LevyMeasure::dirac(-0.3, 2.0), 1.0)};
    for (const auto& t : ts) {
        for (double beta : {0.5, 1.0, 2.0}) {
            const double exact = t.psi(beta);
            std::vector<double> errs;
            for (int k = 2; k <= 9; ++k) {
                const double h = std::ldexp(1.0, -k);
                const auto c = build_chain(t, h, depth_for(40.0, h));
                errs.push_back(std::abs(psi_h(c, beta) - exact));
            }
            for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= 2.0 * errs[i - 1] + 1e-13);
            CHECK(errs.back() <= 0.25 * errs.front() + 1e-13);
        }
    }
}

TEST_CASE("max_admissible_h examples") {
    const auto hs = dyadic(0, 8);
    CHECK(max_admissible_h(bm2(), hs) == 1.0);
    CHECK(max_admissible_h(LevyTriplet(1.0, LevyMeasure{}, 1.0), {1.0, 0.5}) == 1.0);
    double expected = 0.0;
    for (double h : hs) {
        if (drift_starved_gap(h) >= 0.0) {
            expected = h;
            break;
        }
    }
    REQUIRE(expected > 0.0);
    REQUIRE(expected < 1.0);
    CHECK(max_admissible_h(drift_starved(), hs) == expected);
    CHECK_THROWS_AS(max_admissible_h(drift_starved(), {1.0}), InadmissibleStepError);
    CHECK_THROWS_AS(max_admissible_h(bm2(), {}), ArgumentError);
}

TEST_CASE("depth_for covers the target") {
    CHECK(depth_for(2.0, 0.5) >= 4);
    CHECK(depth_for(0.0, 0.5) >= 1);
    CHECK_THROWS_AS(depth_for(1.0, 0.0), ArgumentError);
}
