#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"

using namespace scalekit;
using doctest::Approx;

TEST_CASE("fit_rate examples") {
    const std::vector<double> hs{0.1, 0.05, 0.025};
    CHECK(fit_rate(hs, {1e-2, 2.5e-3, 6.25e-4}).slope == Approx(2.0).epsilon(1e-12));
    CHECK(fit_rate(hs, {1e-2, 5e-3, 2.5e-3}).slope == Approx(1.0).epsilon(1e-12));
    CHECK(fit_rate(hs, {1e-2, 7.07e-3, 5e-3}).slope == Approx(0.5).epsilon(1e-3));

    const auto f = fit_rate(hs, {1e-2, 2.5e-3, 6.25e-4});
    CHECK(f.r2 == Approx(1.0).epsilon(1e-12));
    CHECK(f.intercept == Approx(std::log(1.0)).scale(1.0).epsilon(1e-12));
    CHECK_FALSE(f.exact);
    CHECK(f.dropped == 0);
}

TEST_CASE("fit_rate on a synthetic quadratic oracle") {
    const auto hs = dyadic(2, 9);
    std::vector<double> errs;
    for (double h : hs) errs.push_back(3.0 * h * h);
    const auto f = fit_rate(hs, errs);
    CHECK(f.slope == Approx(2.0).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == Approx(3.0).epsilon(1e-10));
}

TEST_CASE("fit_rate flags exact methods and bad input") {
    const auto f = fit_rate({0.1, 0.05, 0.025}, {1e-2, 0.0, 1e-3});
    CHECK(f.exact);
    CHECK(f.slope == 0.0);
    FitOptions tol;
    tol.exact_tol = 1e-13;
    CHECK(fit_rate({0.1, 0.05, 0.025}, {1e-14, 1e-15, 1e-15}, tol).exact);
    CHECK_THROWS_AS(fit_rate({0.1, 0.05}, {1e-2, 1e-3}), ArgumentError);
    CHECK_THROWS_AS(fit_rate({0.1, 0.05, 0.025}, {1e-2, 1e-3}), ArgumentError);
    CHECK_THROWS_AS(fit_rate({0.1, -0.05, 0.025}, {1e-2, 1e-3, 1e-4}), ArgumentError);
}

TEST_CASE("fit_rate drops polluted coarse points") {
    // Two wild coarse points followed by a clean h^1 run.
    const std::vector<double> hs = dyadic(1, 8);
    std::vector<double> errs;
    for (double h : hs) errs.push_back(h);
    errs[0] = 1e-6;
    errs[1] = 10.0;
    const auto f = fit_rate(hs, errs);
    CHECK(f.dropped == 2);
    CHECK(f.slope == Approx(1.0).epsilon(1e-12));
    CHECK(f.points == 6);

    // Never more than two drops.
    errs[2] = 1e-9;
    const auto g = fit_rate(hs, errs);
    CHECK(g.dropped == 2);
    CHECK(g.r2 < 0.98);

    // A clean fit is left alone.
    std::vector<double> clean;
    for (double h : hs) clean.push_back(h * h);
    CHECK(fit_rate(hs, clean).dropped == 0);
}

TEST_CASE("dyadic steps") {
    const auto hs = dyadic(4, 6);
    REQUIRE(hs.size() == 3);
    CHECK(hs[0] == 0.0625);
    CHECK(hs[2] == 0.015625);
}

TEST_CASE("validate_sweep") {
    const auto oracle = closed_form_oracle("x", [](double x) { return x; });
    CHECK_NOTHROW(validate_sweep({0.25, 0.5}, dyadic(2, 5), oracle));
    // not nested
    CHECK_THROWS_AS(validate_sweep({0.5}, {0.25, 0.1}, oracle), ArgumentError);
    // ascending
    CHECK_THROWS_AS(validate_sweep({0.5}, {0.125, 0.25}, oracle), ArgumentError);
    // off-grid point
    CHECK_THROWS_AS(validate_sweep({0.3}, dyadic(2, 5), oracle), ArgumentError);
    CHECK_THROWS_AS(validate_sweep({}, dyadic(2, 5), oracle), ArgumentError);
    CHECK_THROWS_AS(validate_sweep({0.5}, {0.25}, oracle), ArgumentError);
    CHECK_THROWS_AS(validate_sweep({0.5}, dyadic(2, 5), Oracle{}), ArgumentError);
    // non-dyadic nesting is allowed
    CHECK_NOTHROW(validate_sweep({0.5}, {0.5 / 3.0 * 3.0, 0.5 / 3.0}, oracle));

    Benchmark b;
    b.h = std::ldexp(1.0, -5);
    b.xs = {0.5};
    b.W = {1.0};
    b.Z = {1.0};
    CHECK_THROWS_AS(validate_sweep({0.5}, dyadic(2, 5), benchmark_oracle(b)), ArgumentError);
    CHECK_NOTHROW(validate_sweep({0.5}, dyadic(2, 4), benchmark_oracle(b)));
}

TEST_CASE("benchmark_oracle looks values up by x") {
    Benchmark b;
    b.h = 0.01;
    b.xs = {0.5, 1.0};
    b.W = {2.0, 3.0};
    b.Z = {4.0, 5.0};
    const auto o = benchmark_oracle(b, "bench");
    CHECK(o.label == "bench");
    CHECK(o.h == 0.01);
    CHECK(o.W(1.0) == 3.0);
    CHECK(o.Z(0.5) == 4.0);
    CHECK_THROWS_AS(o.W(0.75), ArgumentError);
}

TEST_CASE("error_sweep: driftless BM is exact") {
    const auto t = bm_triplet(2.0, 0.0);
    const auto oracle = closed_form_oracle("bm", [](double x) { return x; }, [](double) { return 1.0; });
    const auto rep = error_sweep(t, 0.0, {0.25, 0.5, 0.75}, dyadic(2, 7), oracle, {}, "bm");
    for (double e : rep.errW) CHECK(e <= 1e-13);
    for (double e : rep.errZ) CHECK(e == 0.0);
    CHECK(rep.fitW.exact);
    REQUIRE(rep.fitZ);
    CHECK(rep.fitZ->exact);
    CHECK(rep.triplet_id == "bm");
    CHECK(rep.oracle == "bm");
}

TEST_CASE("error_sweep: compound Poisson fixture is linear with the sharp constant") {
    const auto t = cp_fixture();
    const auto oracle = closed_form_oracle(
        "cp", [](double x) { return cp_W(0.0, x); }, [](double x) { return cp_Z(0.0, x); });
    const std::vector<double> K{0.25, 0.5};
    const auto rep = error_sweep(t, 0.0, K, dyadic(5, 9), oracle);
    CHECK(rep.fitW.slope == Approx(1.0).epsilon(0.1));
    // Delta / h at x = 0.5 tends to x e^x / 2.
    const auto ratios =
        asymptotic_ratios(rep, true, 1, [](double x) { return sharpness_limit(SharpnessCase::CpW, 0.0, x); });
    CHECK(ratios(ratios.rows() - 1, 1) == Approx(1.0).epsilon(0.05));
    CHECK(rep.errW.back() / rep.hs.back() == Approx(0.5 * std::exp(0.5) / 2).epsilon(0.05));
    // Deltas are signed: the chain sits below the truth.
    for (Eigen::Index i = 0; i < rep.deltaW.rows(); ++i) CHECK(rep.deltaW(i, 1) > 0.0);
    // q = 0: Z is identically one on both sides.
    CHECK(rep.fitZ->exact);
}

TEST_CASE("error_sweep: BM with drift is quadratic in W and linear in Z") {
    const double s2 = 1.0, mu = 1.0, q = 0.5;
    const auto form = bm_closed_form(s2, mu, q);
    const auto oracle = closed_form_oracle(
        "bm", [form](double x) { return bm_W(form, x); }, [form](double x) { return bm_Z(form, x); });
    const auto rep = error_sweep(bm_triplet(s2, mu), q, {0.5, 1.0}, dyadic(4, 9), oracle);
    CHECK(std::abs(rep.fitW.slope - 2.0) <= 0.2);
    REQUIRE(rep.fitZ);
    CHECK(std::abs(rep.fitZ->slope - 1.0) <= 0.15);
    const auto ratios =
        asymptotic_ratios(rep, true, 2, [&](double x) { return sharpness_limit(SharpnessCase::BmW, q, x, s2, mu); });
    CHECK(ratios(ratios.rows() - 1, 1) == Approx(1.0).epsilon(0.1));
    const auto zr =
        asymptotic_ratios(rep, false, 1, [&](double x) { return sharpness_limit(SharpnessCase::BmZ, q, x, s2, mu); });
    CHECK(zr(zr.rows() - 1, 1) == Approx(1.0).epsilon(0.1));
}

TEST_CASE("error_sweep refuses a benchmark that is not finer") {
    const auto t = cp_fixture();
    const auto bench = fine_grid_benchmark(t, 0.0, {0.5}, std::ldexp(1.0, -6));
    CHECK_THROWS_AS(error_sweep(t, 0.0, {0.5}, dyadic(4, 6), benchmark_oracle(bench)), ArgumentError);
}

TEST_CASE("error_sweep propagates inadmissible steps") {
    // Drift too small for the jumps at h = 1.
    const LevyTriplet t(0.0, LevyMeasure({}, {DensityPiece::power_law(1.0, 0.5, -1.0, 0.0)}), -1.5);
    const auto oracle = closed_form_oracle("none", [](double) { return 0.0; });
    CHECK_THROWS_AS(error_sweep(t, 0.0, {1.0}, {1.0, 0.5, 0.25}, oracle), InadmissibleStepError);
}

TEST_CASE("error_sweep is deterministic across thread counts") {
    std::mt19937_64 rng(7);
    const auto t = fixtures::random_triplet(rng);
    const auto oracle = closed_form_oracle("one", [](double) { return 1.0; }, [](double) { return 1.0; });
    SweepOptions one, three;
    three.threads = 3;
    const auto hs = dyadic(3, 8);
    const auto a = error_sweep(t, 0.5, {0.5, 1.0}, hs, oracle, one);
    const auto b = error_sweep(t, 0.5, {0.5, 1.0}, hs, oracle, three);
    CHECK((a.deltaW.array() == b.deltaW.array()).all());
    CHECK((a.deltaZ.array() == b.deltaZ.array()).all());
    CHECK(a.fitW.slope == b.fitW.slope);
}

TEST_CASE("rate_expectation") {
    const auto bm = rate_expectation(bm_triplet(1.0, 0.5));
    CHECK(bm.w == 2.0);
    CHECK(bm.z == 1.0);
    CHECK(bm.path_class == PathClass::BmOnly);
    CHECK_FALSE(bm.epsilon);

    const auto cp = rate_expectation(cp_fixture());
    CHECK(cp.w == 1.0);
    CHECK(cp.z == 1.0);
    CHECK(cp.path_class == PathClass::FiniteActivity);

    const LevyTriplet iafv(0.0, LevyMeasure({}, {DensityPiece::power_law(1.0, 0.5, -1.0, 0.0)}), 3.0);
    const auto fv = rate_expectation(iafv);
    CHECK(fv.w == 1.0);
    CHECK(fv.path_class == PathClass::InfiniteActivityFiniteVariation);

    const auto st = rate_expectation(stable_fixture());
    CHECK(st.path_class == PathClass::InfiniteVariation);
    REQUIRE(st.epsilon);
    CHECK(*st.epsilon == Approx(1.5).epsilon(1e-3));
    CHECK(st.w == Approx(0.5).epsilon(1e-2));
    CHECK(st.z == st.w);
}

TEST_CASE("rate_expectation rejects a measure without a power-law exponent") {
    // |y|^-2 / log(e / |y|): infinite variation, but delta lambda(-1, -delta) grows like 1 / log.
    const auto density = [](double y) { return 1.0 / (y * y * std::log(std::exp(1.0) / -y)); };
    const LevyTriplet t(0.0, LevyMeasure({}, {DensityPiece::generic(density, -1.0, 0.0, "log_corrected")}), 1.0);
    CHECK_THROWS_AS(rate_expectation(t), ConsistencyError);
}

TEST_CASE("random sweeps rank finer steps closer to a deep benchmark") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 3; ++i) {
        const auto t = fixtures::random_triplet(rng);
        const auto bench = fine_grid_benchmark(t, 0.0, {0.5, 1.0}, std::ldexp(1.0, -11));
        const auto rep = error_sweep(t, 0.0, {0.5, 1.0}, dyadic(3, 8), benchmark_oracle(bench));
        CHECK(rep.errW.back() < rep.errW.front());
    }
}
