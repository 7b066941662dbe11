#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

namespace scalekit::quadrature {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_panels = 10000;
};

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
    int panels = 0;
    bool converged = true;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename T, typename F>
Panel<T> kronrod_panel(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T kronrod = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        kronrod += (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    const double err = std::abs((kronrod - gauss) * half);
    return {a, b, kronrod * half, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod on a finite interval [a, b]. Panels with the
// largest error estimate are bisected until the summed estimate meets
// max(abs_tol, rel_tol * |value|) or the panel budget is spent.
template <typename F>
auto integrate(F&& f, double a, double b, const Options& opts = {})
    -> Result<decltype(f(a))> {
    using T = decltype(f(a));
    Result<T> out;
    if (!(b > a)) return out;

    std::priority_queue<detail::Panel<T>> heap;
    heap.push(detail::kronrod_panel<T>(f, a, b));
    T total = heap.top().value;
    double error = heap.top().error;
    int panels = 1;

    while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (panels + 1 > opts.max_panels) {
            out.converged = false;
            break;
        }
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            out.converged = false;
            break;
        }
        heap.pop();
        const auto left = detail::kronrod_panel<T>(f, worst.a, mid);
        const auto right = detail::kronrod_panel<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    // Re-sum from the panels to shed the drift of the running updates.
    T resummed{};
    double err_sum = 0.0;
    while (!heap.empty()) {
        resummed += heap.top().value;
        err_sum += heap.top().error;
        heap.pop();
    }
    out.value = resummed;
    out.error = err_sum;
    out.panels = panels;
    return out;
}

}  // namespace scalekit::quadrature
