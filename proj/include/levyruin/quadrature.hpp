#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace levyruin {

struct QuadConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t max_subdivisions = 2000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
};

namespace detail {
using RawIntegrand = double (*)(double, void*);
QuadResult integrate_raw(RawIntegrand f, void* ctx, double a, double b, const QuadConfig& cfg);
}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b]; either end may be
/// infinite. Throws QuadratureError when the tolerance is not met.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadConfig& cfg) {
    auto thunk = [](double x, void* ctx) -> double { return (*static_cast<std::remove_reference_t<F>*>(ctx))(x); };
    return detail::integrate_raw(thunk, const_cast<void*>(static_cast<const void*>(&f)), a, b, cfg);
}

/// Integral over consecutive pieces [p0, p1], [p1, p2], ...; breakpoints must
/// be nondecreasing. Empty pieces are skipped. The tolerance is applied per
/// piece and the error bounds are summed.
template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<double>& points, const QuadConfig& cfg) {
    QuadResult total;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        QuadResult r = integrate(f, points[i], points[i + 1], cfg);
        total.value += r.value;
        total.abs_error += r.abs_error;
    }
    return total;
}

/// Integral over [a, b] with 0 < a < b < inf via the substitution x = e^s,
/// which keeps integrands spanning several decades well resolved.
template <class F>
QuadResult integrate_log(F&& f, double a, double b, const QuadConfig& cfg) {
    auto g = [&](double s) {
        const double x = std::exp(s);
        return f(x) * x;
    };
    return integrate(g, std::log(a), std::log(b), cfg);
}

}  // namespace levyruin
