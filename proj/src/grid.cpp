#include "levyruin/grid.hpp"

#include <algorithm>
#include <cmath>

#include "levyruin/errors.hpp"

namespace levyruin {

std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

std::vector<double> cumulative_corrected(const std::vector<double>& f, double h) {
    std::vector<double> out = cumulative_trapezoid(f, h);
    const std::size_t n = f.size();
    if (n < 3) return out;
    auto deriv = [&](std::size_t i) {
        if (i == 0) return (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
        if (i == n - 1) return (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
        return (f[i + 1] - f[i - 1]) / (2 * h);
    };
    const double d0 = deriv(0);
    for (std::size_t i = 1; i < n; ++i) out[i] -= h * h / 12.0 * (deriv(i) - d0);
    return out;
}

GridConvolver::GridConvolver(const std::vector<double>& b, double h, const kernels::KernelSet& k)
    : reversed_(b.rbegin(), b.rend()), b0_(b.empty() ? 0.0 : b.front()), h_(h), k_(&k) {}

std::vector<double> GridConvolver::apply(const std::vector<double>& a) const {
    const std::size_t n = reversed_.size();
    if (a.size() != n) throw DomainError("convolution operands differ in length");
    std::vector<double> out(n, 0.0);
    const double* rb = reversed_.data();
    for (std::size_t i = 1; i < n; ++i) {
        // sum_{m=0}^{i} a[m] b[i-m] with b[i-m] = rb[n-1-i+m]
        const double full = k_->dot(a.data(), rb + (n - 1 - i), i + 1);
        const double ends = 0.5 * (a[0] * rb[n - 1 - i] + a[i] * b0_);
        out[i] = h_ * (full - ends);
    }
    return out;
}

std::vector<double> convolve_trapezoid(const std::vector<double>& a, const std::vector<double>& b, double h,
                                       const kernels::KernelSet& k) {
    return GridConvolver(b, h, k).apply(a);
}

double interpolate(const std::vector<double>& v, double h, double x) {
    if (v.empty()) throw DomainError("interpolation on an empty grid");
    const double last = h * static_cast<double>(v.size() - 1);
    if (!(x >= 0.0) || x > last * (1.0 + 1e-12)) throw DomainError("interpolation point outside the grid");
    const double s = std::min(x / h, static_cast<double>(v.size() - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(s), v.size() - 1);
    if (i + 1 >= v.size()) return v.back();
    const double w = s - static_cast<double>(i);
    return v[i] + w * (v[i + 1] - v[i]);
}

}  // namespace levyruin
