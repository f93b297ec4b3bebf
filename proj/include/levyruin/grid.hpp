#pragma once

#include <cstddef>
#include <vector>

#include "levyruin/kernels.hpp"

namespace levyruin {

/// Running trapezoid integral: out[i] = int_0^{i h} f.
std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h);

/// Running trapezoid integral with the Euler-Maclaurin end correction
/// -h^2/12 (f'(x) - f'(0)), derivatives taken from the grid.
std::vector<double> cumulative_corrected(const std::vector<double>& f, double h);

/// Trapezoid convolution on a uniform grid starting at 0:
/// out[i] = int_0^{i h} a(i h - y) b(y) dy. Both inputs must have equal size.
/// The partner b is stored reversed once so that each output is a dot product.
class GridConvolver {
public:
    GridConvolver(const std::vector<double>& b, double h, const kernels::KernelSet& k = kernels::active());

    std::vector<double> apply(const std::vector<double>& a) const;
    std::size_t size() const noexcept { return reversed_.size(); }

private:
    std::vector<double> reversed_;
    double b0_;
    double h_;
    const kernels::KernelSet* k_;
};

std::vector<double> convolve_trapezoid(const std::vector<double>& a, const std::vector<double>& b, double h,
                                       const kernels::KernelSet& k = kernels::active());

/// Linear interpolation of grid values v[i] at i h; x must lie in [0, (n-1) h].
double interpolate(const std::vector<double>& v, double h, double x);

}  // namespace levyruin
