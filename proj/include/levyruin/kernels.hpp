#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace levyruin::kernels {

/// Inner-loop primitives used by the grid convolutions.
struct KernelSet {
    const char* name;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelSet& scalar();
/// nullptr when not compiled in or not supported by the running CPU.
const KernelSet* avx2();
const KernelSet* neon();

/// All kernel sets usable on this machine, scalar first.
std::vector<const KernelSet*> available();

/// The fastest available set, unless LEVYRUIN_KERNELS names another one.
const KernelSet& active();

/// Looks a kernel set up by name; nullptr if unavailable.
const KernelSet* find(const std::string& name);

}  // namespace levyruin::kernels
