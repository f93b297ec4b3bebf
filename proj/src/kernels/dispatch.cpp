#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "levyruin/kernels.hpp"

namespace levyruin::kernels {

namespace {

const KernelSet kScalar{"scalar", detail::dot_scalar, detail::axpy_scalar};

#if defined(LEVYRUIN_HAVE_AVX2)
const KernelSet kAvx2{"avx2", detail::dot_avx2, detail::axpy_avx2};
#endif

#if defined(__aarch64__)
const KernelSet kNeon{"neon", detail::dot_neon, detail::axpy_neon};
#endif

const KernelSet& select() {
    if (const char* env = std::getenv("LEVYRUIN_KERNELS")) {
        if (const KernelSet* k = find(env)) return *k;
    }
    auto all = available();
    return *all.back();
}

}  // namespace

const KernelSet& scalar() { return kScalar; }

const KernelSet* avx2() {
#if defined(LEVYRUIN_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet* neon() {
#if defined(__aarch64__)
    return &kNeon;
#else
    return nullptr;
#endif
}

std::vector<const KernelSet*> available() {
    std::vector<const KernelSet*> out{&kScalar};
    if (auto k = avx2()) out.push_back(k);
    if (auto k = neon()) out.push_back(k);
    return out;
}

const KernelSet* find(const std::string& name) {
    for (const KernelSet* k : available())
        if (name == k->name) return k;
    return nullptr;
}

const KernelSet& active() {
    static const KernelSet& k = select();
    return k;
}

}  // namespace levyruin::kernels
