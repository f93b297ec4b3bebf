#pragma once

#include <string>
#include <variant>

#include "levyruin/common.hpp"

namespace levyruin {

namespace margin {
/// Compound Poisson with Exp(rate) jump sizes: tail lambda * exp(-rate x).
struct ExpoCPP {
    double lambda = 1.0;
    double rate = 1.0;
};
/// Compound Poisson with Pareto jump sizes >= xm: tail lambda * (x/xm)^-alpha.
struct ParetoCPP {
    double lambda = 1.0;
    double alpha = 1.0;
    double xm = 1.0;
};
/// Infinite-activity subordinator tail scale * x^-beta, beta in (0, 1).
struct StableLike {
    double beta = 0.5;
    double scale = 1.0;
};
}  // namespace margin

/// One-sided marginal tail integral x -> Pi((x, inf)) on (0, inf).
class MarginalTail {
public:
    using Spec = std::variant<margin::ExpoCPP, margin::ParetoCPP, margin::StableLike>;

    static MarginalTail expo(double lambda, double rate);
    static MarginalTail pareto(double lambda, double alpha, double xm);
    static MarginalTail stable_like(double beta, double scale);

    const Spec& spec() const noexcept { return spec_; }
    std::string name() const;

    double tail(double x) const;
    double density(double x) const;
    /// lim_{x -> 0} tail(x); +inf for infinite activity.
    double mass() const;
    bool finite_mass() const;
    /// Integral of tail over (0, inf); +inf when divergent.
    double mean() const;
    /// Integral of tail over (x, inf) for x >= 0; +inf when divergent.
    double integrated_tail(double x) const;
    /// x with tail(x) = p for 0 < p < mass.
    double inverse_tail(double p) const;
    /// Lower end of the support of the jump sizes (xm for Pareto, else 0).
    double support_lower() const;
    /// Point where the density has a jump discontinuity, if any (0 otherwise).
    double breakpoint() const { return support_lower(); }

    bool operator==(const MarginalTail& other) const;

private:
    explicit MarginalTail(Spec s) : spec_(s) {}
    Spec spec_;
};

}  // namespace levyruin
