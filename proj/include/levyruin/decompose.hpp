#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levyruin/copula.hpp"
#include "levyruin/margin.hpp"
#include "levyruin/quadrature.hpp"

namespace levyruin {

/// A value with a bound on its absolute numerical error.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

enum class TailMethod {
    Auto,        ///< validated closed form when one matches, else quadrature
    Quadrature,  ///< always the general integral representation
    ClosedForm,  ///< closed form only; throws if none matches
};

class JumpDecomposition;

/// An explicit formula for one component tail (or the total tail) that only
/// applies to particular copula/margin combinations.
struct ClosedForm {
    std::string name;
    std::string formula;
    /// 1, 2, 3 for a component tail, 0 for the total tail.
    int component = 0;
    bool (*applies)(const JumpDecomposition&) = nullptr;
    /// The formula holds for z > domain_min.
    double (*domain_min)(const JumpDecomposition&) = nullptr;
    double (*eval)(const JumpDecomposition&, double z) = nullptr;
    /// False for forms that are no cheaper than the general representation.
    bool evaluation = true;
};

/// Every closed form known to the library, including ones that fail their
/// numerical check (those are never used for evaluation).
const std::vector<ClosedForm>& closed_form_catalog();

struct ClosedFormCheck {
    std::string name;
    std::vector<double> z;
    std::vector<double> closed;
    std::vector<double> quadrature;
    double max_rel_dev = 0.0;
    bool passed = false;
};

/// Compares a closed form with the tightly converged general representation
/// at the given points (points outside the formula's domain are skipped).
ClosedFormCheck check_closed_form(const ClosedForm& cf, const JumpDecomposition& dec, const std::vector<double>& zs,
                                  double rel_tol = 1e-7);

/// Single-jump and common-jump structure of S = S1 + S2 for spectrally
/// positive margins coupled by a Levy copula.
///
/// P1, P2 collect the jumps of one component alone, P3 the simultaneous
/// jumps. Intensities, means and the set of validated closed forms are
/// computed once at construction; all queries are const and thread-safe.
class JumpDecomposition {
public:
    JumpDecomposition(LevyCopula copula, MarginalTail m1, MarginalTail m2, QuadConfig quad = {});

    const LevyCopula& copula() const noexcept { return copula_; }
    const MarginalTail& margin(int i) const;
    const QuadConfig& quad() const noexcept { return quad_; }

    /// lambda_{Pk} = Pk((0, inf)); may be +inf.
    double lambda_P(int k) const;
    bool finite_intensity() const;
    /// lambda_1 + lambda_2 - C(lambda_1, lambda_2); throws ValidationError if infinite.
    double lambda_sum() const;

    Estimate tail_P(int k, double z, TailMethod method = TailMethod::Auto) const;
    Estimate tail_sum(double z, TailMethod method = TailMethod::Auto) const;
    /// Levy density of Pk at z > 0.
    double density_P(int k, double z) const;
    double density_sum(double z) const;

    /// Integral of tail_Pk over (0, inf); value is +inf when divergent.
    Estimate mean_P(int k) const;
    /// mu_S = mean(S1) + mean(S2).
    double mean_sum() const;

    /// General integral representation with an explicit quadrature
    /// configuration; component 0 is the total tail.
    Estimate tail_by_quadrature(int component, double z, const QuadConfig& cfg) const;

    /// Names of the closed forms that matched this model and passed the check.
    std::vector<std::string> active_closed_forms() const;
    const std::vector<ClosedFormCheck>& closed_form_checks() const noexcept { return checks_; }

private:
    Estimate common_tail_quadrature(double z, const QuadConfig& cfg) const;
    Estimate common_tail_complete_dependence(double z) const;
    double common_density_complete_dependence(double z) const;
    /// lim_{y -> 0} C(u, tail_j(y)) for the partner j of component i.
    double partner_limit(int i, double u) const;
    /// u - lim_{y -> 0} C(u, tail_j(y)), free of cancellation.
    double single_excess(int i, double u) const;
    double partner_limit_derivative(int i, double u) const;
    Estimate partner_limit_integral(int i) const;
    std::vector<double> common_breakpoints(double z) const;
    struct ActiveForm {
        const ClosedForm* form;
        double checked_dev;
    };
    const ActiveForm* active_form(int component) const;
    Estimate closed_form_value(int component, double z) const;

    LevyCopula copula_;
    MarginalTail m1_, m2_;
    QuadConfig quad_;
    double lambda_[3] = {0, 0, 0};
    Estimate mean_[3];
    std::vector<ActiveForm> active_;
    std::vector<ClosedFormCheck> checks_;
};

/// Tail of the opposite-sign jump classes (k = 4: S1 up with S2 down,
/// k = 5: S2 up with S1 down) for two-sided compound Poisson margins coupled
/// by a smooth Levy copula. An absent negative side contributes nothing.
Estimate tail_P45(const MarginalTail& m1_pos, const std::optional<MarginalTail>& m1_neg, const MarginalTail& m2_pos,
                  const std::optional<MarginalTail>& m2_neg, const LevyCopula& copula, int k, double z,
                  const QuadConfig& quad = {});

}  // namespace levyruin
