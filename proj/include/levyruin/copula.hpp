#pragma once

#include <string>
#include <variant>

#include "levyruin/common.hpp"

namespace levyruin {

namespace family {
struct Independence {};
struct CompleteDependence {};
/// Clayton-Levy copula, (|u|^-theta + |v|^-theta)^(-1/theta) with sign weight eta.
struct Clayton {
    double eta = 1.0;
    double theta = 1.0;
};
/// Nonhomogeneous Archimedean Levy copula |uv| / (|u| + |v| + zeta).
struct NonhomArchimedean {
    double eta = 1.0;
    double zeta = 1.0;
};
}  // namespace family

/// Value of a first partial derivative. `at_kink` is set when the copula is
/// not differentiable at the requested point and the right limit was returned.
struct Partial {
    double value = 0.0;
    bool at_kink = false;
};

/// A bivariate Levy copula on the extended plane (-inf, inf]^2.
///
/// Infinite arguments are handled through the analytic limits of each family,
/// never through arithmetic on infinity. All members are pure; a LevyCopula is
/// a small immutable value.
class LevyCopula {
public:
    using Family = std::variant<family::Independence, family::CompleteDependence, family::Clayton,
                                family::NonhomArchimedean>;

    static LevyCopula independence();
    static LevyCopula complete_dependence();
    /// theta > 0, eta in [0, 1].
    static LevyCopula clayton(double theta, double eta = 1.0);
    /// zeta > 0, eta in (0, 1]. eta = 1 is the closure of the family used for
    /// spectrally positive models.
    static LevyCopula nonhom_archimedean(double zeta, double eta = 1.0);

    const Family& family() const noexcept { return family_; }
    std::string name() const;

    /// Twice continuously differentiable off the axes (Clayton, nonhomogeneous).
    bool is_smooth() const noexcept;
    /// Weight on the positive and negative quadrants; 1 for Independence and
    /// CompleteDependence.
    double eta() const noexcept;
    /// Puts mass on the mixed-sign quadrants (smooth family with eta < 1).
    bool has_mixed_mass() const noexcept;

    double eval(double u, double v) const;
    Partial partial_u(double u, double v) const;
    Partial partial_v(double u, double v) const;
    /// u - C(u, v) for u, v >= 0, evaluated without cancellation. The
    /// copula is symmetric, so this also serves v - C(u, v).
    double excess(double u, double v) const;
    /// Mixed second derivative d^2 C / du dv. Smooth families only.
    double density_uv(double u, double v) const;

    /// lim_{v -> inf} C(u, v) for u >= 0. Differs from eval(u, inf) for the
    /// independence copula, which is not left-continuous at infinity.
    double limit_v_to_infinity(double u) const;
    double limit_u_to_infinity(double v) const;
    /// lim_{v -> inf} dC/du (u, v) for finite u > 0.
    double partial_u_limit_v_to_infinity(double u) const;
    double partial_v_limit_u_to_infinity(double v) const;

    // Inversions on the positive quadrant, used by the samplers. Each one
    // has a closed form per family with a bracketed root-finding fallback.

    /// t >= 0 with C(t, v) = p, for 0 < p < lim_{t->inf} C(t, v).
    double solve_eval_for_u(double p, double v) const;
    /// w >= 0 with dC/du (u, w) = q, for 0 < q < dC/du (u, inf).
    double solve_partial_u_for_v(double u, double q) const;
    /// t >= 0 with t - C(t, v) = p (single-jump tail inversion).
    double solve_single_for_u(double p, double v) const;

    bool operator==(const LevyCopula& other) const;

private:
    explicit LevyCopula(Family f) : family_(f) {}
    Family family_;
};

}  // namespace levyruin
