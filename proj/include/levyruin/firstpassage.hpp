#pragma once

#include <cstddef>
#include <vector>

#include "levyruin/decompose.hpp"
#include "levyruin/kernels.hpp"

namespace levyruin {

/// Uniform grid on [0, x_max] used by every discretized law.
struct GridConfig {
    double x_max = 20.0;
    std::size_t intervals = 4096;
    /// Geometric / renewal series are cut once their remainder is below this.
    double series_tol = 1e-10;

    double step() const { return x_max / static_cast<double>(intervals); }
};

/// X_t = S1_t + S2_t - c t. c = 0 is the pure compound Poisson model, c > 0
/// requires the net profit condition mu_S < c.
class RiskModel {
public:
    RiskModel(double drift, JumpDecomposition dec, GridConfig grid = {});

    double drift() const noexcept { return c_; }
    const JumpDecomposition& dec() const noexcept { return dec_; }
    const GridConfig& grid() const noexcept { return grid_; }
    bool pure_cpp() const noexcept { return c_ == 0.0; }
    double mean_sum() const noexcept { return mu_; }
    /// mu_S / c (drift mode only).
    double rho() const;

    void require_drift_mode() const;
    void require_finite_intensity() const;

private:
    double c_;
    JumpDecomposition dec_;
    GridConfig grid_;
    double mu_;
};

/// Ascending ladder height d.f. F_H(dz) = tail_sum(z) / mu_S dz on the grid.
struct LadderHeightDF {
    double h = 0.0;
    std::vector<double> density;
    std::vector<double> cdf;
    /// cdf.back() plus the quadrature mass beyond x_max.
    double grid_mass = 0.0;
    double tail_remainder = 0.0;
    double remainder_error = 0.0;
    /// tail_Pk on the grid, k = 1, 2, 3.
    std::vector<double> component_tail[3];
    double quad_error = 0.0;
};

LadderHeightDF ladder_height_df(const RiskModel& model);

/// Density of the continuous part in y plus the atom at y = x.
struct QuintupleDensity {
    double continuous = 0.0;
    double atom = 0.0;
};

/// Space laws of the first passage over a barrier for the drift model,
/// built once from the geometric compound of ladder height convolution powers.
class RuinLaw {
public:
    explicit RuinLaw(const RiskModel& model, const kernels::KernelSet& k = kernels::active());

    const RiskModel& model() const noexcept { return model_; }
    const LadderHeightDF& ladder() const noexcept { return ladder_; }
    /// Number of convolution powers kept and the geometric remainder beyond them.
    std::size_t terms() const noexcept { return terms_; }
    double series_remainder() const noexcept { return remainder_; }

    Estimate ruin_prob(double x) const;
    Estimate cause_prob(double x, int k) const;
    /// sum_{n >= 0} rho^n F_H^{n*}([0, x]) with the unit atom at 0.
    double potential_cdf(double x) const;
    /// Density of sum_{n >= 1} rho^n F_H^{n*} at x.
    double potential_density(double x) const;

    /// Joint density of overshoot u, undershoot v and undershoot of the
    /// previous maximum y with cause k. Zero outside u > 0, 0 <= y <= x, v >= y.
    QuintupleDensity quintuple_space_density(double x, double u, double v, double y, int k) const;

    /// Weight of undershoot v after integrating out y:
    /// 1{v >= x} + int_0^{min(v, x)} potential_density(x - y) dy.
    double undershoot_weight(double x, double v) const;
    /// P(u0 < overshoot <= u1, v0 < undershoot <= v1, cause k, passage over x).
    double bin_probability(double x, int k, double u0, double u1, double v0, double v1) const;

    /// ruin_prob evaluated on all grid points.
    const std::vector<double>& ruin_grid() const noexcept { return psi_; }

private:
    void check_x(double x) const;
    double grid_error(const std::vector<double>& fine, const std::vector<double>& coarse, double x) const;

    RiskModel model_;
    LadderHeightDF ladder_;
    double h_;
    std::size_t terms_ = 0;
    double remainder_ = 0.0;
    std::vector<double> g_;
    std::vector<double> g_cum_;
    std::vector<double> psi_;
    std::vector<double> psi_coarse_;
    std::vector<double> cause_[3];
    std::vector<double> cause_coarse_[3];
};

/// Space-time law of the first passage for the pure compound Poisson model.
class TripleLaw {
public:
    TripleLaw(const RiskModel& model, double x, const kernels::KernelSet& k = kernels::active());

    double barrier() const noexcept { return x_; }
    double lambda() const noexcept { return lambda_; }

    Estimate cause_prob(int k) const;
    /// Density and d.f. of the passage time.
    double time_density(double s) const;
    double time_cdf(double s) const;
    /// P(undershoot <= v), including the atom at v = x.
    double undershoot_cdf(double v) const;
    /// Joint density in (s, u, v) for cause k; the atom sits at v = x.
    QuintupleDensity density(double s, double u, double v, int k) const;
    std::size_t terms() const noexcept { return fn_at_x_.size(); }

private:
    RiskModel model_;
    double x_;
    double lambda_;
    double h_ = 0.0;
    std::vector<double> jump_density_;
    std::vector<double> renewal_;
    std::vector<double> renewal_cum_;
    /// F^{n*}(x) for n = 0, 1, ...
    std::vector<double> fn_at_x_;
    std::vector<std::vector<double>> fn_density_;
};

}  // namespace levyruin
