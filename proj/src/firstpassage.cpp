#include "levyruin/firstpassage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "levyruin/errors.hpp"
#include "levyruin/grid.hpp"

namespace levyruin {

namespace {

void check_k(int k) {
    if (k < 1 || k > 3) throw DomainError("cause index must be 1, 2 or 3");
}

double tail_at(const JumpDecomposition& dec, int k, double z, double* err) {
    if (z <= 0.0) return dec.lambda_P(k);
    Estimate e = dec.tail_P(k, z);
    if (err) *err = std::max(*err, e.error);
    return e.value;
}

std::vector<double> every_other(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size() / 2 + 1);
    for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
    return out;
}

struct Compound {
    std::vector<double> g;
    std::size_t terms = 0;
    double remainder = 0.0;
};

// g = sum_{n=1}^N rho^n f^{n*}, N the first index with rho^{N+1} / (1 - rho) < tol.
Compound geometric_compound(const std::vector<double>& f, double h, double rho, double tol,
                            const kernels::KernelSet& k) {
    Compound out;
    out.g.assign(f.size(), 0.0);
    if (rho <= 0.0) return out;
    GridConvolver conv(f, h, k);
    std::vector<double> fn = f;
    double w = rho;
    for (std::size_t n = 1;; ++n) {
        k.axpy(w, fn.data(), out.g.data(), fn.size());
        out.terms = n;
        out.remainder = w * rho / (1.0 - rho);
        if (out.remainder < tol) break;
        fn = conv.apply(fn);
        w *= rho;
    }
    return out;
}

}  // namespace

RiskModel::RiskModel(double drift, JumpDecomposition dec, GridConfig grid)
    : c_(drift), dec_(std::move(dec)), grid_(grid), mu_(dec_.mean_sum()) {
    if (!(c_ >= 0.0) || !std::isfinite(c_)) throw ValidationError("drift must be a finite nonnegative number");
    if (!(grid_.x_max > 0.0) || grid_.intervals < 2 || !(grid_.series_tol > 0.0))
        throw ValidationError("grid needs x_max > 0, at least 2 intervals and a positive series tolerance");
    if (c_ == 0.0) {
        require_finite_intensity();
    } else if (!(mu_ < c_)) {
        throw ValidationError("net profit condition violated: mu_S = " + std::to_string(mu_) +
                              " is not below the drift c = " + std::to_string(c_));
    }
}

double RiskModel::rho() const {
    require_drift_mode();
    return mu_ / c_;
}

void RiskModel::require_drift_mode() const {
    if (c_ == 0.0) throw ValidationError("operation needs a model with positive drift");
}

void RiskModel::require_finite_intensity() const {
    if (!dec_.finite_intensity()) throw ValidationError("operation needs finite jump intensity");
}

LadderHeightDF ladder_height_df(const RiskModel& model) {
    model.require_drift_mode();
    const JumpDecomposition& dec = model.dec();
    const double mu = model.mean_sum();
    if (!std::isfinite(mu)) throw ValidationError("ladder height needs a finite mean mu_S");
    const GridConfig& gc = model.grid();
    const std::size_t n = gc.intervals + 1;
    LadderHeightDF out;
    out.h = gc.step();
    out.density.assign(n, 0.0);
    for (int k = 1; k <= 3; ++k) {
        auto& t = out.component_tail[k - 1];
        t.resize(n);
        if (dec.lambda_P(k) == 0.0) {
            std::fill(t.begin(), t.end(), 0.0);
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) t[i] = tail_at(dec, k, out.h * static_cast<double>(i), &out.quad_error);
    }
    for (std::size_t i = 0; i < n; ++i)
        out.density[i] = (out.component_tail[0][i] + out.component_tail[1][i] + out.component_tail[2][i]) / mu;
    out.cdf = cumulative_corrected(out.density, out.h);
    QuadResult rem = integrate([&](double z) { return dec.tail_sum(z).value; }, gc.x_max, kInf, dec.quad());
    out.tail_remainder = rem.value / mu;
    out.remainder_error = rem.abs_error / mu;
    out.grid_mass = out.cdf.back() + out.tail_remainder;
    return out;
}

RuinLaw::RuinLaw(const RiskModel& model, const kernels::KernelSet& k)
    : model_(model), ladder_(ladder_height_df(model)), h_(ladder_.h) {
    const double rho = model.rho();
    const double c = model.drift();
    const double tol = model.grid().series_tol;

    Compound fine = geometric_compound(ladder_.density, h_, rho, tol, k);
    terms_ = fine.terms;
    remainder_ = fine.remainder;
    g_ = std::move(fine.g);
    g_cum_ = cumulative_corrected(g_, h_);

    const std::vector<double> f2 = every_other(ladder_.density);
    Compound coarse = geometric_compound(f2, 2 * h_, rho, tol, k);
    const std::vector<double> g2_cum = cumulative_corrected(coarse.g, 2 * h_);

    psi_.resize(g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i) psi_[i] = std::clamp(rho - (1.0 - rho) * g_cum_[i], 0.0, 1.0);
    psi_coarse_.resize(g2_cum.size());
    for (std::size_t i = 0; i < g2_cum.size(); ++i) psi_coarse_[i] = std::clamp(rho - (1.0 - rho) * g2_cum[i], 0.0, 1.0);

    const JumpDecomposition& dec = model.dec();
    for (int j = 0; j < 3; ++j) {
        const double mu_k = dec.mean_P(j + 1).value;
        std::vector<double> m = cumulative_corrected(ladder_.component_tail[j], h_);
        for (double& v : m) v = std::max(0.0, mu_k - v);
        std::vector<double> mg = convolve_trapezoid(m, g_, h_, k);
        cause_[j].resize(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) cause_[j][i] = (m[i] + mg[i]) / c;

        std::vector<double> m2 = every_other(ladder_.component_tail[j]);
        m2 = cumulative_corrected(m2, 2 * h_);
        for (double& v : m2) v = std::max(0.0, mu_k - v);
        std::vector<double> mg2 = convolve_trapezoid(m2, coarse.g, 2 * h_, k);
        cause_coarse_[j].resize(m2.size());
        for (std::size_t i = 0; i < m2.size(); ++i) cause_coarse_[j][i] = (m2[i] + mg2[i]) / c;
    }
}

void RuinLaw::check_x(double x) const {
    if (!(x >= 0.0)) throw DomainError("barrier must be nonnegative");
    if (x > model_.grid().x_max * (1.0 + 1e-12))
        throw DomainError("barrier beyond the grid (x_max = " + std::to_string(model_.grid().x_max) + ")");
}

double RuinLaw::grid_error(const std::vector<double>& fine, const std::vector<double>& coarse, double x) const {
    // halving difference up to x plus the linear interpolation error
    const std::size_t last = std::min(static_cast<std::size_t>(std::ceil(x / h_)), fine.size() - 1);
    double err = 0.0;
    for (std::size_t i = 0; i <= last; i += 2) err = std::max(err, std::abs(fine[i] - coarse[i / 2]));
    const std::size_t j = std::min(static_cast<std::size_t>(x / h_), fine.size() - 1);
    if (j >= 1 && j + 1 < fine.size()) err += std::abs(fine[j + 1] - 2 * fine[j] + fine[j - 1]) / 8.0;
    return err;
}

Estimate RuinLaw::ruin_prob(double x) const {
    check_x(x);
    const double rho = model_.rho();
    if (x == 0.0) return {rho, 0.0};
    const double v = interpolate(psi_, h_, x);
    const double err = grid_error(psi_, psi_coarse_, x) + remainder_ + ladder_.quad_error / model_.mean_sum();
    return {v, err};
}

Estimate RuinLaw::cause_prob(double x, int k) const {
    check_k(k);
    check_x(x);
    const Estimate mu_k = model_.dec().mean_P(k);
    if (x == 0.0) return {mu_k.value / model_.drift(), mu_k.error / model_.drift()};
    const auto& f = cause_[k - 1];
    const double v = interpolate(f, h_, x);
    const double err = grid_error(f, cause_coarse_[k - 1], x) + remainder_ + mu_k.error / model_.drift();
    return {v, err};
}

double RuinLaw::potential_cdf(double x) const {
    check_x(x);
    return 1.0 + interpolate(g_cum_, h_, x);
}

double RuinLaw::potential_density(double x) const {
    check_x(x);
    return interpolate(g_, h_, x);
}

QuintupleDensity RuinLaw::quintuple_space_density(double x, double u, double v, double y, int k) const {
    check_k(k);
    check_x(x);
    QuintupleDensity out;
    if (!(u > 0.0) || !(y >= 0.0) || y > x || v < y) return out;
    const double jump = model_.dec().density_P(k, u + v) / model_.drift();
    if (y < x) out.continuous = jump * interpolate(g_, h_, x - y);
    if (v >= x) out.atom = jump;
    return out;
}

double RuinLaw::undershoot_weight(double x, double v) const {
    check_x(x);
    if (v < 0.0) return 0.0;
    const double m = std::min(v, x);
    return (v >= x ? 1.0 : 0.0) + interpolate(g_cum_, h_, x) - interpolate(g_cum_, h_, x - m);
}

double RuinLaw::bin_probability(double x, int k, double u0, double u1, double v0, double v1) const {
    check_x(x);
    if (k != 0) check_k(k);
    const JumpDecomposition& dec = model_.dec();
    auto tail = [&](double z) -> double {
        if (!std::isfinite(z)) return 0.0;
        if (k == 0) return z <= 0.0 ? dec.lambda_sum() : dec.tail_sum(z).value;
        return tail_at(dec, k, z, nullptr);
    };
    u0 = std::max(u0, 0.0);
    v0 = std::max(v0, 0.0);
    if (!(u1 > u0) || !(v1 > v0)) return 0.0;
    auto integrand = [&](double v) { return undershoot_weight(x, v) * (tail(v + u0) - tail(v + u1)); };
    std::vector<double> pts{v0};
    if (x > v0 && x < v1) pts.push_back(x);
    double total = 0.0;
    if (std::isfinite(v1)) {
        pts.push_back(v1);
        total = integrate_pieces(integrand, pts, dec.quad()).value;
    } else {
        total = integrate_pieces(integrand, pts, dec.quad()).value + integrate(integrand, pts.back(), kInf, dec.quad()).value;
    }
    return total / model_.drift();
}

TripleLaw::TripleLaw(const RiskModel& model, double x, const kernels::KernelSet& k) : model_(model), x_(x) {
    if (!model.pure_cpp()) throw ValidationError("triple law needs the pure compound Poisson model (c = 0)");
    model.require_finite_intensity();
    if (!(x >= 0.0)) throw DomainError("barrier must be nonnegative");
    const JumpDecomposition& dec = model.dec();
    lambda_ = dec.lambda_sum();
    fn_at_x_.push_back(1.0);
    if (x == 0.0) return;

    const std::size_t m = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(x / model.grid().step())));
    h_ = x / static_cast<double>(m);
    jump_density_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double z = i == 0 ? 1e-9 * h_ : h_ * static_cast<double>(i);
        jump_density_[i] = dec.density_sum(z) / lambda_;
    }
    GridConvolver conv(jump_density_, h_, k);
    renewal_.assign(m + 1, 0.0);
    std::vector<double> fn = jump_density_;
    const double tol = model.grid().series_tol;
    for (;;) {
        const double mass = cumulative_trapezoid(fn, h_).back();
        fn_at_x_.push_back(std::clamp(mass, 0.0, 1.0));
        k.axpy(1.0, fn.data(), renewal_.data(), fn.size());
        fn_density_.push_back(fn);
        if (mass < tol || fn_at_x_.size() > 100000) break;
        fn = conv.apply(fn);
    }
    // int_0^w Fbar(s) r(x - s) ds on the grid
    std::vector<double> integrand(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double w = h_ * static_cast<double>(i);
        const double fbar = w == 0.0 ? 1.0 : dec.tail_sum(w).value / lambda_;
        integrand[i] = fbar * renewal_[m - i];
    }
    renewal_cum_ = cumulative_trapezoid(integrand, h_);
}

Estimate TripleLaw::cause_prob(int k) const {
    check_k(k);
    const JumpDecomposition& dec = model_.dec();
    if (x_ == 0.0) return {dec.lambda_P(k) / lambda_, 0.0};
    const std::size_t m = renewal_.size() - 1;
    double err = 0.0;
    std::vector<double> t(m + 1);
    for (std::size_t i = 0; i <= m; ++i) t[i] = tail_at(dec, k, h_ * static_cast<double>(i), &err);
    auto value = [&](std::size_t stride) {
        double s = 0.0;
        for (std::size_t i = 0; i <= m; i += stride) {
            const double w = (i == 0 || i == m) ? 0.5 : 1.0;
            s += w * t[i] * renewal_[m - i];
        }
        return (t[m] + s * h_ * static_cast<double>(stride)) / lambda_;
    };
    const double fine = value(1);
    const double grid_err = m % 2 == 0 ? std::abs(fine - value(2)) : 0.0;
    return {fine, grid_err + err / lambda_ * (1.0 + renewal_cum_.back()) + fn_at_x_.back()};
}

double TripleLaw::time_density(double s) const {
    if (s < 0.0) return 0.0;
    const double ls = lambda_ * s;
    double out = 0.0;
    for (std::size_t n = 0; n < fn_at_x_.size(); ++n) {
        const double next = n + 1 < fn_at_x_.size() ? fn_at_x_[n + 1] : 0.0;
        const double d = fn_at_x_[n] - next;
        if (d <= 0.0) continue;
        const double logp = static_cast<double>(n) * std::log(ls) - ls - std::lgamma(static_cast<double>(n) + 1.0);
        out += d * std::exp(n == 0 ? -ls : logp);
    }
    return lambda_ * out;
}

double TripleLaw::time_cdf(double s) const {
    if (s <= 0.0) return 0.0;
    double out = 0.0;
    for (std::size_t n = 0; n < fn_at_x_.size(); ++n) {
        const double next = n + 1 < fn_at_x_.size() ? fn_at_x_[n + 1] : 0.0;
        const double d = fn_at_x_[n] - next;
        if (d <= 0.0) continue;
        out += d * boost::math::gamma_p(static_cast<double>(n) + 1.0, lambda_ * s);
    }
    return std::min(out, 1.0);
}

double TripleLaw::undershoot_cdf(double v) const {
    if (v < 0.0) return 0.0;
    if (x_ == 0.0) return 1.0;
    if (v >= x_) return std::min(1.0, renewal_cum_.back() + model_.dec().tail_sum(x_).value / lambda_);
    return interpolate(renewal_cum_, h_, v);
}

QuintupleDensity TripleLaw::density(double s, double u, double v, int k) const {
    check_k(k);
    QuintupleDensity out;
    if (!(s > 0.0) || !(u > 0.0) || v < 0.0 || v > x_) return out;
    const JumpDecomposition& dec = model_.dec();
    const double ls = lambda_ * s;
    if (v == x_ || x_ == 0.0) out.atom = dec.density_P(k, u + x_) * std::exp(-ls);
    if (x_ > 0.0 && v < x_) {
        double sum = 0.0;
        for (std::size_t n = 1; n <= fn_density_.size(); ++n) {
            const double logp = static_cast<double>(n) * std::log(ls) - ls - std::lgamma(static_cast<double>(n) + 1.0);
            sum += std::exp(logp) * interpolate(fn_density_[n - 1], h_, x_ - v);
        }
        out.continuous = dec.density_P(k, u + v) * sum;
    }
    return out;
}

}  // namespace levyruin
