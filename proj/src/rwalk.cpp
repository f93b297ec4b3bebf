#include "levyruin/rwalk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "levyruin/errors.hpp"
#include "levyruin/grid.hpp"

namespace levyruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double solve_increasing(const auto& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
                                               iters);
    if (iters >= 200) throw NumericError("monotone inversion did not converge");
    return 0.5 * (r.first + r.second);
}

bool is_comonotone(const DistCopula& c) { return std::holds_alternative<distcop::Comonotone>(c.family()); }

// x + F2^{-1}(F1(x)) is increasing; the class regions of a comonotone pair are
// intervals of xi1.
struct ComonotoneSum {
    const Distribution1D& f1;
    const Distribution1D& f2;

    double partner(double x) const {
        const double p = f1.cdf(x);
        if (p <= 0.0) return f2.quantile(std::numeric_limits<double>::min());
        if (p >= 1.0) return f2.quantile(1.0 - 1e-16);
        return f2.quantile(p);
    }
    double sum(double x) const { return x + partner(x); }
    // xi1 level where the partner changes sign
    double switch_point() const { return f1.quantile(f2.cdf(0.0)); }

    // P(lo < xi1 < hi, sum(xi1) <= z) for lo < hi with sum(lo), sum(hi) the endpoint values
    double mass_below(double lo, double hi, double sum_lo, double sum_hi, double z) const {
        if (!(hi > lo) || z <= sum_lo) return 0.0;
        if (z >= sum_hi) return f1.cdf(hi) - f1.cdf(lo);
        double a = lo, b = hi;
        if (!std::isfinite(b)) {
            b = std::max(1.0, std::abs(z)) + (std::isfinite(a) ? a : 0.0);
            while (sum(b) < z) b = 2 * b + 1;
        }
        if (!std::isfinite(a)) {
            a = std::min(-1.0, -std::abs(z)) + std::min(b, 0.0);
            while (sum(a) > z) a = 2 * a - 1;
        }
        const double xs = solve_increasing([&](double x) { return sum(x) - z; }, a, b);
        return std::max(0.0, f1.cdf(xs) - f1.cdf(lo));
    }
};

}  // namespace

Distribution1D::Distribution1D(Spec s, double atom) : spec_(s), atom_(atom) {
    if (!(atom >= 0.0) || !(atom < 1.0)) throw DomainError("zero atom must lie in [0, 1)");
}

Distribution1D Distribution1D::expo(double rate, double zero_atom) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
    return Distribution1D(dist::Expo{rate}, zero_atom);
}

Distribution1D Distribution1D::normal(double mean, double sd, double zero_atom) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) throw DomainError("normal needs finite mean, sd > 0");
    return Distribution1D(dist::Normal{mean, sd}, zero_atom);
}

std::string Distribution1D::name() const {
    std::string base = std::visit(overloaded{[](const dist::Expo& e) { return "expo(rate=" + std::to_string(e.rate) + ")"; },
                                             [](const dist::Normal& n) {
                                                 return "normal(mean=" + std::to_string(n.mean) +
                                                        ",sd=" + std::to_string(n.sd) + ")";
                                             }},
                                  spec_);
    if (atom_ > 0.0) base += "+atom0(" + std::to_string(atom_) + ")";
    return base;
}

bool Distribution1D::positive_support() const noexcept { return std::holds_alternative<dist::Expo>(spec_); }

double Distribution1D::cont_cdf(double x) const {
    return std::visit(overloaded{[&](const dist::Expo& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
                                 [&](const dist::Normal& n) {
                                     if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
                                     return 0.5 * std::erfc(-(x - n.mean) / (n.sd * std::sqrt(2.0)));
                                 }},
                      spec_);
}

double Distribution1D::cont_quantile(double p) const {
    return std::visit(overloaded{[&](const dist::Expo& e) { return -std::log1p(-p) / e.rate; },
                                 [&](const dist::Normal& n) {
                                     if (p <= 0.0) return -kInf;
                                     if (p >= 1.0) return kInf;
                                     return boost::math::quantile(boost::math::normal(n.mean, n.sd), p);
                                 }},
                      spec_);
}

double Distribution1D::cdf(double x) const {
    if (std::isnan(x)) throw DomainError("cdf at NaN");
    return (1.0 - atom_) * cont_cdf(x) + (x >= 0.0 ? atom_ : 0.0);
}

double Distribution1D::pdf(double x) const {
    const double d = std::visit(overloaded{[&](const dist::Expo& e) { return x < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
                                           [&](const dist::Normal& n) {
                                               const double s = (x - n.mean) / n.sd;
                                               return std::exp(-0.5 * s * s) / (n.sd * std::sqrt(2.0 * M_PI));
                                           }},
                                spec_);
    return (1.0 - atom_) * d;
}

double Distribution1D::quantile(double p) const {
    if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("quantile level outside [0, 1]");
    if (atom_ == 0.0) return cont_quantile(p);
    const double below = (1.0 - atom_) * cont_cdf(0.0);
    if (p <= below) return cont_quantile(p / (1.0 - atom_));
    if (p <= below + atom_) return 0.0;
    return cont_quantile(std::min(1.0, (p - atom_) / (1.0 - atom_)));
}

void Distribution1D::require_continuous() const {
    if (atom_ > 0.0) throw ValidationError("analytic increment laws need margins without an atom at zero");
}

DistCopula DistCopula::independence() { return DistCopula(distcop::Independence{}); }
DistCopula DistCopula::comonotone() { return DistCopula(distcop::Comonotone{}); }
DistCopula DistCopula::clayton(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("Clayton copula needs theta > 0");
    return DistCopula(distcop::Clayton{theta});
}

std::string DistCopula::name() const {
    return std::visit(overloaded{[](const distcop::Independence&) { return std::string("independence"); },
                                 [](const distcop::Comonotone&) { return std::string("comonotone"); },
                                 [](const distcop::Clayton& c) { return "clayton(theta=" + std::to_string(c.theta) + ")"; }},
                      family_);
}

bool DistCopula::is_smooth() const noexcept { return !is_comonotone(*this); }

namespace {
void check_unit(double u, double v) {
    if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0)) throw DomainError("copula arguments must lie in [0, 1]");
}
}  // namespace

double DistCopula::eval(double u, double v) const {
    check_unit(u, v);
    return std::visit(overloaded{[&](const distcop::Independence&) { return u * v; },
                                 [&](const distcop::Comonotone&) { return std::min(u, v); },
                                 [&](const distcop::Clayton& c) {
                                     if (u == 0.0 || v == 0.0) return 0.0;
                                     return std::pow(std::pow(u, -c.theta) + std::pow(v, -c.theta) - 1.0, -1.0 / c.theta);
                                 }},
                      family_);
}

double DistCopula::partial_u(double u, double v) const {
    check_unit(u, v);
    return std::visit(overloaded{[&](const distcop::Independence&) { return v; },
                                 [&](const distcop::Comonotone&) { return u < v ? 1.0 : 0.0; },
                                 [&](const distcop::Clayton& c) {
                                     if (v == 0.0) return 0.0;
                                     if (u == 0.0) return 1.0;
                                     // (C / u)^{1 + theta}
                                     const double r = 1.0 + std::expm1(-c.theta * std::log(v)) * std::pow(u, c.theta);
                                     return std::pow(r, -(1.0 + c.theta) / c.theta);
                                 }},
                      family_);
}

double DistCopula::partial_u_swapped(double u, double v) const { return partial_u(v, u); }

double DistCopula::density(double u, double v) const {
    check_unit(u, v);
    return std::visit(overloaded{[&](const distcop::Independence&) { return 1.0; },
                                 [&](const distcop::Comonotone&) -> double {
                                     throw UnsupportedFamily("comonotone copula has no density");
                                 },
                                 [&](const distcop::Clayton& c) {
                                     if (u == 0.0 || v == 0.0) return 0.0;
                                     const double t = c.theta;
                                     const double s = std::pow(u, -t) + std::pow(v, -t) - 1.0;
                                     return (1.0 + t) * std::pow(u * v, -t - 1.0) * std::pow(s, -1.0 / t - 2.0);
                                 }},
                      family_);
}

double DistCopula::survival(double u, double v) const { return u + v - 1.0 + eval(1.0 - u, 1.0 - v); }

double DistCopula::conditional_v(double u, double w) const {
    check_unit(u, w);
    return std::visit(overloaded{[&](const distcop::Independence&) { return w; },
                                 [&](const distcop::Comonotone&) { return u; },
                                 [&](const distcop::Clayton& c) {
                                     if (u == 0.0 || w == 0.0) return w == 0.0 ? 0.0 : 1.0;
                                     const double t = c.theta;
                                     const double a = std::expm1(-t / (1.0 + t) * std::log(w));
                                     return std::pow(1.0 + a * std::pow(u, -t), -1.0 / t);
                                 }},
                      family_);
}

double increment_class_mass(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, int k) {
    const double a = f1.cdf(0.0), b = f2.cdf(0.0), ab = c.eval(a, b);
    switch (k) {
        case 3: return std::max(0.0, 1.0 - a - b + ab);
        case 4: return std::max(0.0, b - ab);
        case 5: return std::max(0.0, a - ab);
        case 6: return ab;
        default: throw DomainError("increment class must be 3, 4, 5 or 6");
    }
}

double increment_class_cdf(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, int k, double z,
                           const QuadConfig& q) {
    if (k < 3 || k > 5) throw DomainError("increment class must be 3, 4 or 5");
    if (std::isnan(z)) throw DomainError("increment d.f. at NaN");
    f1.require_continuous();
    f2.require_continuous();
    if (increment_class_mass(c, f1, f2, k) == 0.0) return 0.0;
    if (z == kInf) return increment_class_mass(c, f1, f2, k);

    if (is_comonotone(c)) {
        ComonotoneSum s{f1, f2};
        const double b = s.switch_point();
        if (k == 3) {
            const double lo = std::max(0.0, b);
            const double sum_lo = lo + std::max(0.0, s.partner(lo));
            return s.mass_below(lo, kInf, sum_lo, kInf, z);
        }
        if (k == 4) return s.mass_below(0.0, b, s.partner(0.0), b, z);
        return s.mass_below(b, 0.0, b, s.partner(0.0), z);
    }

    const double F2_0 = f2.cdf(0.0), F1_0 = f1.cdf(0.0);
    if (k == 3) {
        if (z <= 0.0) return 0.0;
        auto g = [&](double x) {
            const double u = f1.cdf(x);
            return std::max(0.0, c.partial_u(u, f2.cdf(z - x)) - c.partial_u(u, F2_0)) * f1.pdf(x);
        };
        return integrate(g, 0.0, z, q).value;
    }
    if (k == 5) {
        auto g = [&](double x) {
            const double u = f1.cdf(x);
            return std::max(0.0, c.partial_u(u, f2.cdf(z - x)) - c.partial_u(u, F2_0)) * f1.pdf(x);
        };
        const double hi = std::min(0.0, z);
        return integrate(g, -kInf, hi, q).value;
    }
    auto g = [&](double y) {
        const double v = f2.cdf(y);
        return std::max(0.0, c.partial_v(f1.cdf(z - y), v) - c.partial_v(F1_0, v)) * f2.pdf(y);
    };
    return integrate(g, -kInf, std::min(0.0, z), q).value;
}

double increment_class3_density(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, double z,
                                const QuadConfig& q) {
    f1.require_continuous();
    f2.require_continuous();
    if (!(z > 0.0)) return 0.0;
    if (is_comonotone(c)) {
        ComonotoneSum s{f1, f2};
        const double lo = std::max(0.0, s.switch_point());
        if (s.sum(lo) >= z) return 0.0;
        double hi = z;
        const double xs = solve_increasing([&](double x) { return s.sum(x) - z; }, lo, hi);
        const double g = s.partner(xs);
        const double slope = 1.0 + f1.pdf(xs) / f2.pdf(g);
        return f1.pdf(xs) / slope;
    }
    auto g = [&](double x) { return c.density(f1.cdf(x), f2.cdf(z - x)) * f1.pdf(x) * f2.pdf(z - x); };
    return integrate(g, 0.0, z, q).value;
}

double sum_tail_survival(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, double z,
                         const QuadConfig& q) {
    f1.require_continuous();
    f2.require_continuous();
    if (is_comonotone(c)) {
        ComonotoneSum s{f1, f2};
        return 1.0 - s.mass_below(-kInf, kInf, -kInf, kInf, z);
    }
    auto bar = [](const Distribution1D& f, double x) { return 1.0 - f.cdf(x); };
    auto g = [&](double x) {
        const double y = f2.positive_support() ? std::max(z - x, 0.0) : z - x;
        return c.survival_partial_u(bar(f1, x), bar(f2, y)) * f1.pdf(x);
    };
    const double lo = f1.positive_support() ? 0.0 : -kInf;
    if (z > lo) return integrate(g, lo, z, q).value + integrate(g, z, kInf, q).value;
    return integrate(g, lo, kInf, q).value;
}

IncrementDF increment_class_df(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, int k,
                               const GridConfig& grid, const QuadConfig& q) {
    IncrementDF out;
    out.k = k;
    out.h = grid.step();
    out.cdf.resize(grid.intervals + 1);
    for (std::size_t i = 0; i <= grid.intervals; ++i)
        out.cdf[i] = increment_class_cdf(c, f1, f2, k, out.h * static_cast<double>(i), q);
    out.mass = increment_class_mass(c, f1, f2, k);
    out.error = std::max(q.abs_tol, q.rel_tol * out.mass);
    return out;
}

RwQuintupleLaw::RwQuintupleLaw(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, double x,
                               const GridConfig& grid, const kernels::KernelSet& k)
    : c_(c), f1_(f1), f2_(f2), x_(x), h_(0.0) {
    if (!f1.positive_support() || !f2.positive_support())
        throw ValidationError("random-walk quintuple law needs positive-support margins");
    f1.require_continuous();
    f2.require_continuous();
    if (!(x >= 0.0)) throw DomainError("barrier must be nonnegative");
    fj_at_x_.push_back(1.0);
    if (x == 0.0) return;
    nx_ = std::max<std::size_t>({2, grid.intervals / 4, static_cast<std::size_t>(std::ceil(x / grid.step()))});
    h_ = x / static_cast<double>(nx_);
    cdf_.resize(nx_ + 1);
    dens_.resize(nx_ + 1);
    for (std::size_t i = 0; i <= nx_; ++i) {
        const double z = h_ * static_cast<double>(i);
        cdf_[i] = increment_class_cdf(c, f1, f2, 3, z);
        dens_[i] = increment_class3_density(c, f1, f2, z == 0.0 ? 1e-12 * h_ : z);
    }
    GridConvolver conv(dens_, h_, k);
    std::vector<double> fj = dens_;
    for (std::size_t j = 1;; ++j) {
        const double at_x = j == 1 ? cdf_.back() : cumulative_corrected(fj, h_).back();
        fj_at_x_.push_back(std::clamp(at_x, 0.0, 1.0));
        fj_.push_back(fj);
        if (at_x < grid.series_tol || j > 100000) break;
        fj = conv.apply(fj);
    }
}

double RwQuintupleLaw::cdf_at(double z) const { return increment_class_cdf(c_, f1_, f2_, 3, z); }

double RwQuintupleLaw::index_prob(std::size_t j) const { return index_undershoot_cdf(j, kInf); }

double RwQuintupleLaw::index_undershoot_cdf(std::size_t j, double v) const {
    if (v < 0.0) return 0.0;
    if (j == 0) return v >= x_ ? 1.0 - (x_ == 0.0 ? 0.0 : cdf_.back()) : 0.0;
    if (x_ == 0.0 || j > fj_.size()) return 0.0;
    const auto& f = fj_[j - 1];
    // int_0^{min(v, x)} (1 - F(y)) f_j(x - y) dy
    std::vector<double> g(nx_ + 1);
    for (std::size_t i = 0; i <= nx_; ++i) g[i] = (1.0 - cdf_[i]) * f[nx_ - i];
    const std::vector<double> cum = cumulative_corrected(g, h_);
    return interpolate(cum, h_, std::min(v, x_));
}

double RwQuintupleLaw::undershoot_cdf(double v) const {
    double s = 0.0;
    for (std::size_t j = 0; j <= fj_.size(); ++j) s += index_undershoot_cdf(j, v);
    return s;
}

double RwQuintupleLaw::overshoot_cdf(double u) const {
    if (!(u > 0.0)) return 0.0;
    if (x_ == 0.0) return cdf_at(u);
    double out = cdf_at(x_ + u) - cdf_.back();
    std::vector<double> renewal(nx_ + 1, 0.0);
    for (const auto& f : fj_)
        for (std::size_t i = 0; i <= nx_; ++i) renewal[i] += f[i];
    std::vector<double> g(nx_ + 1);
    for (std::size_t i = 0; i <= nx_; ++i) {
        const double y = h_ * static_cast<double>(i);
        g[i] = (cdf_at(u + y) - cdf_[i]) * renewal[nx_ - i];
    }
    out += cumulative_corrected(g, h_).back();
    return out;
}

QuintupleDensity RwQuintupleLaw::density(std::size_t i, std::size_t j, double u, double v, double y) const {
    QuintupleDensity out;
    if (i != 0 || !(u > 0.0) || v != y || y < 0.0 || y > x_) return out;
    if (j == 0) {
        if (y == x_) out.atom = increment_class3_density(c_, f1_, f2_, u + x_);
        return out;
    }
    if (j > fj_.size() || x_ == 0.0) return out;
    out.continuous = increment_class3_density(c_, f1_, f2_, u + y) * interpolate(fj_[j - 1], h_, x_ - y);
    return out;
}

}  // namespace levyruin
