#include "levyruin/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "levyruin/errors.hpp"

namespace levyruin {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_component(int k) {
    if (k < 1 || k > 3) throw DomainError("component index must be 1, 2 or 3");
}

void check_z(double z) {
    if (!(z > 0.0)) throw DomainError("tail argument z must be positive");
}

bool is_independence(const LevyCopula& c) { return std::holds_alternative<family::Independence>(c.family()); }
bool is_complete(const LevyCopula& c) { return std::holds_alternative<family::CompleteDependence>(c.family()); }

const std::vector<double> kProbePoints = {0.25, 0.5, 1.0, 2.0, 2.5, 5.0, 10.0};

QuadConfig tight(const QuadConfig& base) {
    QuadConfig q = base;
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-12;
    q.max_subdivisions = std::max<std::size_t>(base.max_subdivisions, 4000);
    return q;
}

}  // namespace

JumpDecomposition::JumpDecomposition(LevyCopula copula, MarginalTail m1, MarginalTail m2, QuadConfig quad)
    : copula_(copula), m1_(m1), m2_(m2), quad_(quad) {
    const double l1 = m1_.mass(), l2 = m2_.mass();
    if (is_independence(copula_)) {
        lambda_[2] = 0.0;
        lambda_[0] = l1;
        lambda_[1] = l2;
    } else if (std::isfinite(l1) && std::isfinite(l2)) {
        lambda_[2] = copula_.eval(l1, l2);
        lambda_[0] = l1 - lambda_[2];
        lambda_[1] = l2 - lambda_[2];
    } else {
        if (std::isfinite(l1)) lambda_[2] = copula_.limit_v_to_infinity(l1);
        else if (std::isfinite(l2)) lambda_[2] = copula_.limit_u_to_infinity(l2);
        else lambda_[2] = kInf;
        auto single = [&](double own, double partner) {
            if (std::isfinite(own)) return own - lambda_[2];
            return (!std::isfinite(partner) && copula_.eta() == 1.0) ? 0.0 : kInf;
        };
        lambda_[0] = single(l1, l2);
        lambda_[1] = single(l2, l1);
    }
    for (double& l : lambda_) l = std::max(l, 0.0);

    // Means. The single-jump means are the margin means minus the first
    // moments of the common-jump marginals; the common-jump mean is their sum.
    Estimate a[2];
    for (int i = 0; i < 2; ++i) {
        try {
            a[i] = partner_limit_integral(i + 1);
        } catch (const QuadratureError&) {
            a[i] = {kInf, 0.0};
        }
    }
    const double mu[2] = {m1_.mean(), m2_.mean()};
    for (int i = 0; i < 2; ++i) {
        if (std::isfinite(mu[i])) {
            mean_[i] = {std::max(mu[i] - a[i].value, 0.0), a[i].error + 4 * kEps * mu[i]};
        } else {
            try {
                const int k = i + 1;
                auto f = [&](double z) { return tail_P(k, z, TailMethod::Quadrature).value; };
                QuadResult r = integrate_pieces(f, {0.0, margin(k).support_lower(), kInf}, quad_);
                mean_[i] = {r.value, r.abs_error};
            } catch (const QuadratureError&) {
                mean_[i] = {kInf, 0.0};
            }
        }
    }
    mean_[2] = {a[0].value + a[1].value, a[0].error + a[1].error};

    for (const ClosedForm& cf : closed_form_catalog()) {
        if (!cf.applies(*this)) continue;
        ClosedFormCheck chk = check_closed_form(cf, *this, kProbePoints);
        if (chk.passed && cf.evaluation) active_.push_back({&cf, chk.max_rel_dev});
        checks_.push_back(std::move(chk));
    }
}

const MarginalTail& JumpDecomposition::margin(int i) const {
    if (i == 1) return m1_;
    if (i == 2) return m2_;
    throw DomainError("margin index must be 1 or 2");
}

double JumpDecomposition::lambda_P(int k) const {
    check_component(k);
    return lambda_[k - 1];
}

bool JumpDecomposition::finite_intensity() const {
    return std::isfinite(lambda_[0]) && std::isfinite(lambda_[1]) && std::isfinite(lambda_[2]);
}

double JumpDecomposition::lambda_sum() const {
    if (!finite_intensity()) throw ValidationError("total jump intensity is infinite");
    return lambda_[0] + lambda_[1] + lambda_[2];
}

double JumpDecomposition::partner_limit(int i, double u) const {
    const double partner_mass = margin(3 - i).mass();
    if (u == 0.0) return 0.0;
    if (!std::isfinite(partner_mass)) return copula_.limit_v_to_infinity(u);
    return i == 1 ? copula_.eval(u, partner_mass) : copula_.eval(partner_mass, u);
}

double JumpDecomposition::single_excess(int i, double u) const {
    const double partner_mass = margin(3 - i).mass();
    if (u == 0.0) return 0.0;
    if (!std::isfinite(partner_mass)) return u - copula_.limit_v_to_infinity(u);
    return std::max(0.0, copula_.excess(u, partner_mass));
}

double JumpDecomposition::partner_limit_derivative(int i, double u) const {
    const double partner_mass = margin(3 - i).mass();
    if (!std::isfinite(partner_mass)) return copula_.partial_u_limit_v_to_infinity(u);
    return i == 1 ? copula_.partial_u(u, partner_mass).value : copula_.partial_v(partner_mass, u).value;
}

Estimate JumpDecomposition::partner_limit_integral(int i) const {
    if (is_independence(copula_)) return {};
    const MarginalTail& m = margin(i);
    std::vector<double> pts = {0.0};
    if (m.support_lower() > 0.0) pts.push_back(m.support_lower());
    const double partner_mass = margin(3 - i).mass();
    if (is_complete(copula_) && partner_mass < m.mass()) {
        const double kink = m.inverse_tail(partner_mass);
        if (kink > pts.back()) pts.push_back(kink);
    }
    pts.push_back(kInf);
    auto f = [&](double x) { return x > 0.0 ? partner_limit(i, m.tail(x)) : 0.0; };
    QuadResult r = integrate_pieces(f, pts, quad_);
    return {r.value, r.abs_error};
}

std::vector<double> JumpDecomposition::common_breakpoints(double z) const {
    // Besides the support edges, split at tail quantiles of both margins so
    // that mass concentrated near either end of (0, z) is always resolved.
    std::vector<double> pts = {0.0, z, m1_.support_lower(), z - m2_.support_lower()};
    for (double q : {1e-1, 1e-2, 1e-4, 1e-8, 1e-16}) {
        if (m1_.finite_mass()) pts.push_back(m1_.inverse_tail(q * m1_.mass()));
        if (m2_.finite_mass()) pts.push_back(z - m2_.inverse_tail(q * m2_.mass()));
    }
    std::vector<double> out;
    for (double p : pts)
        if (p >= 0.0 && p <= z) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Estimate JumpDecomposition::common_tail_quadrature(double z, const QuadConfig& cfg) const {
    // Jumps with x1 > z contribute C(tail1(z), lambda2) in closed form; the
    // remaining part integrates dC/du(tail1(x), tail2(z - x)) Pi1(dx) over (0, z).
    auto f = [&](double x) {
        if (!(x > 0.0) || !(x < z)) return 0.0;
        const double d1 = m1_.density(x);
        if (d1 == 0.0) return 0.0;
        return copula_.partial_u(m1_.tail(x), m2_.tail(z - x)).value * d1;
    };
    QuadResult r = integrate_pieces(f, common_breakpoints(z), cfg);
    const double outer = partner_limit(1, m1_.tail(z));
    return {r.value + outer, r.abs_error + 4 * kEps * outer};
}

namespace {

// Inverse of the tail on (0, mass), extended by continuity to the lower end
// of the support at u = mass.
double inverse_or_floor(const MarginalTail& m, double u) {
    if (u >= m.mass()) return m.support_lower();
    return m.inverse_tail(u);
}

}  // namespace

Estimate JumpDecomposition::common_tail_complete_dependence(double z) const {
    // Common jumps are (T1(u), T2(u)) for levels u in (0, m); the sum exceeds
    // z exactly for u below the root of T1(u) + T2(u) = z.
    const double m = std::min(m1_.mass(), m2_.mass());
    auto h = [&](double u) { return inverse_or_floor(m1_, u) + inverse_or_floor(m2_, u) - z; };
    if (std::isfinite(m) && h(m) >= 0.0) return {m, 0.0};
    double lo, hi;
    if (std::isfinite(m)) {
        hi = m;
        lo = 0.5 * m;
        while (h(lo) < 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < std::numeric_limits<double>::min()) return {0.0, 0.0};
        }
    } else {
        lo = 1.0;
        while (h(lo) < 0.0) lo *= 0.5;
        hi = 2.0 * lo;
        while (h(hi) >= 0.0) {
            lo = hi;
            hi *= 2.0;
        }
    }
    std::uintmax_t iters = 300;
    auto r = boost::math::tools::toms748_solve([&](double u) { return h(u); }, lo, hi,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    const double u = 0.5 * (r.first + r.second);
    return {u, std::abs(r.second - r.first) + 4 * kEps * u};
}

double JumpDecomposition::common_density_complete_dependence(double z) const {
    const double m = std::min(m1_.mass(), m2_.mass());
    const double u = common_tail_complete_dependence(z).value;
    if (std::isfinite(m) && u >= m) return 0.0;
    const double d1 = m1_.density(m1_.inverse_tail(u));
    const double d2 = m2_.density(m2_.inverse_tail(u));
    if (d1 == 0.0 || d2 == 0.0) return 0.0;
    return d1 * d2 / (d1 + d2);
}

Estimate JumpDecomposition::tail_by_quadrature(int component, double z, const QuadConfig& cfg) const {
    check_z(z);
    if (component == 0) {
        Estimate s;
        for (int k = 1; k <= 3; ++k) {
            Estimate e = tail_by_quadrature(k, z, cfg);
            s.value += e.value;
            s.error += e.error;
        }
        return s;
    }
    check_component(component);
    if (component < 3) {
        const double t = margin(component).tail(z);
        return {single_excess(component, t), 8 * kEps * t};
    }
    if (is_independence(copula_)) return {};
    if (is_complete(copula_)) return common_tail_complete_dependence(z);
    return common_tail_quadrature(z, cfg);
}

Estimate JumpDecomposition::closed_form_value(int component, double z) const {
    // Unchecked evaluation of the first matching catalog entry, used to
    // inspect forms regardless of their validation status.
    for (const ClosedForm& c : closed_form_catalog()) {
        if (c.component != component || !c.applies(*this)) continue;
        if (!(z > c.domain_min(*this))) throw DomainError("z outside the closed form's domain");
        const double v = c.eval(*this, z);
        return {v, 64 * kEps * std::abs(v)};
    }
    throw UnsupportedFamily("no closed form for this component and model");
}

const JumpDecomposition::ActiveForm* JumpDecomposition::active_form(int component) const {
    for (const auto& a : active_)
        if (a.form->component == component) return &a;
    return nullptr;
}

Estimate JumpDecomposition::tail_P(int k, double z, TailMethod method) const {
    check_component(k);
    check_z(z);
    if (method == TailMethod::ClosedForm) return closed_form_value(k, z);
    if (method == TailMethod::Auto) {
        if (const ActiveForm* a = active_form(k); a && z > a->form->domain_min(*this)) {
            const double v = a->form->eval(*this, z);
            return {v, std::max(64 * kEps, a->checked_dev) * std::abs(v)};
        }
    }
    return tail_by_quadrature(k, z, quad_);
}

Estimate JumpDecomposition::tail_sum(double z, TailMethod method) const {
    check_z(z);
    if (method == TailMethod::ClosedForm) return closed_form_value(0, z);
    if (method == TailMethod::Auto) {
        if (const ActiveForm* a = active_form(0); a && z > a->form->domain_min(*this)) {
            const double v = a->form->eval(*this, z);
            return {v, std::max(64 * kEps, a->checked_dev) * std::abs(v)};
        }
    }
    Estimate s;
    for (int k = 1; k <= 3; ++k) {
        Estimate e = tail_P(k, z, method);
        s.value += e.value;
        s.error += e.error;
    }
    return s;
}

double JumpDecomposition::density_P(int k, double z) const {
    check_component(k);
    check_z(z);
    if (k < 3) {
        const MarginalTail& m = margin(k);
        const double d = m.density(z);
        if (d == 0.0) return 0.0;
        return d * std::max(0.0, 1.0 - partner_limit_derivative(k, m.tail(z)));
    }
    if (is_independence(copula_)) return 0.0;
    if (is_complete(copula_)) return common_density_complete_dependence(z);
    auto f = [&](double x) {
        if (!(x > 0.0) || !(x < z)) return 0.0;
        const double d1 = m1_.density(x);
        if (d1 == 0.0) return 0.0;
        const double d2 = m2_.density(z - x);
        if (d2 == 0.0) return 0.0;
        return copula_.density_uv(m1_.tail(x), m2_.tail(z - x)) * d1 * d2;
    };
    return integrate_pieces(f, common_breakpoints(z), quad_).value;
}

double JumpDecomposition::density_sum(double z) const {
    return density_P(1, z) + density_P(2, z) + density_P(3, z);
}

Estimate JumpDecomposition::mean_P(int k) const {
    check_component(k);
    return mean_[k - 1];
}

double JumpDecomposition::mean_sum() const { return m1_.mean() + m2_.mean(); }

std::vector<std::string> JumpDecomposition::active_closed_forms() const {
    std::vector<std::string> names;
    for (const auto& a : active_) names.push_back(a.form->name);
    return names;
}

ClosedFormCheck check_closed_form(const ClosedForm& cf, const JumpDecomposition& dec, const std::vector<double>& zs,
                                  double rel_tol) {
    ClosedFormCheck chk;
    chk.name = cf.name;
    const double lo = cf.domain_min(dec);
    const QuadConfig q = tight(dec.quad());
    for (double z : zs) {
        if (!(z > lo)) continue;
        const double c = cf.eval(dec, z);
        const double r = dec.tail_by_quadrature(cf.component, z, q).value;
        chk.z.push_back(z);
        chk.closed.push_back(c);
        chk.quadrature.push_back(r);
        const double dev = r == 0.0 ? std::abs(c) : std::abs(c - r) / std::abs(r);
        chk.max_rel_dev = std::max(chk.max_rel_dev, std::isnan(dev) ? kInf : dev);
    }
    chk.passed = !chk.z.empty() && chk.max_rel_dev < rel_tol;
    return chk;
}

Estimate tail_P45(const MarginalTail& m1_pos, const std::optional<MarginalTail>& m1_neg, const MarginalTail& m2_pos,
                  const std::optional<MarginalTail>& m2_neg, const LevyCopula& copula, int k, double z,
                  const QuadConfig& quad) {
    if (k != 4 && k != 5) throw DomainError("tail_P45 expects k = 4 or 5");
    check_z(z);
    if (!copula.is_smooth()) throw UnsupportedFamily("tail_P45 needs a twice differentiable Levy copula");
    // k = 4: positive jump of S1 with negative jump of S2; k = 5 mirrors it.
    const MarginalTail& up = k == 4 ? m1_pos : m2_pos;
    const std::optional<MarginalTail>& down = k == 4 ? m2_neg : m1_neg;
    if (!down || copula.eta() == 1.0) return {};
    for (const MarginalTail* m : {&m1_pos, &m2_pos, m1_neg ? &*m1_neg : nullptr, m2_neg ? &*m2_neg : nullptr})
        if (m && !m->finite_mass()) throw ValidationError("tail_P45 requires compound Poisson margins");
    const double down_mass = down->mass();
    // Partial in the coordinate of the positive side, evaluated with the
    // negative partner at the signed tail value -tail_neg.
    auto partial = [&](double u, double w) {
        return k == 4 ? copula.partial_u(u, -w).value : copula.partial_v(-w, u).value;
    };
    auto f = [&](double x) {
        if (!(x > z)) return 0.0;
        const double d = up.density(x);
        if (d == 0.0) return 0.0;
        const double u = up.tail(x);
        return (partial(u, down->tail(x - z)) - partial(u, down_mass)) * d;
    };
    std::vector<double> pts = {z};
    if (up.support_lower() > z) pts.push_back(up.support_lower());
    if (z + down->support_lower() > pts.back()) pts.push_back(z + down->support_lower());
    pts.push_back(kInf);
    QuadResult r = integrate_pieces(f, pts, quad);
    return {std::max(r.value, 0.0), r.abs_error};
}

}  // namespace levyruin
