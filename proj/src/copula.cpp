#include "levyruin/copula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "levyruin/errors.hpp"

namespace levyruin {

namespace {

void check_arg(double u, double v) {
    if (std::isnan(u) || std::isnan(v)) throw DomainError("copula argument is NaN");
    if (u == -kInf || v == -kInf) throw DomainError("copula argument is -inf");
}

bool same_sign(double u, double v) { return (u >= 0.0 && v >= 0.0) || (u <= 0.0 && v <= 0.0); }

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Positive-quadrant kernels K(a, b), a, b >= 0, possibly infinite.

double clayton_k(double a, double b, double theta) {
    if (a == 0.0 || b == 0.0) return 0.0;
    if (std::isinf(a)) return b;
    if (std::isinf(b)) return a;
    const double m = std::min(a, b);
    const double mx = std::max(a, b);
    const double r = std::pow(m / mx, theta);
    return m * std::pow(1.0 + r, -1.0 / theta);
}

double clayton_d1(double a, double b, double theta) {
    if (std::isinf(b)) return 1.0;
    if (b == 0.0 || std::isinf(a)) return 0.0;
    if (a == 0.0) return 1.0;
    const double r = std::exp(theta * (std::log(a) - std::log(b)));
    return std::pow(1.0 + r, -1.0 - 1.0 / theta);
}

double clayton_d12(double a, double b, double theta) {
    if (a == 0.0 || b == 0.0 || std::isinf(a) || std::isinf(b)) return 0.0;
    const double m = std::min(a, b);
    const double mx = std::max(a, b);
    const double r = std::pow(m / mx, theta);
    return (1.0 + theta) * r / mx * std::pow(1.0 + r, -1.0 / theta - 2.0);
}

double nonhom_k(double a, double b, double zeta) {
    if (a == 0.0 || b == 0.0) return 0.0;
    if (std::isinf(a)) return b;
    if (std::isinf(b)) return a;
    return a * b / (a + b + zeta);
}

double nonhom_d1(double a, double b, double zeta) {
    if (std::isinf(b)) return 1.0;
    if (b == 0.0 || std::isinf(a)) return 0.0;
    const double s = a + b + zeta;
    return (b / s) * ((b + zeta) / s);
}

double nonhom_d12(double a, double b, double zeta) {
    if (std::isinf(a) || std::isinf(b)) return 0.0;
    const double s = a + b + zeta;
    return (2.0 * a * b + zeta * (a + b) + zeta * zeta) / (s * s * s);
}

// Sign weight of the quadrant containing (u, v) for the eta-families.
double quadrant_weight(double eta, double u, double v) { return same_sign(u, v) ? eta : -(1.0 - eta); }

template <class F>
double bracket_solve(F f, double lo, double hi, const char* what) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw NumericError(std::string(what) + ": root not bracketed");
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                               boost::math::tools::eps_tolerance<double>(50), iters);
    if (iters >= 200) throw NumericError(std::string(what) + ": root finding did not converge");
    return 0.5 * (r.first + r.second);
}

}  // namespace

LevyCopula LevyCopula::independence() { return LevyCopula(family::Independence{}); }

LevyCopula LevyCopula::complete_dependence() { return LevyCopula(family::CompleteDependence{}); }

LevyCopula LevyCopula::clayton(double theta, double eta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("Clayton theta must be a positive real");
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("Clayton eta must lie in [0, 1]");
    return LevyCopula(family::Clayton{eta, theta});
}

LevyCopula LevyCopula::nonhom_archimedean(double zeta, double eta) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) throw DomainError("nonhomogeneous zeta must be a positive real");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("nonhomogeneous eta must lie in (0, 1]");
    return LevyCopula(family::NonhomArchimedean{eta, zeta});
}

std::string LevyCopula::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Independence>) os << "independence";
            else if constexpr (std::is_same_v<T, family::CompleteDependence>) os << "complete_dependence";
            else if constexpr (std::is_same_v<T, family::Clayton>)
                os << "clayton(theta=" << f.theta << ",eta=" << f.eta << ")";
            else os << "nonhom(zeta=" << f.zeta << ",eta=" << f.eta << ")";
        },
        family_);
    return os.str();
}

bool LevyCopula::is_smooth() const noexcept {
    return std::holds_alternative<family::Clayton>(family_) ||
           std::holds_alternative<family::NonhomArchimedean>(family_);
}

double LevyCopula::eta() const noexcept {
    if (auto c = std::get_if<family::Clayton>(&family_)) return c->eta;
    if (auto n = std::get_if<family::NonhomArchimedean>(&family_)) return n->eta;
    return 1.0;
}

bool LevyCopula::has_mixed_mass() const noexcept { return is_smooth() && eta() < 1.0; }

double LevyCopula::eval(double u, double v) const {
    check_arg(u, v);
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Independence>) {
                if (std::isinf(u) && std::isinf(v)) return kInf;
                if (std::isinf(v)) return u;
                if (std::isinf(u)) return v;
                return 0.0;
            } else if constexpr (std::is_same_v<T, family::CompleteDependence>) {
                if (!same_sign(u, v)) return 0.0;
                const double m = std::min(std::abs(u), std::abs(v));
                return m == 0.0 ? 0.0 : m;
            } else if constexpr (std::is_same_v<T, family::Clayton>) {
                const double k = clayton_k(std::abs(u), std::abs(v), f.theta);
                return k == 0.0 ? 0.0 : quadrant_weight(f.eta, u, v) * k;
            } else {
                const double k = nonhom_k(std::abs(u), std::abs(v), f.zeta);
                return k == 0.0 ? 0.0 : quadrant_weight(f.eta, u, v) * k;
            }
        },
        family_);
}

Partial LevyCopula::partial_u(double u, double v) const {
    check_arg(u, v);
    if (std::isinf(u)) throw DomainError("partial_u requires finite u");
    return std::visit(
        [&](const auto& f) -> Partial {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Independence>) {
                return {std::isinf(v) ? 1.0 : 0.0, false};
            } else if constexpr (std::is_same_v<T, family::CompleteDependence>) {
                if (!same_sign(u, v)) return {0.0, false};
                const double au = std::abs(u), av = std::abs(v);
                if (au == av) return {0.0, true};
                return {au < av ? sgn(u) : 0.0, false};
            } else if constexpr (std::is_same_v<T, family::Clayton>) {
                const double d = clayton_d1(std::abs(u), std::abs(v), f.theta);
                return {d == 0.0 ? 0.0 : quadrant_weight(f.eta, u, v) * sgn(u) * d, false};
            } else {
                const double d = nonhom_d1(std::abs(u), std::abs(v), f.zeta);
                return {d == 0.0 ? 0.0 : quadrant_weight(f.eta, u, v) * sgn(u) * d, false};
            }
        },
        family_);
}

Partial LevyCopula::partial_v(double u, double v) const {
    // All four families are exchangeable.
    return partial_u(v, u);
}

double LevyCopula::excess(double u, double v) const {
    check_arg(u, v);
    if (u < 0.0 || v < 0.0) throw DomainError("excess is defined on the positive quadrant");
    if (std::isinf(u)) throw DomainError("excess requires finite u");
    if (u == 0.0) return 0.0;
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Independence>) {
                return std::isinf(v) ? 0.0 : u;
            } else if constexpr (std::is_same_v<T, family::CompleteDependence>) {
                return u > v ? u - v : 0.0;
            } else if constexpr (std::is_same_v<T, family::Clayton>) {
                if (std::isinf(v)) return (1.0 - f.eta) * u;
                if (v == 0.0) return u;
                double k_excess;
                if (u <= v) {
                    const double r = std::exp(f.theta * (std::log(u) - std::log(v)));
                    k_excess = -u * std::expm1(-std::log1p(r) / f.theta);
                } else {
                    k_excess = u - clayton_k(u, v, f.theta);
                }
                return (1.0 - f.eta) * u + f.eta * k_excess;
            } else {
                if (std::isinf(v)) return (1.0 - f.eta) * u;
                // u - uv/(u+v+zeta) = u (u + zeta)/(u + v + zeta)
                const double k_excess = u * (u + f.zeta) / (u + v + f.zeta);
                return (1.0 - f.eta) * u + f.eta * k_excess;
            }
        },
        family_);
}

double LevyCopula::density_uv(double u, double v) const {
    check_arg(u, v);
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Clayton>) {
                return quadrant_weight(f.eta, u, v) * sgn(u) * sgn(v) *
                       clayton_d12(std::abs(u), std::abs(v), f.theta);
            } else if constexpr (std::is_same_v<T, family::NonhomArchimedean>) {
                return quadrant_weight(f.eta, u, v) * sgn(u) * sgn(v) *
                       nonhom_d12(std::abs(u), std::abs(v), f.zeta);
            } else {
                throw UnsupportedFamily("density_uv: " + name() + " has no mixed second derivative");
            }
        },
        family_);
}

double LevyCopula::limit_v_to_infinity(double u) const {
    if (std::isnan(u) || u < 0.0) throw DomainError("limit_v_to_infinity requires u >= 0");
    if (std::holds_alternative<family::Independence>(family_)) return std::isinf(u) ? kInf : 0.0;
    return eta() * u;
}

double LevyCopula::limit_u_to_infinity(double v) const { return limit_v_to_infinity(v); }

double LevyCopula::partial_u_limit_v_to_infinity(double u) const {
    if (std::isnan(u) || !(u > 0.0) || std::isinf(u)) throw DomainError("requires finite u > 0");
    if (std::holds_alternative<family::Independence>(family_)) return 0.0;
    return eta();
}

double LevyCopula::partial_v_limit_u_to_infinity(double v) const { return partial_u_limit_v_to_infinity(v); }

double LevyCopula::solve_eval_for_u(double p, double v) const {
    if (!(p > 0.0) || !(v > 0.0)) throw DomainError("solve_eval_for_u requires p > 0 and v > 0");
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Independence>) {
                if (std::isinf(v)) return p;
                throw DomainError("independence copula vanishes for finite arguments");
            } else if constexpr (std::is_same_v<T, family::CompleteDependence>) {
                if (p >= v) throw DomainError("solve_eval_for_u: p outside range");
                return p;
            } else if constexpr (std::is_same_v<T, family::Clayton>) {
                if (std::isinf(v)) return p / f.eta;
                const double target = p / f.eta;
                if (target >= v) throw DomainError("solve_eval_for_u: p outside range");
                // K(t, v) = target  <=>  t = target (1 - (target/v)^theta)^(-1/theta)
                const double one_minus_r = -std::expm1(f.theta * std::log(target / v));
                return target * std::pow(one_minus_r, -1.0 / f.theta);
            } else {
                if (std::isinf(v)) return p / f.eta;
                const double target = p / f.eta;
                if (target >= v) throw DomainError("solve_eval_for_u: p outside range");
                return target * (v + f.zeta) / (v - target);
            }
        },
        family_);
}

double LevyCopula::solve_partial_u_for_v(double u, double q) const {
    if (!(u > 0.0) || std::isinf(u)) throw DomainError("solve_partial_u_for_v requires finite u > 0");
    if (!(q > 0.0 && q < eta())) throw DomainError("solve_partial_u_for_v: q outside (0, eta)");
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Clayton>) {
                const double qq = q / f.eta;
                // (1 + (u/w)^theta)^(-1-1/theta) = qq
                const double base = std::expm1(-f.theta / (1.0 + f.theta) * std::log(qq));
                return u * std::pow(base, -1.0 / f.theta);
            } else if constexpr (std::is_same_v<T, family::NonhomArchimedean>) {
                const double qq = q / f.eta;
                const double s = u + f.zeta;
                // (1 - qq) w^2 + (zeta - 2 qq s) w - qq s^2 = 0, positive root
                const double b = f.zeta - 2.0 * qq * s;
                const double disc = std::sqrt(b * b + 4.0 * (1.0 - qq) * qq * s * s);
                if (b > 0.0) return 2.0 * qq * s * s / (b + disc);
                return (disc - b) / (2.0 * (1.0 - qq));
            } else {
                throw UnsupportedFamily("solve_partial_u_for_v: " + name() + " has a degenerate conditional law");
            }
        },
        family_);
}

double LevyCopula::solve_single_for_u(double p, double v) const {
    if (!(p > 0.0) || std::isnan(v) || v < 0.0) throw DomainError("solve_single_for_u requires p > 0, v >= 0");
    if (v == 0.0) return p;
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, family::Independence>) {
                return p;
            } else if constexpr (std::is_same_v<T, family::CompleteDependence>) {
                return p + v;
            } else if constexpr (std::is_same_v<T, family::NonhomArchimedean>) {
                if (f.eta != 1.0) {
                    return bracket_solve([&](double t) { return t - f.eta * nonhom_k(t, v, f.zeta) - p; }, p,
                                         p / (1.0 - f.eta) + v, "solve_single_for_u");
                }
                // t (t + zeta) / (t + v + zeta) = p
                const double b = f.zeta - p;
                const double disc = std::sqrt(b * b + 4.0 * p * (v + f.zeta));
                if (b > 0.0) return 2.0 * p * (v + f.zeta) / (b + disc);
                return (disc - b) / 2.0;
            } else {
                const double hi = f.eta == 1.0 ? p + v : p / (1.0 - f.eta) + v;
                return bracket_solve([&](double t) { return excess(t, v) - p; }, p, hi, "solve_single_for_u");
            }
        },
        family_);
}

bool LevyCopula::operator==(const LevyCopula& other) const {
    if (family_.index() != other.family_.index()) return false;
    if (auto a = std::get_if<family::Clayton>(&family_)) {
        auto b = std::get<family::Clayton>(other.family_);
        return a->theta == b.theta && a->eta == b.eta;
    }
    if (auto a = std::get_if<family::NonhomArchimedean>(&family_)) {
        auto b = std::get<family::NonhomArchimedean>(other.family_);
        return a->zeta == b.zeta && a->eta == b.eta;
    }
    return true;
}

}  // namespace levyruin
