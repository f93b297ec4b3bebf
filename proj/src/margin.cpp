#include "levyruin/margin.hpp"

#include <cmath>
#include <sstream>

#include "levyruin/copula.hpp"
#include "levyruin/errors.hpp"

namespace levyruin {

namespace {
bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

void check_x(double x) {
    if (!(x > 0.0)) throw DomainError("tail integral argument must be positive");
}

template <class... Fs>
struct overload : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overload(Fs...) -> overload<Fs...>;
}  // namespace

MarginalTail MarginalTail::expo(double lambda, double rate) {
    if (!positive_finite(lambda) || !positive_finite(rate)) throw DomainError("ExpoCPP needs lambda > 0, rate > 0");
    return MarginalTail(margin::ExpoCPP{lambda, rate});
}

MarginalTail MarginalTail::pareto(double lambda, double alpha, double xm) {
    if (!positive_finite(lambda) || !positive_finite(alpha) || !positive_finite(xm))
        throw DomainError("ParetoCPP needs lambda, alpha, xm > 0");
    return MarginalTail(margin::ParetoCPP{lambda, alpha, xm});
}

MarginalTail MarginalTail::stable_like(double beta, double scale) {
    if (!(beta > 0.0 && beta < 1.0) || !positive_finite(scale))
        throw DomainError("StableLike needs beta in (0, 1), scale > 0");
    return MarginalTail(margin::StableLike{beta, scale});
}

std::string MarginalTail::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overload{
                   [&](const margin::ExpoCPP& m) { os << "expo(lambda=" << m.lambda << ",rate=" << m.rate << ")"; },
                   [&](const margin::ParetoCPP& m) {
                       os << "pareto(lambda=" << m.lambda << ",alpha=" << m.alpha << ",xm=" << m.xm << ")";
                   },
                   [&](const margin::StableLike& m) {
                       os << "stable_like(beta=" << m.beta << ",scale=" << m.scale << ")";
                   },
               },
               spec_);
    return os.str();
}

double MarginalTail::tail(double x) const {
    check_x(x);
    if (std::isinf(x)) return 0.0;
    return std::visit(overload{
                          [&](const margin::ExpoCPP& m) { return m.lambda * std::exp(-m.rate * x); },
                          [&](const margin::ParetoCPP& m) {
                              return x < m.xm ? m.lambda : m.lambda * std::pow(x / m.xm, -m.alpha);
                          },
                          [&](const margin::StableLike& m) { return m.scale * std::pow(x, -m.beta); },
                      },
                      spec_);
}

double MarginalTail::density(double x) const {
    check_x(x);
    if (std::isinf(x)) return 0.0;
    return std::visit(overload{
                          [&](const margin::ExpoCPP& m) { return m.lambda * m.rate * std::exp(-m.rate * x); },
                          [&](const margin::ParetoCPP& m) {
                              return x < m.xm ? 0.0 : m.lambda * m.alpha / m.xm * std::pow(x / m.xm, -m.alpha - 1.0);
                          },
                          [&](const margin::StableLike& m) { return m.scale * m.beta * std::pow(x, -m.beta - 1.0); },
                      },
                      spec_);
}

double MarginalTail::mass() const {
    return std::visit(overload{
                          [](const margin::ExpoCPP& m) { return m.lambda; },
                          [](const margin::ParetoCPP& m) { return m.lambda; },
                          [](const margin::StableLike&) { return kInf; },
                      },
                      spec_);
}

bool MarginalTail::finite_mass() const { return !std::holds_alternative<margin::StableLike>(spec_); }

double MarginalTail::mean() const { return integrated_tail(0.0); }

double MarginalTail::integrated_tail(double x) const {
    if (!(x >= 0.0)) throw DomainError("integrated_tail requires x >= 0");
    if (std::isinf(x)) return 0.0;
    return std::visit(overload{
                          [&](const margin::ExpoCPP& m) { return m.lambda / m.rate * std::exp(-m.rate * x); },
                          [&](const margin::ParetoCPP& m) {
                              if (m.alpha <= 1.0) return kInf;
                              const double beyond = m.lambda * m.xm / (m.alpha - 1.0);
                              if (x < m.xm) return m.lambda * (m.xm - x) + beyond;
                              return beyond * std::pow(x / m.xm, 1.0 - m.alpha);
                          },
                          [](const margin::StableLike&) { return kInf; },
                      },
                      spec_);
}

double MarginalTail::inverse_tail(double p) const {
    if (!(p > 0.0) || !(p < mass())) throw DomainError("inverse_tail requires 0 < p < mass");
    return std::visit(overload{
                          [&](const margin::ExpoCPP& m) { return std::log(m.lambda / p) / m.rate; },
                          [&](const margin::ParetoCPP& m) { return m.xm * std::pow(p / m.lambda, -1.0 / m.alpha); },
                          [&](const margin::StableLike& m) { return std::pow(p / m.scale, -1.0 / m.beta); },
                      },
                      spec_);
}

double MarginalTail::support_lower() const {
    if (auto p = std::get_if<margin::ParetoCPP>(&spec_)) return p->xm;
    return 0.0;
}

bool MarginalTail::operator==(const MarginalTail& other) const {
    if (spec_.index() != other.spec_.index()) return false;
    return std::visit(overload{
                          [&](const margin::ExpoCPP& a) {
                              auto b = std::get<margin::ExpoCPP>(other.spec_);
                              return a.lambda == b.lambda && a.rate == b.rate;
                          },
                          [&](const margin::ParetoCPP& a) {
                              auto b = std::get<margin::ParetoCPP>(other.spec_);
                              return a.lambda == b.lambda && a.alpha == b.alpha && a.xm == b.xm;
                          },
                          [&](const margin::StableLike& a) {
                              auto b = std::get<margin::StableLike>(other.spec_);
                              return a.beta == b.beta && a.scale == b.scale;
                          },
                      },
                      spec_);
}

}  // namespace levyruin
