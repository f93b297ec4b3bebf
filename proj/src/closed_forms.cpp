#include <algorithm>
#include <cmath>
#include <vector>

#include "levyruin/decompose.hpp"

namespace levyruin {

namespace {

const margin::ExpoCPP* unit_expo(const MarginalTail& m) {
    auto e = std::get_if<margin::ExpoCPP>(&m.spec());
    return (e && e->lambda == 1.0) ? e : nullptr;
}

bool standard_pareto(const MarginalTail& m) {
    auto p = std::get_if<margin::ParetoCPP>(&m.spec());
    return p && p->lambda == 1.0 && p->alpha == 1.0 && p->xm == 1.0;
}

// Both margins are exp(-a x) with a common rate a; returns a or 0.
double common_expo_rate(const JumpDecomposition& d) {
    auto e1 = unit_expo(d.margin(1));
    auto e2 = unit_expo(d.margin(2));
    return (e1 && e2 && e1->rate == e2->rate) ? e1->rate : 0.0;
}

const family::Clayton* clayton_unit(const JumpDecomposition& d) {
    auto c = std::get_if<family::Clayton>(&d.copula().family());
    return (c && c->theta == 1.0 && c->eta == 1.0) ? c : nullptr;
}

const family::NonhomArchimedean* nonhom(const JumpDecomposition& d) {
    auto n = std::get_if<family::NonhomArchimedean>(&d.copula().family());
    return (n && n->eta == 1.0) ? n : nullptr;
}

double zero(const JumpDecomposition&) { return 0.0; }
double one(const JumpDecomposition&) { return 1.0; }
double two(const JumpDecomposition&) { return 2.0; }

// Clayton theta = 1, margins exp(-a z).

bool clayton_expo_applies(const JumpDecomposition& d) { return clayton_unit(d) && common_expo_rate(d) > 0.0; }

double arctan_term(double az) {
    return 0.5 * std::exp(-0.5 * az) * (std::atan(std::exp(0.5 * az)) - std::atan(std::exp(-0.5 * az)));
}

double clayton_expo_factored(const JumpDecomposition& d, double z) {
    const double az = common_expo_rate(d) * z;
    const double w = std::exp(az);
    return std::exp(-az) * (2.0 / (w + 1.0) + 1.0 / (1.0 / w + 1.0)) + arctan_term(az);
}

double clayton_expo_expanded(const JumpDecomposition& d, double z) {
    const double az = common_expo_rate(d) * z;
    const double w = std::exp(az);
    return (3.0 + 2.0 / w + w) / ((w + 1.0) * (1.0 / w + 1.0)) + arctan_term(az);
}

// Nonhomogeneous, margins exp(-a z).

bool nonhom_expo_applies(const JumpDecomposition& d) { return nonhom(d) && common_expo_rate(d) > 0.0; }

bool nonhom_expo_common_applies(const JumpDecomposition& d) { return nonhom_expo_applies(d) && nonhom(d)->zeta > 2.0; }

double nonhom_expo_single(const JumpDecomposition& d, double z) {
    const double zeta = nonhom(d)->zeta;
    const double e = std::exp(-common_expo_rate(d) * z);
    return e * (e + zeta) / (e + 1.0 + zeta);
}

double nonhom_expo_common(const JumpDecomposition& d, double z) {
    const double zeta = nonhom(d)->zeta;
    const double az = common_expo_rate(d) * z;
    const double e = std::exp(-az);
    const double s = std::sqrt(zeta * zeta - 4.0 * e);
    const double denom = 4.0 * e - zeta * zeta;
    const double part1 = e * zeta * (1.0 - e) / (denom * (1.0 + zeta + e));
    // 2e + zeta - s = e (2 + 4 / (zeta + s)); the factor e enters the log as -az
    const double log_ratio =
        std::log((2.0 + zeta - s) * (2.0 * e + zeta + s) / ((2.0 + zeta + s) * (2.0 + 4.0 / (zeta + s)))) + az;
    const double part2 = e * (2.0 * e - zeta * zeta) / (denom * s) * log_ratio;
    const double outer = 1.0 / (1.0 + std::exp(az) * (1.0 + zeta));
    return part1 + part2 + outer;
}

// Nonhomogeneous, margins x^-1 on x >= 1.

bool nonhom_pareto_applies(const JumpDecomposition& d) {
    return nonhom(d) && standard_pareto(d.margin(1)) && standard_pareto(d.margin(2));
}

double nonhom_pareto_single(const JumpDecomposition& d, double z) {
    const double zeta = nonhom(d)->zeta;
    return (zeta + 1.0 / z) / (1.0 + z * (1.0 + zeta));
}

double nonhom_pareto_common(const JumpDecomposition& d, double z) {
    const double zeta = nonhom(d)->zeta;
    const double zz = z * zeta;
    const double r = std::sqrt(zz * (4.0 + zz));
    const double rational = (2.0 * z * zz + 6.0 * z - 2.0 * zz - 4.0) / ((4.0 + zz) * (-zeta + zz + z) * z);
    const double log_part =
        2.0 * (2.0 + zz) / ((4.0 + zz) * z * r) * std::log(std::abs((zz - 2.0 * zeta + r) / (zz - 2.0 * zeta - r)));
    return rational + log_part;
}

// Nonhomogeneous, general compound Poisson margins: the total tail written
// with the explicit derivative of |uv| / (|u| + |v| + zeta).

bool nonhom_total_applies(const JumpDecomposition& d) {
    return nonhom(d) && d.margin(1).finite_mass() && d.margin(2).finite_mass();
}

double nonhom_total(const JumpDecomposition& d, double z) {
    const double zeta = nonhom(d)->zeta;
    const MarginalTail& m1 = d.margin(1);
    const MarginalTail& m2 = d.margin(2);
    const double l1 = m1.mass(), l2 = m2.mass();
    const double t1 = m1.tail(z), t2 = m2.tail(z);
    double total = t1 * (1.0 - l2 / (t1 + l2 + zeta)) + t2 * (1.0 - l1 / (t2 + l1 + zeta));
    auto integrand = [&](double x) {
        if (!(x > 0.0)) return 0.0;
        const double dens = m1.density(x);
        if (dens == 0.0) return 0.0;
        const double v = x < z ? m2.tail(z - x) : l2;
        const double s = m1.tail(x) + v + zeta;
        return (v * v + zeta * v) / (s * s) * dens;
    };
    std::vector<double> pts = {0.0, z, kInf};
    for (double p : {m1.support_lower(), z - m2.support_lower(), z + m1.support_lower()})
        if (p > 0.0 && p != z) pts.push_back(p);
    std::sort(pts.begin(), pts.end() - 1);
    QuadConfig q = d.quad();
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-12;
    total += integrate_pieces(integrand, pts, q).value;
    return total;
}

// Complete dependence with identical margins: common jumps (x, x).

bool complete_identical_applies(const JumpDecomposition& d) {
    return std::holds_alternative<family::CompleteDependence>(d.copula().family()) && d.margin(1) == d.margin(2);
}

double complete_identical_common(const JumpDecomposition& d, double z) { return d.margin(1).tail(0.5 * z); }

}  // namespace

const std::vector<ClosedForm>& closed_form_catalog() {
    static const std::vector<ClosedForm> catalog = {
        {"clayton1_expo_total_factored",
         "e^{-az}(2/(e^{az}+1) + 1/(e^{-az}+1)) + e^{-az/2}/2 (atan(e^{az/2}) - atan(e^{-az/2}))", 0,
         clayton_expo_applies, zero, clayton_expo_factored},
        {"clayton1_expo_total_expanded",
         "(3 + 2e^{-az} + e^{az})/((e^{az}+1)(e^{-az}+1)) + e^{-az/2}/2 (atan(e^{az/2}) - atan(e^{-az/2}))", 0,
         clayton_expo_applies, zero, clayton_expo_expanded},
        {"nonhom_expo_single1", "e^{-az}(e^{-az}+zeta)/(e^{-az}+1+zeta)", 1, nonhom_expo_applies, zero,
         nonhom_expo_single},
        {"nonhom_expo_single2", "e^{-az}(e^{-az}+zeta)/(e^{-az}+1+zeta)", 2, nonhom_expo_applies, zero,
         nonhom_expo_single},
        {"nonhom_expo_common", "I(z) + 1/(1 + e^{az}(1+zeta)), logarithmic I(z), zeta > 2", 3,
         nonhom_expo_common_applies, zero, nonhom_expo_common},
        {"nonhom_pareto_single1", "(zeta + 1/z)/(1 + z(1+zeta)), z > 1", 1, nonhom_pareto_applies, one,
         nonhom_pareto_single},
        {"nonhom_pareto_single2", "(zeta + 1/z)/(1 + z(1+zeta)), z > 1", 2, nonhom_pareto_applies, one,
         nonhom_pareto_single},
        {"nonhom_pareto_common", "rational + log|...| with sqrt(z zeta (4 + z zeta)), z > 2", 3,
         nonhom_pareto_applies, two, nonhom_pareto_common},
        {"nonhom_total_general", "t1(1 - l2/(t1+l2+zeta)) + t2(1 - l1/(t2+l1+zeta)) + integral", 0,
         nonhom_total_applies, zero, nonhom_total, false},
        {"complete_identical_common", "tail1(z/2)", 3, complete_identical_applies, zero, complete_identical_common},
    };
    return catalog;
}

}  // namespace levyruin
