#include <doctest.h>

#include <cmath>
#include <random>

#include "levyruin/errors.hpp"
#include "levyruin/margin.hpp"
#include "levyruin/quadrature.hpp"

using namespace levyruin;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<MarginalTail> sample_margins() {
    return {MarginalTail::expo(1, 1), MarginalTail::expo(2.5, 0.4), MarginalTail::pareto(1, 1, 1),
            MarginalTail::pareto(2, 2.5, 0.5), MarginalTail::stable_like(0.5, 2.0)};
}
}  // namespace

TEST_CASE("tail values") {
    CHECK(MarginalTail::expo(1, 1).tail(1e-300) == doctest::Approx(1.0));
    CHECK(MarginalTail::expo(1, 1).mass() == 1.0);
    CHECK(MarginalTail::pareto(1, 1, 1).tail(2) == 0.5);
    CHECK(MarginalTail::pareto(1, 1, 1).tail(0.5) == 1.0);
    CHECK(std::isinf(MarginalTail::stable_like(0.5, 1).mass()));
    CHECK_THROWS_AS(MarginalTail::expo(1, 1).tail(0.0), DomainError);
    CHECK_THROWS_AS(MarginalTail::expo(1, 1).tail(-1.0), DomainError);
    CHECK_THROWS_AS(MarginalTail::expo(0, 1), DomainError);
    CHECK_THROWS_AS(MarginalTail::stable_like(1.2, 1), DomainError);
}

TEST_CASE("means") {
    CHECK(MarginalTail::expo(2, 1).mean() == 2.0);
    CHECK(MarginalTail::pareto(1, 2, 1).mean() == 2.0);
    CHECK(std::isinf(MarginalTail::pareto(1, 1, 1).mean()));
    CHECK(std::isinf(MarginalTail::stable_like(0.3, 1).mean()));
    QuadConfig q{1e-14, 1e-12, 2000};
    for (const auto& m : sample_margins()) {
        if (!std::isfinite(m.mean())) continue;
        auto f = [&](double x) { return m.tail(x); };
        const double lo = m.support_lower();
        double num = integrate(f, 0.0, lo, q).value + integrate(f, lo, kInf, q).value;
        CHECK(rel(m.mean(), num) < 1e-8);
        for (double x : {0.1, 1.0, 3.0}) {
            double it = integrate(f, x, std::max(x, lo), q).value + integrate(f, std::max(x, lo), kInf, q).value;
            CHECK(rel(m.integrated_tail(x), it) < 1e-8);
        }
    }
}

TEST_CASE("inverse tail") {
    CHECK(MarginalTail::expo(1, 1).inverse_tail(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(MarginalTail::pareto(1, 1, 1).inverse_tail(0.25) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(MarginalTail::expo(1, 1).inverse_tail(1.0), DomainError);
    CHECK_THROWS_AS(MarginalTail::expo(1, 1).inverse_tail(0.0), DomainError);
    for (const auto& m : sample_margins()) {
        const double top = std::isfinite(m.mass()) ? m.mass() : 1e6;
        for (double p = top * 0.999; p > 1e-12; p *= 0.37) CHECK(rel(m.tail(m.inverse_tail(p)), p) < 1e-10);
    }
}

TEST_CASE("tails are monotone and densities integrate to tail differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.01, 20.0);
    QuadConfig q{1e-14, 1e-11, 2000};
    for (const auto& m : sample_margins()) {
        for (int i = 0; i < 200; ++i) {
            double a = ux(rng), b = ux(rng);
            if (a > b) std::swap(a, b);
            CHECK(m.tail(a) >= m.tail(b));
        }
        for (auto [a, b] : {std::pair{0.2, 0.9}, {1.5, 6.0}}) {
            std::vector<double> pts = {a, b};
            if (m.support_lower() > a && m.support_lower() < b) pts = {a, m.support_lower(), b};
            const double num = integrate_pieces([&](double x) { return m.density(x); }, pts, q).value;
            CHECK(std::abs(num - (m.tail(a) - m.tail(b))) < 1e-10 * std::max(1.0, m.tail(a)));
        }
    }
}
