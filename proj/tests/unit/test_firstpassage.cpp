#include <doctest.h>

#include <cmath>

#include "levyruin/errors.hpp"
#include "levyruin/firstpassage.hpp"

using namespace levyruin;

namespace {

RiskModel expo_model(LevyCopula c, double drift, GridConfig g = {}) {
    return RiskModel(drift, JumpDecomposition(c, MarginalTail::expo(1, 1), MarginalTail::expo(1, 1)), g);
}

double poisson_pmf(int n, double m) { return std::exp(n * std::log(m) - m - std::lgamma(n + 1.0)); }

}  // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(expo_model(LevyCopula::independence(), 2.0), ValidationError);
    CHECK_THROWS_AS(expo_model(LevyCopula::independence(), 1.5), ValidationError);
    CHECK_THROWS_AS(expo_model(LevyCopula::independence(), -1.0), ValidationError);
    CHECK_NOTHROW(expo_model(LevyCopula::independence(), 0.0));
    CHECK_THROWS_AS(RiskModel(0.0, JumpDecomposition(LevyCopula::clayton(1), MarginalTail::stable_like(0.5, 1),
                                                     MarginalTail::expo(1, 1))),
                    ValidationError);
    CHECK_THROWS_AS(RiskModel(100.0, JumpDecomposition(LevyCopula::clayton(1), MarginalTail::pareto(1, 1, 1),
                                                       MarginalTail::expo(1, 1))),
                    ValidationError);
    RiskModel cpp = expo_model(LevyCopula::independence(), 0.0);
    CHECK_THROWS_AS(RuinLaw{cpp}, ValidationError);
    CHECK_THROWS_AS(ladder_height_df(cpp), ValidationError);
    RiskModel drift = expo_model(LevyCopula::independence(), 4.0);
    CHECK_THROWS_AS(TripleLaw(drift, 1.0), ValidationError);
}

TEST_CASE("ladder height d.f.") {
    SUBCASE("independence with equal margins is Expo(1)") {
        auto l = ladder_height_df(expo_model(LevyCopula::independence(), 4.0));
        for (std::size_t i = 0; i < l.cdf.size(); i += 97) {
            const double z = l.h * i;
            CHECK(std::abs(l.density[i] - std::exp(-z)) < 1e-12);
            CHECK(std::abs(l.cdf[i] - (1 - std::exp(-z))) < 1e-8);
        }
        CHECK(std::abs(l.grid_mass - 1.0) < 1e-6);
        CHECK(l.cdf.front() == 0.0);
        for (std::size_t i = 1; i < l.cdf.size(); ++i) CHECK(l.cdf[i] >= l.cdf[i - 1]);
    }
    SUBCASE("complete dependence of identical margins is Expo(1/2)") {
        auto l = ladder_height_df(expo_model(LevyCopula::complete_dependence(), 4.0));
        for (std::size_t i = 0; i < l.cdf.size(); i += 97) {
            const double z = l.h * i;
            CHECK(std::abs(l.density[i] - 0.5 * std::exp(-z / 2)) < 1e-12);
            CHECK(std::abs(l.cdf[i] - (1 - std::exp(-z / 2))) < 1e-8);
        }
        CHECK(std::abs(l.grid_mass - 1.0) < 1e-6);
    }
    SUBCASE("single compound Poisson jump part: integrated tail d.f.") {
        // both lines independent Expo(2, 1): jumps are Expo(1) at rate 4, F_H = Expo(1)
        RiskModel m(10.0, JumpDecomposition(LevyCopula::independence(), MarginalTail::expo(2, 1), MarginalTail::expo(2, 1)));
        auto l = ladder_height_df(m);
        for (std::size_t i = 0; i < l.cdf.size(); i += 512)
            CHECK(std::abs(l.cdf[i] - (1 - std::exp(-l.h * i))) < 1e-8);
    }
    SUBCASE("Clayton total mass") {
        auto l = ladder_height_df(expo_model(LevyCopula::clayton(1.0), 4.0));
        CHECK(std::abs(l.grid_mass - 1.0) < 1e-6);
    }
}

TEST_CASE("ruin probability against Cramer-Lundberg") {
    RuinLaw ind(expo_model(LevyCopula::independence(), 4.0));
    RuinLaw cd(expo_model(LevyCopula::complete_dependence(), 4.0));
    CHECK(ind.ruin_prob(0).value == 0.5);
    CHECK(cd.ruin_prob(0).value == 0.5);
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        CAPTURE(x);
        const Estimate a = ind.ruin_prob(x);
        const Estimate b = cd.ruin_prob(x);
        const double ea = std::abs(a.value - 0.5 * std::exp(-0.5 * x));
        const double eb = std::abs(b.value - 0.5 * std::exp(-0.25 * x));
        CHECK(ea < 1e-4);
        CHECK(eb < 1e-4);
        CHECK(ea <= a.error);
        CHECK(eb <= b.error);
    }
    CHECK(ind.series_remainder() < 1e-10);
    CHECK_THROWS_AS(ind.ruin_prob(-1), DomainError);
    CHECK_THROWS_AS(ind.ruin_prob(25), DomainError);
}

TEST_CASE("ruin probability properties") {
    for (auto c : {LevyCopula::clayton(0.5), LevyCopula::clayton(5.0), LevyCopula::nonhom_archimedean(1.0)}) {
        CAPTURE(c.name());
        RuinLaw law(expo_model(c, 4.0));
        CHECK(law.ruin_prob(0).value == 0.5);
        const auto& psi = law.ruin_grid();
        for (std::size_t i = 1; i < psi.size(); ++i) CHECK(psi[i] <= psi[i - 1] + 1e-15);
        CHECK(psi.back() >= 0.0);

        double at0 = 0.0;
        for (int k = 1; k <= 3; ++k) at0 += law.cause_prob(0, k).value;
        CHECK(std::abs(at0 - 0.5) < 1e-12);
        for (double x : {0.25, 1.0, 2.0, 5.0, 12.0}) {
            double s = 0.0;
            for (int k = 1; k <= 3; ++k) s += law.cause_prob(x, k).value;
            CHECK(std::abs(s - law.ruin_prob(x).value) < 1e-6);
        }
    }
}

TEST_CASE("cause probabilities") {
    RuinLaw ind(expo_model(LevyCopula::independence(), 4.0));
    for (double x : {0.0, 1.0, 3.0}) CHECK(ind.cause_prob(x, 3).value == 0.0);
    // symmetric margins, no common jumps: each line causes half of the ruin
    for (double x : {1.0, 3.0}) CHECK(std::abs(ind.cause_prob(x, 1).value - 0.25 * std::exp(-0.5 * x)) < 1e-4);

    auto c = LevyCopula::clayton(2.0);
    RuinLaw cl(expo_model(c, 4.0));
    JumpDecomposition dec(c, MarginalTail::expo(1, 1), MarginalTail::expo(1, 1));
    for (int k = 1; k <= 3; ++k) CHECK(cl.cause_prob(0, k).value == doctest::Approx(dec.mean_P(k).value / 4.0).epsilon(1e-14));
}

TEST_CASE("grid halving changes less than four times the bound") {
    auto c = LevyCopula::clayton(1.0);
    RuinLaw fine(expo_model(c, 4.0, {20.0, 4096, 1e-10}));
    RuinLaw coarse(expo_model(c, 4.0, {20.0, 2048, 1e-10}));
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const Estimate f = fine.ruin_prob(x);
        CHECK(std::abs(f.value - coarse.ruin_prob(x).value) < 4 * f.error);
    }
}

TEST_CASE("quintuple space density") {
    RuinLaw law(expo_model(LevyCopula::independence(), 4.0));
    SUBCASE("zero barrier") {
        const QuintupleDensity d = law.quintuple_space_density(0, 1, 1, 0, 1);
        CHECK(d.continuous == 0.0);
        CHECK(d.atom == doctest::Approx(std::exp(-2.0) / 4).epsilon(1e-14));
        CHECK(law.quintuple_space_density(0, 1, 1, 0, 3).atom == 0.0);
    }
    SUBCASE("outside the support") {
        CHECK(law.quintuple_space_density(1, -1, 1, 0.5, 1).continuous == 0.0);
        CHECK(law.quintuple_space_density(1, 1, 0.2, 0.5, 1).continuous == 0.0);
        CHECK(law.quintuple_space_density(1, 1, 2, 1.5, 1).continuous == 0.0);
    }
    SUBCASE("integrates to the ruin probability") {
        const double x = 1.5;
        QuadConfig q{1e-9, 1e-7, 2000};
        double total = 0.0;
        for (int k = 1; k <= 2; ++k) {
            auto over_y = [&](double y) {
                auto over_v = [&](double v) {
                    auto over_u = [&](double u) { return law.quintuple_space_density(x, u, v, y, k).continuous; };
                    return integrate(over_u, 0, kInf, q).value;
                };
                return integrate(over_v, y, kInf, q).value;
            };
            total += integrate(over_y, 0, x, q).value;
            auto atom_v = [&](double v) {
                auto over_u = [&](double u) { return law.quintuple_space_density(x, u, v, x, k).atom; };
                return integrate(over_u, 0, kInf, q).value;
            };
            total += integrate(atom_v, x, kInf, q).value;
        }
        CHECK(std::abs(total - law.ruin_prob(x).value) < 1e-4);
    }
    SUBCASE("overshoot plus undershoot at zero barrier") {
        // (u, v) density e^{-(u+v)} / c per line; w = u + v has density w e^{-w} / c
        double p = 0.0;
        for (int k = 1; k <= 2; ++k) p += law.bin_probability(0, k, 0, kInf, 0, 1);
        CHECK(std::abs(p - 2 * (1 - 2 * std::exp(-1.0) + std::exp(-1.0)) / 4) < 1e-9);
        CHECK(std::abs(law.bin_probability(0, 0, 0, kInf, 0, kInf) - 0.5) < 1e-9);
    }
    SUBCASE("binned mass at a positive barrier") {
        CHECK(std::abs(law.bin_probability(2, 0, 0, kInf, 0, kInf) - law.ruin_prob(2).value) < 1e-4);
    }
}

TEST_CASE("potential measure") {
    RuinLaw law(expo_model(LevyCopula::independence(), 4.0));
    // rho = 1/2, F_H = Expo(1): sum_{n>=1} rho^n Gamma(n,1) density = rho e^{-(1-rho) x}
    for (double x : {0.0, 1.0, 4.0}) {
        CHECK(std::abs(law.potential_density(x) - 0.5 * std::exp(-0.5 * x)) < 1e-5);
        CHECK(std::abs(law.potential_cdf(x) - (1 + (1 - std::exp(-0.5 * x)))) < 1e-5);
    }
}

TEST_CASE("triple law for compound Poisson sums") {
    RiskModel m = expo_model(LevyCopula::independence(), 0.0);
    SUBCASE("zero barrier") {
        TripleLaw t(m, 0.0);
        CHECK(t.lambda() == 2.0);
        CHECK(t.cause_prob(1).value == 0.5);
        CHECK(t.cause_prob(3).value == 0.0);
        for (double s : {0.1, 1.0, 3.0}) {
            CHECK(std::abs(t.time_density(s) - 2 * std::exp(-2 * s)) < 1e-14);
            CHECK(std::abs(t.time_cdf(s) - (1 - std::exp(-2 * s))) < 1e-14);
        }
        CHECK(t.undershoot_cdf(0) == 1.0);
    }
    SUBCASE("positive barrier against the Poisson renewal") {
        // jumps are Expo(1) at rate 2; the renewal density is 1
        const double x = 3.0;
        TripleLaw t(m, x);
        for (int k = 1; k <= 2; ++k) CHECK(std::abs(t.cause_prob(k).value - 0.5) < 1e-5);
        for (double v : {0.5, 1.0, 2.5}) CHECK(std::abs(t.undershoot_cdf(v) - (1 - std::exp(-v))) < 1e-5);
        CHECK(std::abs(t.undershoot_cdf(x) - 1.0) < 1e-5);
        for (double s : {0.5, 1.0, 2.0, 5.0}) {
            // passage at jump n+1 with probability Pois(n; x); the time is Gamma(n+1, 2)
            double cdf = 0.0, dens = 0.0;
            for (int n = 0; n < 80; ++n) {
                double below = 0.0;
                for (int j = 0; j <= n; ++j) below += poisson_pmf(j, 2 * s);
                cdf += poisson_pmf(n, x) * (1 - below);
                dens += poisson_pmf(n, x) * 2 * poisson_pmf(n, 2 * s);
            }
            CHECK(std::abs(t.time_cdf(s) - cdf) < 1e-5);
            CHECK(std::abs(t.time_density(s) - dens) < 1e-5);
        }
        CHECK(std::abs(t.time_cdf(1e3) - 1.0) < 1e-9);
    }
}

TEST_CASE("ruin law is kernel independent") {
    RiskModel m = expo_model(LevyCopula::clayton(1.0), 4.0, {10.0, 1024, 1e-10});
    RuinLaw ref(m, kernels::scalar());
    for (const kernels::KernelSet* k : kernels::available()) {
        CAPTURE(k->name);
        RuinLaw law(m, *k);
        for (double x : {0.3, 1.0, 4.0, 9.5}) {
            CHECK(std::abs(law.ruin_prob(x).value - ref.ruin_prob(x).value) < 1e-13);
            CHECK(std::abs(law.cause_prob(x, 3).value - ref.cause_prob(x, 3).value) < 1e-13);
        }
    }
}

TEST_CASE("heavy-tailed margins") {
    JumpDecomposition dec(LevyCopula::clayton(2.0), MarginalTail::pareto(1, 2, 1), MarginalTail::pareto(1, 2, 1));
    RiskModel m(1.25 * dec.mean_sum(), dec);
    RuinLaw law(m);
    CHECK(law.ruin_prob(0).value == doctest::Approx(0.8).epsilon(1e-14));
    double prev = 1.0;
    for (double x : {0.5, 1.0, 5.0, 10.0, 15.0, 20.0}) {
        const double p = law.ruin_prob(x).value;
        CHECK(p < prev);
        prev = p;
        double s = 0.0;
        for (int k = 1; k <= 3; ++k) s += law.cause_prob(x, k).value;
        CHECK(std::abs(s - p) < 1e-6);
    }
    // the common-jump share of ruin grows with the barrier
    CHECK(law.cause_prob(20, 3).value / law.ruin_prob(20).value > law.cause_prob(0, 3).value / 0.8);
}
