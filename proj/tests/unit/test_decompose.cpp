#include <doctest.h>

#include <cmath>

#include "levyruin/decompose.hpp"
#include "levyruin/errors.hpp"

using namespace levyruin;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const QuadConfig kOracle{1e-15, 1e-12, 4000};

JumpDecomposition expo_pair(LevyCopula c, double a = 1.0) {
    return JumpDecomposition(c, MarginalTail::expo(1, a), MarginalTail::expo(1, a));
}

// Common-jump tail from the joint Levy density, integrated over {x + y > z}.
double common_tail_2d(const JumpDecomposition& d, double z) {
    const auto& m1 = d.margin(1);
    const auto& m2 = d.margin(2);
    const auto& c = d.copula();
    auto inner = [&](double x) {
        const double lo = std::max(z - x, 0.0);
        auto g = [&](double y) {
            if (!(y > 0.0)) return 0.0;
            const double d2 = m2.density(y);
            return d2 == 0.0 ? 0.0 : c.density_uv(m1.tail(x), m2.tail(y)) * d2;
        };
        std::vector<double> pts = {lo};
        if (m2.support_lower() > lo) pts.push_back(m2.support_lower());
        pts.push_back(kInf);
        return integrate_pieces(g, pts, kOracle).value * m1.density(x);
    };
    std::vector<double> pts = {0.0, z, kInf};
    if (m1.support_lower() > 0) pts = {m1.support_lower(), std::max(z, m1.support_lower()), kInf};
    return integrate_pieces(inner, pts, kOracle).value;
}

}  // namespace

TEST_CASE("intensities") {
    CHECK(expo_pair(LevyCopula::clayton(1.0)).lambda_sum() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(expo_pair(LevyCopula::nonhom_archimedean(3.0)).lambda_sum() == doctest::Approx(1.8).epsilon(1e-15));
    auto d = expo_pair(LevyCopula::clayton(2.0));
    CHECK(d.lambda_P(3) == doctest::Approx(std::pow(2.0, -0.5)));
    CHECK(d.lambda_P(1) == doctest::Approx(1.0 - std::pow(2.0, -0.5)));
    CHECK(expo_pair(LevyCopula::independence()).lambda_P(3) == 0.0);
}

TEST_CASE("independence has no common jumps") {
    auto d = JumpDecomposition(LevyCopula::independence(), MarginalTail::expo(1, 1), MarginalTail::pareto(2, 1.5, 1));
    for (double z : {0.1, 1.0, 3.0, 10.0}) {
        CHECK(d.tail_P(3, z).value == 0.0);
        CHECK(d.tail_sum(z).value == doctest::Approx(d.margin(1).tail(z) + d.margin(2).tail(z)).epsilon(1e-15));
    }
}

TEST_CASE("complete dependence with identical exponential margins") {
    for (double a : {1.0, 0.3}) {
        auto d = expo_pair(LevyCopula::complete_dependence(), a);
        for (double z : {0.1, 1.0, 4.0, 15.0}) {
            CHECK(d.tail_P(1, z).value == 0.0);
            CHECK(d.tail_P(2, z).value == 0.0);
            CHECK(rel(d.tail_P(3, z, TailMethod::Quadrature).value, std::exp(-a * z / 2)) < 1e-13);
            CHECK(rel(d.density_P(3, z), 0.5 * a * std::exp(-a * z / 2)) < 1e-12);
        }
    }
}

TEST_CASE("complete dependence with different margins") {
    // Common jumps (T1(u), T2(u)); check the tail against the level-set integral.
    auto d = JumpDecomposition(LevyCopula::complete_dependence(), MarginalTail::expo(2, 1), MarginalTail::expo(1, 3));
    CHECK(d.lambda_P(3) == 1.0);
    CHECK(d.lambda_P(1) == 1.0);
    for (double z : {0.1, 1.0, 3.0}) {
        // u* solves log(2/u) + log(1/u)/3 = z
        const double u = std::exp((std::log(2.0) - z) / (4.0 / 3.0));
        CHECK(rel(d.tail_P(3, z).value, std::min(u, 1.0)) < 1e-13);
        CHECK(std::abs(d.tail_P(1, z).value - std::max(2 * std::exp(-z) - 1.0, 0.0)) < 1e-15);
    }
}

TEST_CASE("nonhomogeneous single-jump tails") {
    auto d = expo_pair(LevyCopula::nonhom_archimedean(3.0));
    CHECK(d.tail_P(1, 1e-12, TailMethod::Quadrature).value == doctest::Approx(0.8).epsilon(1e-10));
    for (double z : {0.3, 1.0, 4.0}) {
        const double e = std::exp(-z);
        CHECK(rel(d.tail_P(1, z, TailMethod::Quadrature).value, e * (e + 3) / (e + 4)) < 1e-14);
    }
    auto p = JumpDecomposition(LevyCopula::nonhom_archimedean(2.0), MarginalTail::pareto(1, 1, 1),
                               MarginalTail::pareto(1, 1, 1));
    for (double z : {1.5, 3.0, 10.0}) {
        CHECK(rel(p.tail_P(2, z, TailMethod::Quadrature).value, (2.0 + 1.0 / z) / (1.0 + 3.0 * z)) < 1e-14);
    }
}

TEST_CASE("common-jump tail agrees with two-dimensional integration of the joint density") {
    for (const auto& c : {LevyCopula::clayton(0.5), LevyCopula::clayton(1.0), LevyCopula::clayton(3.0),
                          LevyCopula::nonhom_archimedean(1.0)}) {
        auto d = JumpDecomposition(c, MarginalTail::expo(1, 1), MarginalTail::expo(2, 0.5));
        for (double z : {0.3, 1.0, 4.0}) {
            CHECK(rel(d.tail_P(3, z, TailMethod::Quadrature).value, common_tail_2d(d, z)) < 1e-7);
        }
    }
    auto d = JumpDecomposition(LevyCopula::clayton(2.0), MarginalTail::pareto(1, 2, 1), MarginalTail::pareto(1, 2, 1));
    for (double z : {1.5, 2.5, 6.0}) CHECK(rel(d.tail_P(3, z).value, common_tail_2d(d, z)) < 1e-7);
}

TEST_CASE("Clayton theta = 1 total tail against independent reference values") {
    // Values from an independent scipy evaluation of the defining integrals.
    const std::vector<std::pair<double, double>> ref = {
        {0.25, 1.1747910464189242}, {0.5, 0.9318722476308294}, {1.0, 0.6125003873931134},
        {2.0, 0.3107170412898549},  {5.0, 0.0645295756588654}, {10.0, 0.0052919739462436175}};
    auto d = expo_pair(LevyCopula::clayton(1.0));
    for (auto [z, v] : ref) {
        CHECK(rel(d.tail_sum(z, TailMethod::Quadrature).value, v) < 1e-9);
        CHECK(rel(d.tail_sum(z).value, v) < 1e-12);
    }
}

TEST_CASE("nonhomogeneous common-jump tails against independent reference values") {
    const std::vector<std::pair<double, double>> expo_ref = {
        {0.25, 0.19621845422893675}, {0.5, 0.18656472334561036}, {1.0, 0.15772152719233962},
        {2.0, 0.09503462747626701},  {5.0, 0.01109999254239487}, {10.0, 0.00015019589759762093}};
    auto d = expo_pair(LevyCopula::nonhom_archimedean(3.0));
    for (auto [z, v] : expo_ref) CHECK(rel(d.tail_P(3, z, TailMethod::Quadrature).value, v) < 1e-9);

    const std::vector<std::pair<double, double>> pareto_ref = {
        {2.5, 0.18964946788962259}, {5.0, 0.11560849109754111}, {10.0, 0.058885425077056214}};
    auto p = JumpDecomposition(LevyCopula::nonhom_archimedean(3.0), MarginalTail::pareto(1, 1, 1),
                               MarginalTail::pareto(1, 1, 1));
    for (auto [z, v] : pareto_ref) CHECK(rel(p.tail_P(3, z, TailMethod::Quadrature).value, v) < 1e-9);
}

TEST_CASE("closed-form catalog validation") {
    auto clay = expo_pair(LevyCopula::clayton(1.0));
    auto names = clay.active_closed_forms();
    CHECK(std::find(names.begin(), names.end(), "clayton1_expo_total_factored") != names.end());
    CHECK(std::find(names.begin(), names.end(), "clayton1_expo_total_expanded") == names.end());
    bool saw_expanded = false;
    for (const auto& chk : clay.closed_form_checks()) {
        if (chk.name == "clayton1_expo_total_expanded") {
            saw_expanded = true;
            CHECK_FALSE(chk.passed);
        } else {
            CHECK(chk.passed);
        }
    }
    CHECK(saw_expanded);

    auto nh = expo_pair(LevyCopula::nonhom_archimedean(3.0), 0.7);
    for (const auto& chk : nh.closed_form_checks()) CHECK(chk.passed);
    CHECK(nh.active_closed_forms().size() == 3);

    auto nhp = JumpDecomposition(LevyCopula::nonhom_archimedean(3.0), MarginalTail::pareto(1, 1, 1),
                                 MarginalTail::pareto(1, 1, 1));
    for (const auto& chk : nhp.closed_form_checks()) CHECK(chk.passed);

    // The general nonhomogeneous total-tail formula for unequal margins.
    auto gen = JumpDecomposition(LevyCopula::nonhom_archimedean(1.5), MarginalTail::expo(2, 1),
                                 MarginalTail::pareto(1, 2.5, 0.5));
    const ClosedForm* total = nullptr;
    for (const auto& cf : closed_form_catalog())
        if (cf.name == "nonhom_total_general") total = &cf;
    REQUIRE(total);
    auto chk = check_closed_form(*total, gen, {0.5, 1, 2, 5});
    CHECK(chk.passed);
    CHECK(chk.max_rel_dev < 1e-7);
}

TEST_CASE("decomposition identities") {
    for (const auto& c : {LevyCopula::independence(), LevyCopula::complete_dependence(), LevyCopula::clayton(0.5),
                          LevyCopula::clayton(5.0), LevyCopula::nonhom_archimedean(1.0)}) {
        for (auto [m1, m2] : {std::pair{MarginalTail::expo(1, 1), MarginalTail::expo(1, 1)},
                              {MarginalTail::expo(2, 1), MarginalTail::pareto(1, 2.5, 1)}}) {
            JumpDecomposition d(c, m1, m2);
            CHECK(rel(d.tail_sum(1e-10, TailMethod::Quadrature).value, d.lambda_sum()) < 1e-8);
            double prev[3] = {kInf, kInf, kInf};
            for (double z = 0.05; z < 30; z *= 1.3) {
                double s = 0;
                for (int k = 1; k <= 3; ++k) {
                    const double t = d.tail_P(k, z).value;
                    CHECK(t >= 0.0);
                    CHECK(t <= prev[k - 1] * (1 + 1e-12) + 1e-15);
                    prev[k - 1] = t;
                    s += t;
                }
                CHECK(rel(s, d.tail_sum(z, TailMethod::Quadrature).value) < 1e-14);
            }
        }
    }
}

TEST_CASE("component means") {
    for (const auto& c : {LevyCopula::independence(), LevyCopula::complete_dependence(), LevyCopula::clayton(1.0),
                          LevyCopula::clayton(5.0), LevyCopula::nonhom_archimedean(3.0)}) {
        for (auto [m1, m2] : {std::pair{MarginalTail::expo(1, 1), MarginalTail::expo(1, 1)},
                              {MarginalTail::expo(2, 1), MarginalTail::pareto(1, 2.5, 1)}}) {
            JumpDecomposition d(c, m1, m2);
            CAPTURE(c.name());
            CAPTURE(m2.name());
            double sum = 0.0;
            for (int k = 1; k <= 3; ++k) {
                CAPTURE(k);
                const double mu = d.mean_P(k).value;
                sum += mu;
                auto f = [&](double z) { return z > 0 ? d.tail_P(k, z, TailMethod::Quadrature).value : 0.0; };
                const double num = integrate_pieces(f, {0.0, 1.0, 2.0, kInf}, QuadConfig{1e-13, 1e-10, 4000}).value;
                if (mu == 0.0) CHECK(std::abs(num) < 1e-12);
                else CHECK(rel(mu, num) < 1e-7);
            }
            CHECK(rel(sum, d.mean_sum()) < 1e-13);
            auto fs = [&](double z) { return z > 0 ? d.tail_sum(z, TailMethod::Quadrature).value : 0.0; };
            CHECK(rel(integrate_pieces(fs, {0.0, 1.0, 2.0, kInf}, QuadConfig{1e-13, 1e-10, 4000}).value,
                      d.mean_sum()) < 1e-7);
        }
    }
}

TEST_CASE("densities are derivatives of the tails") {
    for (const auto& c : {LevyCopula::clayton(1.0), LevyCopula::nonhom_archimedean(2.0),
                          LevyCopula::complete_dependence()}) {
        auto d = JumpDecomposition(c, MarginalTail::expo(1, 1), MarginalTail::expo(1.5, 0.6));
        for (int k = 1; k <= 3; ++k) {
            for (double z : {0.4, 1.3, 3.7}) {
                const double h = 1e-4;
                const double fd = (d.tail_P(k, z - h, TailMethod::Quadrature).value -
                                   d.tail_P(k, z + h, TailMethod::Quadrature).value) /
                                  (2 * h);
                CHECK(std::abs(d.density_P(k, z) - fd) < 1e-6 * std::max(1.0, fd));
            }
        }
    }
}

TEST_CASE("tail ratios for large z") {
    auto clay = expo_pair(LevyCopula::clayton(1.0));
    CHECK(clay.tail_P(1, 20).value / std::exp(-20.0) < 0.01);
    auto nh = expo_pair(LevyCopula::nonhom_archimedean(3.0));
    CHECK(std::abs(nh.tail_P(1, 20).value / std::exp(-20.0) - 0.75) < 0.01);
}

TEST_CASE("larger Clayton parameter means fewer single jumps") {
    std::vector<double> thetas = {0.3, 0.7, 1.0, 2.0, 5.0, 10.0};
    for (double z : {0.1, 0.5, 1.0, 3.0, 8.0}) {
        double prev = kInf;
        for (double th : thetas) {
            const double t = expo_pair(LevyCopula::clayton(th)).tail_P(1, z).value;
            CHECK(t <= prev);
            prev = t;
        }
    }
}

TEST_CASE("infinite activity margin") {
    auto d = JumpDecomposition(LevyCopula::clayton(1.0), MarginalTail::stable_like(0.5, 1.0), MarginalTail::expo(1, 1));
    CHECK(d.lambda_P(2) == 0.0);
    CHECK(d.lambda_P(3) == 1.0);
    CHECK(std::isinf(d.lambda_P(1)));
    CHECK_THROWS_AS(d.lambda_sum(), ValidationError);
    for (double z : {0.5, 2.0}) {
        CHECK(d.tail_P(2, z).value == 0.0);
        CHECK(d.tail_P(3, z).value > 0.0);
    }
    auto both = JumpDecomposition(LevyCopula::clayton(2.0), MarginalTail::stable_like(0.5, 1.0),
                                  MarginalTail::stable_like(0.3, 2.0));
    CHECK(both.lambda_P(1) == 0.0);
    CHECK(both.lambda_P(2) == 0.0);
    CHECK(both.tail_P(1, 1.0).value == 0.0);
    auto ind = JumpDecomposition(LevyCopula::independence(), MarginalTail::stable_like(0.5, 1.0),
                                 MarginalTail::expo(1, 1));
    CHECK(ind.tail_P(1, 1.0).value == doctest::Approx(1.0));
}

TEST_CASE("opposite-sign classes") {
    const auto up = MarginalTail::expo(1, 1);
    const auto down = MarginalTail::expo(1, 2);
    CHECK(tail_P45(up, down, up, down, LevyCopula::clayton(1.0), 4, 0.5).value == 0.0);
    CHECK(tail_P45(up, std::nullopt, up, std::nullopt, LevyCopula::clayton(1.0, 0.3), 4, 0.5).value == 0.0);
    CHECK_THROWS_AS(tail_P45(up, down, up, down, LevyCopula::complete_dependence(), 4, 0.5), UnsupportedFamily);

    auto c0 = LevyCopula::clayton(1.0, 0.0);
    for (double z : {0.2, 1.0, 3.0}) {
        CHECK(rel(tail_P45(up, down, up, down, c0, 4, z).value, tail_P45(up, down, up, down, c0, 5, z).value) < 1e-12);
    }

    auto c = LevyCopula::clayton(1.0, 0.5);
    const auto m2_up = MarginalTail::expo(2, 1.5);
    for (double z : {0.2, 1.0, 3.0}) {
        auto inner = [&](double x) {
            auto g = [&](double w) {
                return w > 0 ? c.density_uv(up.tail(x), -down.tail(w)) * down.density(w) : 0.0;
            };
            return integrate(g, 0.0, x - z, kOracle).value * up.density(x);
        };
        const double brute = integrate(inner, z, kInf, kOracle).value;
        CHECK(rel(tail_P45(up, down, m2_up, down, c, 4, z).value, brute) < 1e-6);
    }
}

TEST_CASE("nonhomogeneous common tail far in the tail") {
    auto nh = expo_pair(LevyCopula::nonhom_archimedean(3.0));
    const QuadConfig tight{1e-40, 1e-11, 2000};
    for (double z : {20.0, 30.0, 40.0}) {
        CAPTURE(z);
        const double cf = nh.tail_P(3, z, TailMethod::ClosedForm).value;
        CHECK(cf == doctest::Approx(nh.tail_by_quadrature(3, z, tight).value).epsilon(1e-7));
    }
    for (double z : {100.0, 800.0}) CHECK(std::isfinite(nh.tail_P(3, z).value));
}
