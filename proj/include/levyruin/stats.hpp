#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace levyruin::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t dof = 0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous d.f.
TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov tail probability with Stephens' small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

/// Pearson chi-square test of observed counts against expected counts.
/// Bins with expected count below min_expected are pooled into their neighbour.
TestResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                           double min_expected = 5.0, std::size_t fitted_params = 0);

/// Standard error of a binomial proportion.
double proportion_se(double p, std::size_t n);

/// sup_w |S_emp(w) - S_ref(w)| for an empirical survival function.
double sup_survival_distance(std::vector<double> sample, const std::function<double(double)>& survival);

}  // namespace levyruin::stats
