#include "levyruin/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "levyruin/errors.hpp"

namespace levyruin::stats {

double kolmogorov_pvalue(double d, std::size_t n) {
    if (n == 0) throw DomainError("KS test on an empty sample");
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_pvalue(d, sample.size()), 0};
}

TestResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected,
                           double min_expected, std::size_t fitted_params) {
    if (observed.size() != expected.size() || observed.empty()) throw DomainError("chi-square bins mismatch");
    std::vector<double> o, e;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_o += observed[i];
        acc_e += expected[i];
        if (acc_e >= min_expected) {
            o.push_back(acc_o);
            e.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (e.empty()) {
            o.push_back(acc_o);
            e.push_back(acc_e);
        } else {
            o.back() += acc_o;
            e.back() += acc_e;
        }
    }
    if (e.size() <= fitted_params + 1) throw DomainError("chi-square test needs more populated bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    const std::size_t dof = e.size() - 1 - fitted_params;
    return {stat, boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat), dof};
}

double proportion_se(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double sup_survival_distance(std::vector<double> sample, const std::function<double(double)>& survival) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double s = survival(sample[i]);
        // empirical survival just before and at the i-th order statistic
        d = std::max({d, std::abs(1.0 - static_cast<double>(i) / n - s), std::abs(1.0 - (static_cast<double>(i) + 1.0) / n - s)});
    }
    return d;
}

}  // namespace levyruin::stats
