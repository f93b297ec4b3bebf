#pragma once

#include <string>
#include <variant>
#include <vector>

#include "levyruin/decompose.hpp"
#include "levyruin/firstpassage.hpp"
#include "levyruin/kernels.hpp"

namespace levyruin {

namespace dist {
struct Expo {
    double rate = 1.0;
};
struct Normal {
    double mean = 0.0;
    double sd = 1.0;
};
}  // namespace dist

/// One-dimensional increment distribution. A probability mass at zero is
/// allowed for simulation only; the analytic laws need continuous margins.
class Distribution1D {
public:
    using Spec = std::variant<dist::Expo, dist::Normal>;

    static Distribution1D expo(double rate, double zero_atom = 0.0);
    static Distribution1D normal(double mean, double sd, double zero_atom = 0.0);

    const Spec& spec() const noexcept { return spec_; }
    double zero_atom() const noexcept { return atom_; }
    std::string name() const;
    bool positive_support() const noexcept;

    double cdf(double x) const;
    double pdf(double x) const;
    /// Generalized inverse of cdf, atom included.
    double quantile(double p) const;

    void require_continuous() const;

private:
    Distribution1D(Spec s, double atom);
    double cont_cdf(double x) const;
    double cont_quantile(double p) const;
    Spec spec_;
    double atom_;
};

namespace distcop {
struct Independence {};
struct Comonotone {};
struct Clayton {
    double theta = 1.0;
};
}  // namespace distcop

/// Distributional copula on [0, 1]^2.
class DistCopula {
public:
    using Family = std::variant<distcop::Independence, distcop::Comonotone, distcop::Clayton>;

    static DistCopula independence();
    static DistCopula comonotone();
    static DistCopula clayton(double theta);

    const Family& family() const noexcept { return family_; }
    std::string name() const;
    bool is_smooth() const noexcept;

    double eval(double u, double v) const;
    double partial_u(double u, double v) const;
    double partial_v(double u, double v) const { return partial_u_swapped(u, v); }
    double density(double u, double v) const;
    /// u + v - 1 + C(1 - u, 1 - v)
    double survival(double u, double v) const;
    /// d/du of survival(u, v).
    double survival_partial_u(double u, double v) const { return 1.0 - partial_u(1.0 - u, 1.0 - v); }
    /// v with partial_u(u, v) = w, i.e. a draw of V given U = u from a uniform w.
    double conditional_v(double u, double w) const;

private:
    explicit DistCopula(Family f) : family_(f) {}
    double partial_u_swapped(double u, double v) const;
    Family family_;
};

/// Class of an increment (xi1, xi2): 3 both positive, 4 xi1 > 0 > xi2,
/// 5 xi1 < 0 < xi2.
double increment_class_cdf(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, int k, double z,
                           const QuadConfig& q = {});
/// Total probability of a class; k = 6 is both negative.
double increment_class_mass(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, int k);
/// Density of the class-3 increment xi1 + xi2 at z > 0.
double increment_class3_density(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, double z,
                                const QuadConfig& q = {});
/// P(xi1 + xi2 > z) through the survival copula.
double sum_tail_survival(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, double z,
                         const QuadConfig& q = {});

struct IncrementDF {
    int k = 3;
    double h = 0.0;
    std::vector<double> cdf;
    double mass = 0.0;
    double error = 0.0;
};

IncrementDF increment_class_df(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, int k,
                               const GridConfig& grid, const QuadConfig& q = {});

/// First passage of Z = Z1 + Z2 over x for positive increments: the number of
/// steps after the previous maximum is 0, the undershoot equals the
/// undershoot of the previous maximum, and the ladder potential is the
/// renewal measure of the class-3 increments.
class RwQuintupleLaw {
public:
    RwQuintupleLaw(const DistCopula& c, const Distribution1D& f1, const Distribution1D& f2, double x,
                   const GridConfig& grid = {}, const kernels::KernelSet& k = kernels::active());

    double barrier() const noexcept { return x_; }
    /// Largest previous-maximum index kept.
    std::size_t terms() const noexcept { return fj_at_x_.size(); }

    /// P(previous maximum at step j).
    double index_prob(std::size_t j) const;
    /// P(previous maximum at step j, undershoot <= v).
    double index_undershoot_cdf(std::size_t j, double v) const;
    double undershoot_cdf(double v) const;
    /// P(overshoot <= u); needs x + u <= x_max.
    double overshoot_cdf(double u) const;
    /// Density in (u, y) at i = 0, v = y for step j; the j = 0 term is an atom at y = x.
    QuintupleDensity density(std::size_t i, std::size_t j, double u, double v, double y) const;
    /// Class-3 d.f. on the grid.
    const std::vector<double>& increment_cdf() const noexcept { return cdf_; }

private:
    double cdf_at(double z) const;
    DistCopula c_;
    Distribution1D f1_, f2_;
    double x_;
    double h_;
    std::size_t nx_ = 0;
    std::vector<double> cdf_;
    std::vector<double> dens_;
    std::vector<double> fj_at_x_;
    /// class-3 density convolution powers j = 1, 2, ... on [0, x]
    std::vector<std::vector<double>> fj_;
};

}  // namespace levyruin
