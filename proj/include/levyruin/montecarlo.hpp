#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "levyruin/firstpassage.hpp"
#include "levyruin/rng.hpp"
#include "levyruin/rwalk.hpp"

namespace levyruin {

struct CommonJump {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// One jump of (S1, S2) with its class k: 1 and 2 are single jumps, 3 common.
struct Jump {
    int k = 0;
    double x1 = 0.0;
    double x2 = 0.0;
    double size() const noexcept { return x1 + x2; }
};

/// Samples jumps of the bivariate compound Poisson process by inverse
/// transform through the Levy copula. Holds a reference to the decomposition.
class JumpSampler {
public:
    explicit JumpSampler(const JumpDecomposition& dec);

    double intensity(int k) const;
    double total_intensity() const noexcept { return total_; }

    /// Class drawn with probability lambda_Pk / lambda, then its jump.
    Jump draw(PathStream& rng) const;
    Jump draw_class(int k, PathStream& rng) const;
    CommonJump sample_common_jump(PathStream& rng) const;

private:
    const JumpDecomposition* dec_;
    double lam_[3] = {0, 0, 0};
    double total_ = 0.0;
    double m1_ = 0.0, m2_ = 0.0;
};

struct JumpEvent {
    double t = 0.0;
    Jump jump;
};

/// The first n jumps of the superposed clocks.
std::vector<JumpEvent> simulate_jump_trace(const JumpDecomposition& dec, std::uint64_t seed, std::size_t n);

struct SimConfig {
    std::uint64_t seed = 1;
    std::size_t n_paths = 10000;
    /// Increasing barriers served by the same paths.
    std::vector<double> barriers{0.0};
    /// 0 selects default_horizon.
    double horizon = 0.0;
    unsigned threads = 1;
};

/// 50 / (c - mu_S) * max(x, 1) in drift mode, infinite for c = 0.
double default_horizon(const RiskModel& model, double x);

struct FirstPassageRecord {
    std::uint64_t path = 0;
    double tau = 0.0;
    double g_prev = 0.0;
    double u = 0.0;
    double v = 0.0;
    double y = 0.0;
    int k = 0;
    bool crept = false;
    bool censored = false;
};

struct SimResult {
    std::vector<double> barriers;
    double horizon = 0.0;
    /// records[b][i] belongs to barrier b and path i.
    std::vector<std::vector<FirstPassageRecord>> records;
    /// Censored paths whose level at the horizon is less than a quarter of the
    /// expected drift below the barrier.
    std::vector<std::size_t> lagging;
    std::vector<std::string> warnings;
};

SimResult simulate_first_passage(const RiskModel& model, const SimConfig& cfg);

struct PassageSummary {
    double barrier = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_ruined = 0;
    std::size_t n_censored = 0;
    double ruin_prob = 0.0;
    double ruin_se = 0.0;
    /// Unconditional P(ruin by cause k), k = 1, 2, 3.
    double cause_prob[3] = {0, 0, 0};
    double cause_se[3] = {0, 0, 0};
};

PassageSummary summarize(const SimResult& r, std::size_t b);

/// ∫_x^∞ tail_sum / tail_sum(x).
Estimate mean_excess_scale(const JumpDecomposition& dec, double x);

struct AsymptoticRow {
    double barrier = 0.0;
    std::size_t n_ruined = 0;
    double ruin_prob = 0.0;
    double ruin_se = 0.0;
    /// P(cause = k | ruin).
    double cause_frac[3] = {0, 0, 0};
    double cause_se[3] = {0, 0, 0};
    double scale = 0.0;
    /// sup-distance of the scaled overshoot survival function to the
    /// reference with index alpha and with index alpha - 1.
    double sup_dist = 0.0;
    double sup_dist_shifted = 0.0;
    bool low_confidence = false;
    std::vector<double> scaled_overshoot;
};

struct AsymptoticsResult {
    /// Regular-variation index of the heavier margin; infinite for light tails.
    double alpha = 0.0;
    std::vector<AsymptoticRow> rows;
    std::vector<std::string> warnings;
};

/// Survival function (1 + w / a)^{-a}; e^{-w} for a = inf.
double gpd_survival(double w, double a);
double tail_index(const JumpDecomposition& dec);

AsymptoticsResult estimate_asymptotics(const RiskModel& model, const SimConfig& cfg, const std::vector<double>& barriers,
                                       std::size_t min_events = 400);

/// Draws of (xi1, xi2) from a distributional copula and its margins.
class IncrementSampler {
public:
    IncrementSampler(DistCopula c, Distribution1D f1, Distribution1D f2);
    std::pair<double, double> draw(PathStream& rng) const;

private:
    DistCopula c_;
    Distribution1D f1_, f2_;
};

/// Class of an increment: 3 both nonnegative, 4 xi1 >= 0 > xi2, 5 xi1 < 0 <= xi2, 6 both negative.
int increment_class(double xi1, double xi2) noexcept;

struct RwSimConfig {
    std::uint64_t seed = 1;
    std::size_t n_paths = 10000;
    double barrier = 0.0;
    std::size_t max_steps = 1000000;
    unsigned threads = 1;
};

struct RwRecord {
    std::uint64_t path = 0;
    /// First passage step T; the previous maximum is at step j <= T - 1.
    std::size_t steps = 0;
    std::size_t prev_max_step = 0;
    double u = 0.0;
    double v = 0.0;
    double y = 0.0;
    int k = 0;
    bool censored = false;
};

std::vector<RwRecord> simulate_random_walk(const IncrementSampler& s, const RwSimConfig& cfg);

}  // namespace levyruin
