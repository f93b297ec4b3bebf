#include "levyruin/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "levyruin/common.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/stats.hpp"

namespace levyruin {

namespace {

// Contiguous chunks in path order; results never depend on the worker count.
template <class F>
void for_chunks(std::size_t n, unsigned threads, F&& body) {
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(threads ? threads : 1, n ? n : 1));
    if (w == 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t lo = n * t / w, hi = n * (t + 1) / w;
        pool.emplace_back([&, t, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void check_barriers(const std::vector<double>& b) {
    if (b.empty()) throw ValidationError("at least one barrier is required");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i] >= 0.0) || !std::isfinite(b[i])) throw ValidationError("barriers must be finite and nonnegative");
        if (i > 0 && !(b[i] > b[i - 1])) throw ValidationError("barriers must be strictly increasing");
    }
}

}  // namespace

JumpSampler::JumpSampler(const JumpDecomposition& dec) : dec_(&dec) {
    if (!dec.finite_intensity()) throw ValidationError("simulation needs finite jump intensities");
    for (int k = 1; k <= 3; ++k) lam_[k - 1] = dec.lambda_P(k);
    total_ = dec.lambda_sum();
    m1_ = dec.margin(1).mass();
    m2_ = dec.margin(2).mass();
    if (!(total_ > 0.0)) throw ValidationError("simulation needs a positive jump intensity");
}

double JumpSampler::intensity(int k) const {
    if (k < 1 || k > 3) throw DomainError("jump class must be 1, 2 or 3");
    return lam_[k - 1];
}

Jump JumpSampler::draw(PathStream& rng) const {
    const double p = rng.uniform() * total_;
    int k = 3;
    if (p < lam_[0])
        k = 1;
    else if (p < lam_[0] + lam_[1])
        k = 2;
    if (lam_[k - 1] <= 0.0) k = lam_[0] > 0.0 ? 1 : (lam_[1] > 0.0 ? 2 : 3);
    return draw_class(k, rng);
}

Jump JumpSampler::draw_class(int k, PathStream& rng) const {
    if (!(intensity(k) > 0.0)) throw DomainError("jump class has zero intensity");
    const LevyCopula& c = dec_->copula();
    if (k == 1) {
        const double t = c.solve_single_for_u(rng.uniform() * lam_[0], m2_);
        return {1, dec_->margin(1).inverse_tail(t), 0.0};
    }
    if (k == 2) {
        const double t = c.solve_single_for_u(rng.uniform() * lam_[1], m1_);
        return {2, 0.0, dec_->margin(2).inverse_tail(t)};
    }
    const CommonJump j = sample_common_jump(rng);
    return {3, j.x1, j.x2};
}

CommonJump JumpSampler::sample_common_jump(PathStream& rng) const {
    if (!(lam_[2] > 0.0)) throw DomainError("no common jumps: lambda_P3 = 0");
    const LevyCopula& c = dec_->copula();
    const double t = c.solve_eval_for_u(rng.uniform() * lam_[2], m2_);
    const double x1 = dec_->margin(1).inverse_tail(t);
    const double w = rng.uniform();
    if (std::holds_alternative<family::CompleteDependence>(c.family()))
        return {x1, dec_->margin(2).inverse_tail(std::min(t, m2_))};
    if (!c.is_smooth()) throw UnsupportedFamily("common-jump sampling needs a differentiable copula");
    const double q = w * c.partial_u(t, m2_).value;
    const double s = c.solve_partial_u_for_v(t, q);
    if (!(s > 0.0) || !std::isfinite(s)) {
        std::ostringstream os;
        os << "conditional common-jump inversion failed at u = " << t << ", q = " << q;
        throw NumericError(os.str());
    }
    return {x1, dec_->margin(2).inverse_tail(std::min(s, m2_))};
}

std::vector<JumpEvent> simulate_jump_trace(const JumpDecomposition& dec, std::uint64_t seed, std::size_t n) {
    JumpSampler s(dec);
    PathStream rng(seed, 0);
    std::vector<JumpEvent> out;
    out.reserve(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += rng.exponential(s.total_intensity());
        out.push_back({t, s.draw(rng)});
    }
    return out;
}

double default_horizon(const RiskModel& model, double x) {
    if (model.pure_cpp()) return kInf;
    return 50.0 / (model.drift() - model.mean_sum()) * std::max(x, 1.0);
}

SimResult simulate_first_passage(const RiskModel& model, const SimConfig& cfg) {
    model.require_finite_intensity();
    check_barriers(cfg.barriers);
    if (cfg.n_paths == 0) throw ValidationError("n_paths must be positive");
    if (cfg.horizon < 0.0 || std::isnan(cfg.horizon)) throw ValidationError("horizon must be positive");
    const JumpSampler sampler(model.dec());
    const double c = model.drift();
    const std::vector<double>& xb = cfg.barriers;
    const std::size_t nb = xb.size();

    SimResult res;
    res.barriers = xb;
    res.horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(model, xb.back());
    res.records.assign(nb, std::vector<FirstPassageRecord>(cfg.n_paths));
    const double horizon = res.horizon;
    const double lag_gap = 0.25 * (c - model.mean_sum()) * horizon;
    std::vector<std::vector<char>> lagging(nb, std::vector<char>(cfg.n_paths, 0));

    for_chunks(cfg.n_paths, cfg.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            PathStream rng(cfg.seed, i);
            double t = 0.0, X = 0.0, M = 0.0, g = 0.0;
            std::size_t next = 0;
            while (next < nb) {
                const double dt = rng.exponential(sampler.total_intensity());
                if (t + dt > horizon) break;
                t += dt;
                X -= c * dt;
                const double before = X;
                const Jump j = sampler.draw(rng);
                X += j.size();
                for (; next < nb && X > xb[next]; ++next) {
                    FirstPassageRecord& r = res.records[next][i];
                    r.path = i;
                    r.tau = t;
                    r.g_prev = c == 0.0 ? t : g;
                    r.u = X - xb[next];
                    r.v = xb[next] - before;
                    r.y = xb[next] - M;
                    r.k = j.k;
                }
                if (X > M) {
                    M = X;
                    g = t;
                }
            }
            for (std::size_t b = next; b < nb; ++b) {
                FirstPassageRecord& r = res.records[b][i];
                r.path = i;
                r.tau = horizon;
                r.censored = true;
                const double level = X - c * (horizon - t);
                lagging[b][i] = xb[b] - level < lag_gap;
            }
        }
    });

    res.lagging.assign(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        res.lagging[b] = static_cast<std::size_t>(std::count(lagging[b].begin(), lagging[b].end(), 1));
        if (res.lagging[b] * 1000 > cfg.n_paths) {
            std::ostringstream os;
            os << "horizon " << horizon << " is short for barrier " << xb[b] << ": " << res.lagging[b]
               << " censored paths ended less than a quarter of the expected drift below it";
            res.warnings.push_back(os.str());
        }
    }
    return res;
}

PassageSummary summarize(const SimResult& r, std::size_t b) {
    if (b >= r.records.size()) throw DomainError("barrier index out of range");
    const auto& recs = r.records[b];
    PassageSummary s;
    s.barrier = r.barriers[b];
    s.n_paths = recs.size();
    std::size_t count[3] = {0, 0, 0};
    for (const auto& x : recs) {
        if (x.censored) {
            ++s.n_censored;
            continue;
        }
        ++s.n_ruined;
        ++count[x.k - 1];
    }
    const double n = static_cast<double>(s.n_paths);
    s.ruin_prob = static_cast<double>(s.n_ruined) / n;
    s.ruin_se = stats::proportion_se(s.ruin_prob, s.n_paths);
    for (int k = 0; k < 3; ++k) {
        s.cause_prob[k] = static_cast<double>(count[k]) / n;
        s.cause_se[k] = stats::proportion_se(s.cause_prob[k], s.n_paths);
    }
    return s;
}

Estimate mean_excess_scale(const JumpDecomposition& dec, double x) {
    const double tx = x > 0.0 ? dec.tail_sum(x).value : dec.lambda_sum();
    if (!(tx > 0.0)) throw DomainError("tail_sum vanishes at the barrier");
    std::vector<double> pts{x};
    for (int i = 1; i <= 2; ++i) {
        const double bp = dec.margin(i).support_lower();
        if (bp > x) pts.push_back(bp);
    }
    std::sort(pts.begin(), pts.end());
    pts.push_back(kInf);
    double err = 0.0;
    auto f = [&](double z) {
        const Estimate e = dec.tail_sum(z);
        err = std::max(err, e.error);
        return e.value;
    };
    const QuadResult r = integrate_pieces(f, pts, dec.quad());
    return {r.value / tx, r.abs_error / tx + err * r.value / (tx * tx)};
}

double gpd_survival(double w, double a) {
    if (w <= 0.0) return 1.0;
    if (std::isinf(a)) return std::exp(-w);
    return std::pow(1.0 + w / a, -a);
}

double tail_index(const JumpDecomposition& dec) {
    double a = kInf;
    for (int i = 1; i <= 2; ++i)
        if (const auto* p = std::get_if<margin::ParetoCPP>(&dec.margin(i).spec())) a = std::min(a, p->alpha);
    return a;
}

AsymptoticsResult estimate_asymptotics(const RiskModel& model, const SimConfig& cfg, const std::vector<double>& barriers,
                                       std::size_t min_events) {
    model.require_drift_mode();
    SimConfig run = cfg;
    run.barriers = barriers;
    const SimResult sim = simulate_first_passage(model, run);

    AsymptoticsResult out;
    out.alpha = tail_index(model.dec());
    out.warnings = sim.warnings;
    const double shifted = std::isinf(out.alpha) ? kInf : out.alpha - 1.0;
    for (std::size_t b = 0; b < barriers.size(); ++b) {
        const PassageSummary s = summarize(sim, b);
        AsymptoticRow row;
        row.barrier = barriers[b];
        row.n_ruined = s.n_ruined;
        row.ruin_prob = s.ruin_prob;
        row.ruin_se = s.ruin_se;
        row.scale = mean_excess_scale(model.dec(), barriers[b]).value;
        for (const auto& r : sim.records[b])
            if (!r.censored) row.scaled_overshoot.push_back(r.u / row.scale);
        for (int k = 0; k < 3; ++k) {
            row.cause_frac[k] = s.n_ruined ? s.cause_prob[k] / s.ruin_prob : 0.0;
            row.cause_se[k] = stats::proportion_se(row.cause_frac[k], s.n_ruined);
        }
        row.low_confidence = s.n_ruined < min_events;
        if (s.n_ruined > 0) {
            row.sup_dist = stats::sup_survival_distance(row.scaled_overshoot,
                                                        [&](double w) { return gpd_survival(w, out.alpha); });
            if (shifted > 0.0)
                row.sup_dist_shifted = stats::sup_survival_distance(
                    row.scaled_overshoot, [&](double w) { return gpd_survival(w, shifted); });
            else
                row.sup_dist_shifted = kInf;
        }
        if (row.low_confidence) {
            std::ostringstream os;
            os << "barrier " << row.barrier << ": only " << s.n_ruined << " ruin events";
            out.warnings.push_back(os.str());
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

IncrementSampler::IncrementSampler(DistCopula c, Distribution1D f1, Distribution1D f2)
    : c_(c), f1_(std::move(f1)), f2_(std::move(f2)) {}

std::pair<double, double> IncrementSampler::draw(PathStream& rng) const {
    const double u = rng.uniform();
    const double w = rng.uniform();
    double v = w;
    if (std::holds_alternative<distcop::Comonotone>(c_.family()))
        v = u;
    else if (std::holds_alternative<distcop::Clayton>(c_.family()))
        v = c_.conditional_v(u, w);
    return {f1_.quantile(u), f2_.quantile(v)};
}

int increment_class(double xi1, double xi2) noexcept {
    if (xi1 >= 0.0) return xi2 >= 0.0 ? 3 : 4;
    return xi2 >= 0.0 ? 5 : 6;
}

std::vector<RwRecord> simulate_random_walk(const IncrementSampler& s, const RwSimConfig& cfg) {
    if (!(cfg.barrier >= 0.0) || !std::isfinite(cfg.barrier)) throw ValidationError("barrier must be nonnegative");
    if (cfg.n_paths == 0) throw ValidationError("n_paths must be positive");
    std::vector<RwRecord> out(cfg.n_paths);
    const double x = cfg.barrier;
    for_chunks(cfg.n_paths, cfg.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            PathStream rng(cfg.seed, i);
            RwRecord& r = out[i];
            r.path = i;
            double Z = 0.0, M = 0.0;
            std::size_t jmax = 0;
            std::size_t n = 0;
            for (; n < cfg.max_steps; ++n) {
                const auto [a, b] = s.draw(rng);
                const double next = Z + a + b;
                if (next > x) {
                    r.steps = n + 1;
                    r.prev_max_step = jmax;
                    r.u = next - x;
                    r.v = x - Z;
                    r.y = x - M;
                    r.k = increment_class(a, b);
                    break;
                }
                Z = next;
                if (Z >= M) {
                    M = Z;
                    jmax = n + 1;
                }
            }
            if (n == cfg.max_steps) {
                r.censored = true;
                r.steps = n;
            }
        }
    });
    return out;
}

}  // namespace levyruin
