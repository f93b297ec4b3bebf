#include "levyruin/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "levyruin/firstpassage.hpp"
#include "levyruin/montecarlo.hpp"
#include "levyruin/rwalk.hpp"
#include "levyruin/stats.hpp"

namespace levyruin::cli {

namespace fs = std::filesystem;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

int line_of(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    return m.is_null() ? 0 : m.line + 1;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw SchemaError(msg, line_of(n)); }

void allow(const YAML::Node& n, const std::string& where, std::initializer_list<std::string_view> keys) {
    if (!n.IsMap()) fail(n, where + " must be a mapping");
    for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

double num(const YAML::Node& parent, const char* key, const std::string& where, std::optional<double> def = {}) {
    const YAML::Node n = parent[key];
    if (!n) {
        if (def) return *def;
        fail(parent, "missing required key '" + where + "." + key + "'");
    }
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        fail(n, where + "." + key + " must be a number");
    }
}

std::uint64_t count(const YAML::Node& parent, const char* key, const std::string& where, std::uint64_t def) {
    const YAML::Node n = parent[key];
    if (!n) return def;
    try {
        const auto s = n.as<std::string>();
        if (s.empty() || s[0] == '-') throw YAML::Exception(YAML::Mark::null_mark(), "negative");
        return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
        fail(n, where + "." + key + " must be a nonnegative integer");
    }
}

std::string text(const YAML::Node& parent, const char* key, const std::string& where) {
    const YAML::Node n = parent[key];
    if (!n) fail(parent, "missing required key '" + where + "." + key + "'");
    if (!n.IsScalar()) fail(n, where + "." + key + " must be a string");
    return n.as<std::string>();
}

const YAML::Node child(const YAML::Node& parent, const char* key) {
    if (!parent || !parent.IsMap()) return YAML::Node();
    return parent[key];
}

// A list of numbers, a single number, or {from, to, step} (both ends included).
std::vector<double> points(const YAML::Node& parent, const char* key, const std::string& where,
                           std::vector<double> def = {}) {
    const YAML::Node n = child(parent, key);
    const std::string name = where.empty() ? key : where + "." + key;
    if (!n || n.IsNull()) {
        if (def.empty()) fail(parent, "missing required key '" + name + "'");
        return def;
    }
    std::vector<double> out;
    if (n.IsScalar()) {
        out.push_back(num(parent, key, where));
    } else if (n.IsSequence()) {
        for (const auto& e : n) {
            try {
                out.push_back(e.as<double>());
            } catch (const YAML::Exception&) {
                fail(e, name + " entries must be numbers");
            }
        }
    } else {
        allow(n, name, {"from", "to", "step"});
        const double a = num(n, "from", name), b = num(n, "to", name), h = num(n, "step", name);
        if (!(h > 0.0) || !(b >= a)) fail(n, name + " needs from <= to and step > 0");
        const auto m = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9));
        if (m > 10000000) fail(n, name + " has too many points");
        for (std::size_t i = 0; i <= m; ++i) out.push_back(a + h * static_cast<double>(i));
    }
    if (out.empty()) fail(n, name + " is empty");
    return out;
}

LevyCopula parse_copula(const YAML::Node& n) {
    if (!n) throw SchemaError("missing required key 'model.copula'", 0);
    const std::string type = text(n, "type", "model.copula");
    if (type == "independence") {
        allow(n, "model.copula", {"type"});
        return LevyCopula::independence();
    }
    if (type == "complete_dependence") {
        allow(n, "model.copula", {"type"});
        return LevyCopula::complete_dependence();
    }
    if (type == "clayton") {
        allow(n, "model.copula", {"type", "theta", "eta"});
        return LevyCopula::clayton(num(n, "theta", "model.copula"), num(n, "eta", "model.copula", 1.0));
    }
    if (type == "nonhom") {
        allow(n, "model.copula", {"type", "zeta", "eta"});
        return LevyCopula::nonhom_archimedean(num(n, "zeta", "model.copula"), num(n, "eta", "model.copula", 1.0));
    }
    fail(n["type"], "unknown copula type '" + type + "' (independence, complete_dependence, clayton, nonhom)");
}

MarginalTail parse_margin(const YAML::Node& n, const std::string& where) {
    const std::string type = text(n, "type", where);
    if (type == "expo") {
        allow(n, where, {"type", "lambda", "rate"});
        return MarginalTail::expo(num(n, "lambda", where), num(n, "rate", where));
    }
    if (type == "pareto") {
        allow(n, where, {"type", "lambda", "alpha", "xm"});
        return MarginalTail::pareto(num(n, "lambda", where), num(n, "alpha", where), num(n, "xm", where));
    }
    if (type == "stable") {
        allow(n, where, {"type", "beta", "scale"});
        return MarginalTail::stable_like(num(n, "beta", where), num(n, "scale", where));
    }
    fail(n["type"], "unknown margin type '" + type + "' (expo, pareto, stable)");
}

std::pair<YAML::Node, YAML::Node> two(const YAML::Node& parent, const char* key, const std::string& where) {
    const YAML::Node n = child(parent, key);
    if (!n) fail(parent, "missing required key '" + where + "." + key + "'");
    if (!n.IsSequence() || n.size() != 2) fail(n, where + "." + key + " must list exactly two margins");
    return {n[0], n[1]};
}

QuadConfig parse_quad(const YAML::Node& root) {
    QuadConfig q;
    const YAML::Node n = root["quad"];
    if (!n) return q;
    allow(n, "quad", {"abs_tol", "rel_tol", "max_subdivisions"});
    q.abs_tol = num(n, "abs_tol", "quad", q.abs_tol);
    q.rel_tol = num(n, "rel_tol", "quad", q.rel_tol);
    q.max_subdivisions = count(n, "max_subdivisions", "quad", q.max_subdivisions);
    return q;
}

GridConfig parse_grid(const YAML::Node& root) {
    GridConfig g;
    const YAML::Node n = root["grid"];
    if (!n) return g;
    allow(n, "grid", {"x_max", "intervals", "series_tol"});
    g.x_max = num(n, "x_max", "grid", g.x_max);
    g.intervals = count(n, "intervals", "grid", g.intervals);
    g.series_tol = num(n, "series_tol", "grid", g.series_tol);
    if (!(g.x_max > 0.0) || g.intervals < 4 || !(g.series_tol > 0.0))
        fail(n, "grid needs x_max > 0, intervals >= 4 and series_tol > 0");
    return g;
}

JumpDecomposition parse_decomposition(const YAML::Node& root) {
    const YAML::Node m = root["model"];
    if (!m) throw SchemaError("missing required key 'model'", 0);
    allow(m, "model", {"drift", "copula", "margins"});
    auto [a, b] = two(m, "margins", "model");
    return JumpDecomposition(parse_copula(m["copula"]), parse_margin(a, "model.margins[0]"),
                             parse_margin(b, "model.margins[1]"), parse_quad(root));
}

RiskModel parse_model(const YAML::Node& root, const GridConfig& grid) {
    JumpDecomposition dec = parse_decomposition(root);
    return RiskModel(num(root["model"], "drift", "model"), std::move(dec), grid);
}

GridConfig halved(GridConfig g) {
    g.intervals /= 2;
    return g;
}

/// CSV text with 17-digit floats and LF endings.
class Table {
public:
    explicit Table(std::vector<std::string> header) : cols_(header.size()) { line(header); }
    Table& operator<<(double x) { return cell(format_double(x)); }
    Table& operator<<(int x) { return cell(std::to_string(x)); }
    Table& operator<<(std::size_t x) { return cell(std::to_string(x)); }
    Table& operator<<(const std::string& s) { return cell(s); }
    Table& operator<<(const char* s) { return cell(s); }
    Table& blank() { return cell(""); }
    std::size_t rows() const noexcept { return rows_; }
    const std::string& str() const noexcept { return out_; }

private:
    void line(const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out_ += (i ? "," : "") + v[i];
        out_ += '\n';
    }
    Table& cell(const std::string& s) {
        if (at_ > 0) out_ += ',';
        out_ += s;
        if (++at_ == cols_) {
            out_ += '\n';
            at_ = 0;
            ++rows_;
        }
        return *this;
    }
    std::size_t cols_;
    std::size_t at_ = 0;
    std::size_t rows_ = 0;
    std::string out_;
};

struct Output {
    fs::path dir;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    std::vector<std::string> warnings;

    void write(const std::string& name, const Table& t) {
        std::ofstream f(dir / name, std::ios::binary);
        f << t.str();
        if (!f) throw std::ios_base::failure("cannot write " + (dir / name).string());
        files.push_back({{"file", name}, {"rows", t.rows()}, {"fnv1a", hex64(fnv1a(t.str()))}});
    }
};

void cmd_decompose(const YAML::Node& root, Output& out) {
    const JumpDecomposition dec = parse_decomposition(root);
    const auto zs = points(root, "z", "", {0.25, 0.5, 1, 2, 5, 10});
    Table t({"z", "tail_P1", "tail_P1_error", "tail_P2", "tail_P2_error", "tail_P3", "tail_P3_error", "tail_sum",
             "tail_sum_error"});
    for (double z : zs) {
        if (!(z > 0.0)) throw SchemaError("z points must be positive", line_of(root["z"]));
        t << z;
        for (int k = 1; k <= 3; ++k) {
            const Estimate e = dec.tail_P(k, z);
            t << e.value << e.error;
        }
        const Estimate s = dec.tail_sum(z);
        t << s.value << s.error;
    }
    out.write("decompose.csv", t);

    Table s({"quantity", "value", "error"});
    for (int k = 1; k <= 3; ++k) s << "lambda_P" + std::to_string(k) << dec.lambda_P(k) << 0.0;
    s << "lambda_sum" << (dec.finite_intensity() ? dec.lambda_sum() : kInf) << 0.0;
    for (int k = 1; k <= 3; ++k) {
        const Estimate e = dec.mean_P(k);
        s << "mean_P" + std::to_string(k) << e.value << e.error;
    }
    s << "mean_sum" << dec.mean_sum() << dec.mean_P(1).error + dec.mean_P(2).error + dec.mean_P(3).error;
    out.write("decompose_summary.csv", s);

    Table c({"closed_form", "max_rel_dev", "passed"});
    for (const auto& ck : dec.closed_form_checks()) c << ck.name << ck.max_rel_dev << (ck.passed ? 1 : 0);
    out.write("closed_forms.csv", c);
}

void cmd_ruin(const YAML::Node& root, Output& out, bool causes) {
    const RiskModel model = parse_model(root, parse_grid(root));
    model.require_drift_mode();
    const auto xs = points(root, "barriers", "");
    const RuinLaw law(model);
    if (!causes) {
        Table t({"x", "ruin_prob", "error"});
        for (double x : xs) {
            const Estimate e = law.ruin_prob(x);
            t << x << e.value << e.error;
        }
        out.write("ruin.csv", t);
        return;
    }
    Table t({"x", "k", "cause_prob", "error"});
    for (double x : xs)
        for (int k = 1; k <= 3; ++k) {
            const Estimate e = law.cause_prob(x, k);
            t << x << k << e.value << e.error;
        }
    out.write("cause.csv", t);
}

void cmd_quintuple(const YAML::Node& root, Output& out) {
    const GridConfig grid = parse_grid(root);
    const RiskModel model = parse_model(root, grid);
    model.require_drift_mode();
    const auto xs = points(root, "barriers", "");
    const YAML::Node q = root["quintuple"];
    if (!q) throw SchemaError("missing required key 'quintuple'", 0);
    allow(q, "quintuple", {"k", "u", "v", "y"});
    const auto ks = points(q, "k", "quintuple", {1, 2, 3});
    const auto us = points(q, "u", "quintuple"), vs = points(q, "v", "quintuple"), ys = points(q, "y", "quintuple");
    const RuinLaw law(model);
    const RuinLaw coarse(RiskModel(model.drift(), model.dec(), halved(grid)));
    Table t({"x", "k", "u", "v", "y", "density", "density_error", "atom", "atom_error"});
    for (double x : xs)
        for (double kd : ks) {
            const int k = static_cast<int>(kd);
            for (double u : us)
                for (double v : vs)
                    for (double y : ys) {
                        const QuintupleDensity a = law.quintuple_space_density(x, u, v, y, k);
                        const QuintupleDensity b = coarse.quintuple_space_density(x, u, v, y, k);
                        t << x << k << u << v << y << a.continuous << std::abs(a.continuous - b.continuous) << a.atom
                          << std::abs(a.atom - b.atom);
                    }
        }
    out.write("quintuple.csv", t);
}

void cmd_triple(const YAML::Node& root, Output& out) {
    const GridConfig grid = parse_grid(root);
    const RiskModel model = parse_model(root, grid);
    const RiskModel coarse_model(model.drift(), model.dec(), halved(grid));
    const auto xs = points(root, "barriers", "");
    const YAML::Node tr = root["triple"];
    if (tr) allow(tr, "triple", {"times", "v"});
    const auto ss = points(tr, "times", "triple", {0, 0.25, 0.5, 1, 2, 4});
    const auto vs = points(tr, "v", "triple", {0.25, 0.5, 1});
    Table c({"x", "k", "cause_prob", "error"});
    Table tm({"x", "s", "density", "density_error", "cdf", "cdf_error"});
    Table un({"x", "v", "cdf", "error"});
    for (double x : xs) {
        const TripleLaw law(model, x), coarse(coarse_model, x);
        for (int k = 1; k <= 3; ++k) {
            const Estimate e = law.cause_prob(k);
            c << x << k << e.value << e.error;
        }
        for (double s : ss) {
            const double d = law.time_density(s), f = law.time_cdf(s);
            tm << x << s << d << std::abs(d - coarse.time_density(s)) << f << std::abs(f - coarse.time_cdf(s));
        }
        for (double v : vs) {
            const double f = law.undershoot_cdf(v);
            un << x << v << f << std::abs(f - coarse.undershoot_cdf(v));
        }
    }
    out.write("triple_cause.csv", c);
    out.write("triple_time.csv", tm);
    out.write("triple_undershoot.csv", un);
}

SimConfig parse_sim(const YAML::Node& root, unsigned threads) {
    SimConfig cfg;
    const YAML::Node n = root["simulation"];
    if (n) {
        allow(n, "simulation", {"seed", "n_paths", "horizon", "min_events"});
        cfg.seed = count(n, "seed", "simulation", cfg.seed);
        cfg.n_paths = count(n, "n_paths", "simulation", cfg.n_paths);
        cfg.horizon = num(n, "horizon", "simulation", 0.0);
        if (cfg.n_paths == 0) fail(n, "simulation.n_paths must be positive");
        if (!(cfg.horizon >= 0.0)) fail(n, "simulation.horizon must be nonnegative (0 selects the default)");
    }
    cfg.threads = threads;
    return cfg;
}

void add_summary_row(Table& t, const PassageSummary& s) {
    t << s.barrier << s.n_paths << s.n_ruined << s.n_censored << s.ruin_prob << s.ruin_se;
    for (int k = 0; k < 3; ++k) t << s.cause_prob[k] << s.cause_se[k];
}

void cmd_simulate(const YAML::Node& root, Output& out, unsigned threads) {
    const RiskModel model = parse_model(root, parse_grid(root));
    SimConfig cfg = parse_sim(root, threads);
    cfg.barriers = points(root, "barriers", "", {0.0});
    const SimResult r = simulate_first_passage(model, cfg);
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
    Table s({"x", "n_paths", "n_ruined", "n_censored", "ruin_prob", "ruin_se", "cause_1", "cause_1_se", "cause_2",
             "cause_2_se", "cause_3", "cause_3_se"});
    for (std::size_t b = 0; b < r.barriers.size(); ++b) {
        add_summary_row(s, summarize(r, b));
        Table t({"path", "tau", "g_prev", "u", "v", "y", "k", "censored"});
        for (const auto& x : r.records[b]) {
            t << x.path << x.tau;
            if (x.censored)
                t.blank().blank().blank().blank().blank() << 1;
            else
                t << x.g_prev << x.u << x.v << x.y << x.k << 0;
        }
        out.write("records_" + std::to_string(b) + ".csv", t);
    }
    out.write("simulate_summary.csv", s);
}

void cmd_asymptotics(const YAML::Node& root, Output& out, unsigned threads) {
    const RiskModel model = parse_model(root, parse_grid(root));
    const SimConfig cfg = parse_sim(root, threads);
    const auto xs = points(root, "barriers", "");
    const YAML::Node a = root["asymptotics"];
    if (a) allow(a, "asymptotics", {"w", "min_events"});
    const auto ws = points(a, "w", "asymptotics", {0, 0.25, 0.5, 1, 2, 4, 8});
    const std::size_t min_events = a ? count(a, "min_events", "asymptotics", 400) : 400;
    const AsymptoticsResult res = estimate_asymptotics(model, cfg, xs, min_events);
    out.warnings.insert(out.warnings.end(), res.warnings.begin(), res.warnings.end());
    const double shifted = std::isinf(res.alpha) ? kInf : res.alpha - 1.0;
    Table t({"x", "n_ruined", "ruin_prob", "ruin_se", "scale", "scale_error", "cause_1", "cause_1_se", "cause_2",
             "cause_2_se", "cause_3", "cause_3_se", "sup_dist", "sup_dist_shifted", "dkw_band", "low_confidence"});
    Table e({"x", "w", "survival", "survival_se", "reference", "reference_shifted"});
    for (const auto& r : res.rows) {
        const Estimate sc = mean_excess_scale(model.dec(), r.barrier);
        t << r.barrier << r.n_ruined << r.ruin_prob << r.ruin_se << sc.value << sc.error;
        for (int k = 0; k < 3; ++k) t << r.cause_frac[k] << r.cause_se[k];
        // 99% Dvoretzky-Kiefer-Wolfowitz radius of the empirical survival function
        const double band = r.n_ruined ? std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(r.n_ruined))) : kInf;
        t << r.sup_dist << r.sup_dist_shifted << band << (r.low_confidence ? 1 : 0);
        std::vector<double> sorted = r.scaled_overshoot;
        std::sort(sorted.begin(), sorted.end());
        for (double w : ws) {
            const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), w);
            const double p = sorted.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(sorted.size());
            e << r.barrier << w << p << stats::proportion_se(p, sorted.size()) << gpd_survival(w, res.alpha)
              << (shifted > 0.0 ? gpd_survival(w, shifted) : kInf);
        }
    }
    out.write("asymptotics.csv", t);
    out.write("overshoot_survival.csv", e);
}

Distribution1D parse_dist(const YAML::Node& n, const std::string& where) {
    const std::string type = text(n, "type", where);
    if (type == "expo") {
        allow(n, where, {"type", "rate", "zero_atom"});
        return Distribution1D::expo(num(n, "rate", where), num(n, "zero_atom", where, 0.0));
    }
    if (type == "normal") {
        allow(n, where, {"type", "mean", "sd", "zero_atom"});
        return Distribution1D::normal(num(n, "mean", where), num(n, "sd", where), num(n, "zero_atom", where, 0.0));
    }
    fail(n["type"], "unknown distribution type '" + type + "' (expo, normal)");
}

DistCopula parse_dist_copula(const YAML::Node& n) {
    const std::string type = text(n, "type", "rwalk.copula");
    if (type == "independence") {
        allow(n, "rwalk.copula", {"type"});
        return DistCopula::independence();
    }
    if (type == "comonotone") {
        allow(n, "rwalk.copula", {"type"});
        return DistCopula::comonotone();
    }
    if (type == "clayton") {
        allow(n, "rwalk.copula", {"type", "theta"});
        return DistCopula::clayton(num(n, "theta", "rwalk.copula"));
    }
    fail(n["type"], "unknown copula type '" + type + "' (independence, comonotone, clayton)");
}

void cmd_rwalk(const YAML::Node& root, Output& out, unsigned threads) {
    const YAML::Node n = root["rwalk"];
    if (!n) throw SchemaError("missing required key 'rwalk'", 0);
    allow(n, "rwalk", {"copula", "margins", "barriers", "u", "v", "max_index", "n_paths", "max_steps"});
    if (!n["copula"]) fail(n, "missing required key 'rwalk.copula'");
    const DistCopula cop = parse_dist_copula(n["copula"]);
    auto [a, b] = two(n, "margins", "rwalk");
    const Distribution1D f1 = parse_dist(a, "rwalk.margins[0]"), f2 = parse_dist(b, "rwalk.margins[1]");
    const GridConfig grid = parse_grid(root);
    const auto xs = points(n, "barriers", "rwalk");
    const auto us = points(n, "u", "rwalk", {0.25, 0.5, 1, 2, 4});
    const auto vs = points(n, "v", "rwalk", {0.25, 0.5, 1});
    const std::size_t jmax = count(n, "max_index", "rwalk", 10);
    const std::size_t n_paths = count(n, "n_paths", "rwalk", 0);
    const bool continuous = f1.zero_atom() == 0.0 && f2.zero_atom() == 0.0;

    if (continuous) {
        Table m({"k", "mass", "error"});
        for (int k = 3; k <= 6; ++k) m << k << increment_class_mass(cop, f1, f2, k) << 0.0;
        out.write("rw_classes.csv", m);
    }
    if (continuous && f1.positive_support() && f2.positive_support()) {
        Table ix({"x", "j", "prob", "error"});
        Table ov({"x", "u", "cdf", "error"});
        Table un({"x", "v", "cdf", "error"});
        for (double x : xs) {
            const RwQuintupleLaw law(cop, f1, f2, x, grid), coarse(cop, f1, f2, x, halved(grid));
            for (std::size_t j = 0; j <= jmax; ++j) {
                const double p = law.index_prob(j);
                ix << x << j << p << std::abs(p - coarse.index_prob(j));
            }
            for (double u : us) {
                const double p = law.overshoot_cdf(u);
                ov << x << u << p << std::abs(p - coarse.overshoot_cdf(u));
            }
            for (double v : vs) {
                const double p = law.undershoot_cdf(v);
                un << x << v << p << std::abs(p - coarse.undershoot_cdf(v));
            }
        }
        out.write("rw_index.csv", ix);
        out.write("rw_overshoot.csv", ov);
        out.write("rw_undershoot.csv", un);
    }
    if (n_paths > 0) {
        const IncrementSampler sampler(cop, f1, f2);
        RwSimConfig cfg;
        cfg.seed = parse_sim(root, threads).seed;
        cfg.n_paths = n_paths;
        cfg.max_steps = count(n, "max_steps", "rwalk", cfg.max_steps);
        cfg.threads = threads;
        Table ix({"x", "j", "freq", "se"});
        Table ov({"x", "u", "ecdf", "se"});
        Table un({"x", "v", "ecdf", "se"});
        for (double x : xs) {
            cfg.barrier = x;
            const auto recs = simulate_random_walk(sampler, cfg);
            std::vector<double> freq(jmax + 1, 0.0);
            std::size_t censored = 0;
            for (const auto& r : recs) {
                if (r.censored) {
                    ++censored;
                    continue;
                }
                if (r.prev_max_step <= jmax) freq[r.prev_max_step] += 1.0;
            }
            if (censored) out.warnings.push_back("rwalk barrier " + format_double(x) + ": " + std::to_string(censored) +
                                                 " paths censored at max_steps");
            const double total = static_cast<double>(recs.size());
            for (std::size_t j = 0; j <= jmax; ++j)
                ix << x << j << freq[j] / total << stats::proportion_se(freq[j] / total, recs.size());
            auto ecdf = [&](double w, bool over) {
                std::size_t c = 0;
                for (const auto& r : recs)
                    if (!r.censored && (over ? r.u : r.v) <= w) ++c;
                return static_cast<double>(c) / total;
            };
            for (double u : us) {
                const double p = ecdf(u, true);
                ov << x << u << p << stats::proportion_se(p, recs.size());
            }
            for (double v : vs) {
                const double p = ecdf(v, false);
                un << x << v << p << stats::proportion_se(p, recs.size());
            }
        }
        out.write("rw_sim_index.csv", ix);
        out.write("rw_sim_overshoot.csv", ov);
        out.write("rw_sim_undershoot.csv", un);
    }
}

void cmd_validate(const YAML::Node& root, Output& out) {
    const RiskModel model = parse_model(root, parse_grid(root));
    const JumpDecomposition& dec = model.dec();
    Table t({"check", "value", "error", "passed"});
    t << "mean_sum" << model.mean_sum() << dec.mean_P(1).error + dec.mean_P(2).error + dec.mean_P(3).error << 1;
    t << "drift" << model.drift() << 0.0 << 1;
    t << "lambda_sum" << (dec.finite_intensity() ? dec.lambda_sum() : kInf) << 0.0 << 1;
    for (const auto& ck : dec.closed_form_checks())
        t << "closed_form:" + ck.name << ck.max_rel_dev << 0.0 << (ck.passed ? 1 : 0);
    out.write("validate.csv", t);
}

}  // namespace

void apply_override(YAML::Node& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw SchemaError("--set expects key=value, got '" + assignment + "'", 0);
    const std::string path = assignment.substr(0, eq);
    YAML::Node value;
    try {
        value = YAML::Load(assignment.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw SchemaError("--set " + path + ": " + e.msg, 0);
    }
    std::vector<std::string> segs;
    std::stringstream ss(path);
    for (std::string s; std::getline(ss, s, '.');) {
        if (s.empty()) throw SchemaError("--set: empty key segment in '" + path + "'", 0);
        segs.push_back(s);
    }
    YAML::Node cur = root;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string& s = segs[i];
        const bool last = i + 1 == segs.size();
        YAML::Node next;
        if (cur.IsSequence()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(s);
            } catch (const std::exception&) {
                throw SchemaError("--set " + path + ": '" + s + "' is not a list index", 0);
            }
            if (idx >= cur.size()) throw SchemaError("--set " + path + ": index " + s + " out of range", 0);
            if (last) {
                cur[idx] = value;
                return;
            }
            next.reset(cur[idx]);
        } else {
            if (!cur.IsMap() && !cur.IsNull()) throw SchemaError("--set " + path + ": '" + s + "' is not a mapping", 0);
            if (last) {
                cur[s] = value;
                return;
            }
            if (!cur[s]) cur[s] = YAML::Node(YAML::NodeType::Map);
            next.reset(cur[s]);
        }
        cur.reset(next);
    }
}

std::string canonical_config(const YAML::Node& root) {
    YAML::Node copy = YAML::Clone(root);
    if (copy.IsMap()) copy.remove("output");
    YAML::Emitter e;
    e << copy;
    return std::string(e.c_str()) + "\n";
}

int run(const Options& opt, std::ostream& log) {
    const std::string source = opt.config_path.empty() ? "<config>" : opt.config_path;
    try {
        YAML::Node root;
        try {
            root = YAML::LoadFile(opt.config_path);
        } catch (const YAML::BadFile&) {
            log << source << ": cannot read config file\n";
            return 2;
        }
        if (!root.IsMap()) throw SchemaError("config must be a mapping", 1);
        for (const auto& s : opt.overrides) apply_override(root, s);
        if (opt.seed) apply_override(root, "simulation.seed=" + std::to_string(*opt.seed));

        allow(root, "config",
              {"version", "command", "model", "grid", "quad", "barriers", "z", "quintuple", "triple", "simulation",
               "asymptotics", "rwalk", "output"});
        if (!root["version"]) fail(root, "missing required key 'version'");
        if (num(root, "version", "config") != 1.0) fail(root["version"], "unsupported config version (expected 1)");
        const std::string command = text(root, "command", "config");
        std::string dir = opt.out_dir;
        if (const YAML::Node o = root["output"]) {
            allow(o, "output", {"dir"});
            if (dir.empty() && o["dir"]) dir = text(o, "dir", "output");
        }
        if (dir.empty()) dir = "out";

        Output out;
        out.dir = dir;
        fs::create_directories(out.dir);
        const unsigned threads = std::max(1u, opt.threads);
        if (command == "decompose")
            cmd_decompose(root, out);
        else if (command == "ruin")
            cmd_ruin(root, out, false);
        else if (command == "cause")
            cmd_ruin(root, out, true);
        else if (command == "quintuple")
            cmd_quintuple(root, out);
        else if (command == "triple")
            cmd_triple(root, out);
        else if (command == "simulate")
            cmd_simulate(root, out, threads);
        else if (command == "asymptotics")
            cmd_asymptotics(root, out, threads);
        else if (command == "rwalk")
            cmd_rwalk(root, out, threads);
        else if (command == "validate")
            cmd_validate(root, out);
        else
            fail(root["command"], "unknown command '" + command +
                                      "' (decompose, ruin, cause, triple, quintuple, rwalk, simulate, asymptotics, validate)");

        const std::string cfg = canonical_config(root);
        {
            std::ofstream f(out.dir / "config.yaml", std::ios::binary);
            f << cfg;
        }
        nlohmann::ordered_json m;
        m["command"] = command;
        m["config_hash"] = hex64(fnv1a(cfg));
        m["config_file"] = "config.yaml";
        m["outputs"] = out.files;
        m["warnings"] = out.warnings;
        std::ofstream f(out.dir / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
        if (!f) throw std::ios_base::failure("cannot write manifest.json");
        for (const auto& w : out.warnings) log << "warning: " << w << '\n';
        return 0;
    } catch (const SchemaError& e) {
        if (e.line() > 0)
            log << source << ":" << e.line() << ": " << e.what() << '\n';
        else
            log << source << ": " << e.what() << '\n';
        return 2;
    } catch (const YAML::Exception& e) {
        log << source << ":" << e.mark.line + 1 << ": " << e.msg << '\n';
        return 2;
    } catch (const ValidationError& e) {
        log << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        log << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const UnsupportedFamily& e) {
        log << "unsupported: " << e.what() << '\n';
        return 2;
    } catch (const QuadratureError& e) {
        log << "numeric failure (quadrature): " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        log << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Ruin and first-passage laws for bivariate Levy risk models"};
    Options opt;
    std::uint64_t seed = 0;
    app.add_option("--config", opt.config_path, "experiment config (YAML)")->required();
    app.add_option("--set", opt.overrides, "override a config value, key=value (repeatable)");
    app.add_option("--out", opt.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "simulation seed");
    app.add_option("--threads", opt.threads, "worker threads (speed only)")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (*seed_opt) opt.seed = seed;
    return run(opt, std::cerr);
}

}  // namespace levyruin::cli
