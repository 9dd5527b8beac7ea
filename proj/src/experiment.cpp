#include "ucs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ucs/empirical.hpp"
#include "ucs/lz.hpp"
#include "ucs/rng.hpp"

namespace ucs {

namespace {

[[noreturn]] void config_error(const std::string& what) {
    throw std::invalid_argument("configuration: " + what);
}

double number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

Json to_json(const ContinuousComponent& fc) {
    if (fc.kind() == ContinuousComponent::Kind::uniform) {
        return {{"kind", "uniform"}, {"lo", fc.lo()}, {"hi", fc.hi()}};
    }
    return {{"kind", "truncated_gaussian"}, {"mean", fc.location()}, {"sd", fc.scale()},
            {"lo", fc.lo()}, {"hi", fc.hi()}};
}

ContinuousComponent continuous_from_json(const Json& j) {
    const std::string kind = j.value("kind", "uniform");
    const double lo = number_or(j, "lo", 0.0);
    const double hi = number_or(j, "hi", 1.0);
    if (kind == "uniform") return ContinuousComponent::uniform(lo, hi);
    if (kind == "truncated_gaussian") {
        return ContinuousComponent::truncated_gaussian(j.at("mean").get<double>(), j.at("sd").get<double>(), lo, hi);
    }
    config_error("unknown continuous component kind '" + kind + "'");
}

Json to_json(const SourceSpec& spec) {
    Json j;
    j["model"] = model_name(spec.model);
    j["seed"] = spec.seed;
    std::visit(
        [&](const auto& m) {
            j["p"] = m.p;
            j["fc"] = to_json(m.fc);
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, ArMarkov>) j["coeffs"] = m.coeffs;
            if constexpr (std::is_same_v<M, MovingAverage>) j["window"] = m.window;
        },
        spec.model);
    return j;
}

SourceSpec source_from_json(const Json& j) {
    const std::string model = j.at("model").get<std::string>();
    const double p = j.at("p").get<double>();
    const ContinuousComponent fc =
        j.contains("fc") ? continuous_from_json(j.at("fc")) : ContinuousComponent::uniform(0.0, 1.0);
    SourceSpec spec{IidMixture{p, fc}, j.value("seed", std::uint64_t{0})};
    if (model == "iid_mixture") {
        spec.model = IidMixture{p, fc};
    } else if (model == "piecewise_markov") {
        spec.model = PiecewiseMarkov{p, fc};
    } else if (model == "ar_markov") {
        spec.model = ArMarkov{j.at("coeffs").get<std::vector<double>>(), p, fc};
    } else if (model == "moving_average") {
        spec.model = MovingAverage{j.at("window").get<unsigned>(), p, fc};
    } else {
        config_error("unknown source model '" + model + "'");
    }
    validate(spec);
    return spec;
}

Json to_json(const NoiseSpec& noise) {
    switch (noise.kind) {
        case NoiseSpec::Kind::none: return {{"kind", "none"}};
        case NoiseSpec::Kind::gaussian: return {{"kind", "gaussian"}, {"sd", noise.level}};
        case NoiseSpec::Kind::fixed_norm: return {{"kind", "fixed_norm"}, {"c", noise.level}};
    }
    return {};
}

NoiseSpec noise_from_json(const Json& j) {
    const std::string kind = j.value("kind", "none");
    if (kind == "none") return NoiseSpec::none();
    if (kind == "gaussian") return NoiseSpec::gaussian(j.at("sd").get<double>());
    if (kind == "fixed_norm") return NoiseSpec::fixed_norm(j.at("c").get<double>());
    config_error("unknown noise kind '" + kind + "'");
}

Json to_json(const DecoderConfig& cfg) {
    return {{"b", cfg.b.bits()},         {"k", cfg.k},
            {"lambda", cfg.lambda},      {"r", cfg.r},
            {"sweeps", cfg.sweeps},      {"restarts", cfg.restarts},
            {"t0", cfg.schedule.initial}, {"decay", cfg.schedule.decay},
            {"seed", cfg.seed}};
}

DecoderConfig decoder_from_json(const Json& j, DecoderConfig base) {
    if (!j.is_object()) config_error("decoder section must be an object");
    if (j.contains("b")) base.b = Resolution(j.at("b").get<unsigned>());
    if (j.contains("k")) base.k = j.at("k").get<std::size_t>();
    if (j.contains("lambda")) base.lambda = j.at("lambda").get<double>();
    if (j.contains("r")) base.r = j.at("r").get<double>();
    if (j.contains("sweeps")) base.sweeps = j.at("sweeps").get<std::size_t>();
    if (j.contains("restarts")) base.restarts = j.at("restarts").get<std::size_t>();
    if (j.contains("t0")) base.schedule.initial = j.at("t0").get<double>();
    if (j.contains("decay")) base.schedule.decay = j.at("decay").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    base.validate();
    return base;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

NoiseSpec NoisePlan::resolve(std::size_t m, double r) const {
    switch (kind) {
        case Kind::none: return NoiseSpec::none();
        case Kind::gaussian: return NoiseSpec::gaussian(level);
        case Kind::fixed_norm: return NoiseSpec::fixed_norm(level);
        case Kind::scaled_fixed_norm: {
            const double md = static_cast<double>(m);
            const double lg = std::log2(md);
            // log2 m is 0 at m = 1; use no noise there rather than dividing by zero.
            if (lg <= 0.0) return NoiseSpec::fixed_norm(0.0);
            return NoiseSpec::fixed_norm(level * md / std::pow(lg, 2.0 * r));
        }
    }
    return NoiseSpec::none();
}

NoisePlan noise_plan_from_json(const Json& j) {
    const std::string kind = j.value("kind", "none");
    if (kind == "none") return {};
    if (kind == "gaussian") return {NoisePlan::Kind::gaussian, j.at("sd").get<double>()};
    if (kind == "fixed_norm") return {NoisePlan::Kind::fixed_norm, j.at("c").get<double>()};
    if (kind == "scaled_fixed_norm") return {NoisePlan::Kind::scaled_fixed_norm, j.at("scale").get<double>()};
    config_error("unknown noise kind '" + kind + "'");
}

void ExperimentPlan::validate() const {
    if (trials < 1) config_error("trials must be >= 1");
    if (n_grid.empty()) config_error("n_grid must be non-empty");
    if (m_grid.empty() && (delta_grid.empty() || !d_o)) {
        config_error("m_grid must list counts, or rates with d_o");
    }
    for (auto n : n_grid) {
        if (n < 2) config_error("every n must be >= 2");
    }
    for (auto m : m_grid) {
        if (m < 1) config_error("every m must be >= 1");
    }
}

ExperimentPlan plan_from_json(const Json& j) {
    ExperimentPlan plan;
    plan.source = source_from_json(j.at("source"));
    plan.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    const Json& mg = j.at("m_grid");
    if (mg.is_array()) {
        plan.m_grid = mg.get<std::vector<std::size_t>>();
    } else {
        plan.d_o = mg.at("d_o").get<double>();
        plan.delta_grid = mg.at("delta").get<std::vector<double>>();
    }
    plan.r = number_or(j, "r", plan.r);
    plan.delta = number_or(j, "delta", plan.delta);
    if (j.contains("decoder")) plan.decoder_overrides = j.at("decoder");
    plan.trials = j.value("trials", std::size_t{1});
    plan.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("noise")) plan.noise = noise_plan_from_json(j.at("noise"));
    plan.output_path = j.value("output", std::string{});
    plan.validate();
    return plan;
}

const char* const result_csv_header =
    "n,m,b,k,lambda,seed,trial,normalized_error,entropy_term,residual_term,wall_time_ms,"
    "id_estimate_of_source,error";

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << result_csv_header << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << r.m << ',' << r.b << ',' << r.k << ',' << format_real(r.lambda) << ','
            << r.seed << ',' << r.trial << ',' << format_optional(r.normalized_error) << ','
            << format_real(r.entropy_term) << ',' << format_real(r.residual_term) << ','
            << format_real(r.wall_time_ms) << ',' << format_optional(r.id_estimate_of_source) << ','
            << csv_escape(r.error) << '\n';
    }
}

void write_result_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_result_csv(out, rows);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

TrialSeeds trial_seeds(std::uint64_t plan_seed, std::size_t trial) {
    const std::uint64_t t = derive_seed(plan_seed, trial);
    return {derive_seed(t, 1), derive_seed(t, 2), derive_seed(t, 3), derive_seed(t, 4)};
}

ResultRow decode_row(const MeasurementSet& ms, const DecoderConfig& cfg,
                     std::optional<std::span<const double>> truth, std::size_t trial,
                     std::optional<RecoveryResult>* full) {
    ResultRow row;
    row.n = static_cast<std::size_t>(ms.n());
    row.m = static_cast<std::size_t>(ms.m());
    row.b = cfg.b.bits();
    row.k = cfg.k;
    row.lambda = cfg.lambda;
    row.seed = cfg.seed;
    row.trial = trial;
    const auto start = std::chrono::steady_clock::now();
    const RecoveryResult res = anneal_decode(ms, cfg, truth);
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.normalized_error = res.normalized_error;
    row.entropy_term = res.entropy_term;
    row.residual_term = res.residual_term;
    if (truth) row.id_estimate_of_source = id_estimate(*truth, cfg.b, cfg.k);
    if (full) *full = res;
    return row;
}

std::vector<std::size_t> plan_m_values(const ExperimentPlan& plan, std::size_t n) {
    if (!plan.m_grid.empty()) return plan.m_grid;
    std::vector<std::size_t> ms;
    for (double delta : plan.delta_grid) ms.push_back(measurement_count(n, *plan.d_o, delta).m);
    return ms;
}

ResultRow run_cell(const ExperimentPlan& plan, std::size_t n, std::size_t m, std::size_t trial) {
    const TrialSeeds seeds = trial_seeds(plan.seed, trial);
    ResultRow row;
    row.n = n;
    row.m = m;
    row.trial = trial;
    row.seed = seeds.decoder;
    try {
        DecoderConfig base;
        if (n >= 16) base = parameter_defaults(n, plan.r, plan.delta).config;
        base.r = plan.r;
        base.seed = seeds.decoder;
        const DecoderConfig cfg = decoder_from_json(plan.decoder_overrides, base);
        row.b = cfg.b.bits();
        row.k = cfg.k;
        row.lambda = cfg.lambda;

        SourceSpec spec = plan.source;
        spec.seed = seeds.source;
        const RealSignal x = generate(spec, n);
        const MeasurementSet ms =
            make_measurements(x, m, seeds.matrix, plan.noise.resolve(m, cfg.r), seeds.noise);
        row = decode_row(ms, cfg, std::span<const double>(x), trial);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<ResultRow> rows;
    for (std::size_t n : plan.n_grid) {
        for (std::size_t m : plan_m_values(plan, n)) {
            for (std::size_t t = 0; t < plan.trials; ++t) rows.push_back(run_cell(plan, n, m, t));
        }
    }
    return rows;
}

LzCheckReport& merge_into(LzCheckReport& into, const LzCheckReport& other) {
    const std::size_t a = into.checked - into.not_applicable;
    const std::size_t b = other.checked - other.not_applicable;
    if (b > 0) {
        if (a == 0) {
            into.min_margin = other.min_margin;
            into.max_margin = other.max_margin;
            into.mean_margin = other.mean_margin;
        } else {
            into.min_margin = std::min(into.min_margin, other.min_margin);
            into.max_margin = std::max(into.max_margin, other.max_margin);
            into.mean_margin = (into.mean_margin * static_cast<double>(a) +
                                other.mean_margin * static_cast<double>(b)) /
                               static_cast<double>(a + b);
        }
    }
    into.checked += other.checked;
    into.violations += other.violations;
    into.not_applicable += other.not_applicable;
    return into;
}

LzCheckReport run_lz_check(const SourceSpec& spec, std::size_t n, Resolution b, std::size_t k,
                           std::size_t trials) {
    LzCheckReport report;
    double sum = 0.0;
    std::size_t applicable = 0;
    report.min_margin = std::numeric_limits<double>::infinity();
    report.max_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        SourceSpec s = spec;
        s.seed = derive_seed(spec.seed, t);
        const auto check = check_lz_bound(quantize_signal(generate(s, n), b), k);
        ++report.checked;
        if (!check.applicable) {
            ++report.not_applicable;
            continue;
        }
        ++applicable;
        if (!check.holds) ++report.violations;
        const double margin = check.rhs - check.lhs;
        sum += margin;
        report.min_margin = std::min(report.min_margin, margin);
        report.max_margin = std::max(report.max_margin, margin);
    }
    if (applicable == 0) {
        report.min_margin = report.max_margin = 0.0;
    } else {
        report.mean_margin = sum / static_cast<double>(applicable);
    }
    return report;
}

}  // namespace ucs
