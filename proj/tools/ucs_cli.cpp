#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ucs/baseline.hpp"
#include "ucs/decoder.hpp"
#include "ucs/empirical.hpp"
#include "ucs/experiment.hpp"
#include "ucs/lz.hpp"
#include "ucs/rng.hpp"
#include "ucs/sensing.hpp"
#include "ucs/signal_io.hpp"
#include "ucs/sources.hpp"

namespace fs = std::filesystem;
using namespace ucs;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;
constexpr int exit_violation = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --noise grammar: none | gaussian:SD | fixed:C | scaled:S (c = S m / (log2 m)^{2r}).
NoisePlan parse_noise(const std::string& text) {
    if (text.empty() || text == "none") return {};
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("bad --noise '" + text + "'");
    const std::string kind = text.substr(0, colon);
    double level = 0.0;
    try {
        level = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("bad --noise level in '" + text + "'");
    }
    if (level < 0.0) throw UsageError("--noise level must be >= 0");
    if (kind == "gaussian") return {NoisePlan::Kind::gaussian, level};
    if (kind == "fixed") return {NoisePlan::Kind::fixed_norm, level};
    if (kind == "scaled") return {NoisePlan::Kind::scaled_fixed_norm, level};
    throw UsageError("unknown --noise kind '" + kind + "'");
}

SourceSpec load_source(const std::string& path) {
    if (path.empty()) throw UsageError("--config <source.json> is required");
    return source_from_json(read_json_file(path));
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

// Shared decoder flags. Unset values fall back to parameter_defaults.
struct DecoderFlags {
    std::optional<unsigned> b;
    std::optional<std::size_t> k;
    std::optional<double> lambda;
    std::optional<std::size_t> sweeps;
    std::optional<std::size_t> restarts;
    double r = 1.5;
    double delta = 1.0;
    std::string overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--b", b, "bits per sample");
        cmd->add_option("--k", k, "context order");
        cmd->add_option("--lambda", lambda, "Lagrangian weight");
        cmd->add_option("--sweeps", sweeps, "annealing sweeps per restart");
        cmd->add_option("--restarts", restarts, "independent annealing chains");
        cmd->add_option("--r", r, "schedule exponent for the defaults (> 1)");
        cmd->add_option("--delta", delta, "oversampling margin for the defaults");
        cmd->add_option("--decoder", overrides, "JSON file with decoder overrides");
    }

    DecoderConfig resolve(std::size_t n, std::uint64_t seed) const {
        DecoderConfig cfg;
        if (n >= 16) cfg = parameter_defaults(n, r, delta).config;
        cfg.r = r;
        cfg.seed = seed;
        if (!overrides.empty()) cfg = decoder_from_json(read_json_file(overrides), cfg);
        if (b) cfg.b = Resolution(*b);
        if (k) cfg.k = *k;
        if (lambda) cfg.lambda = *lambda;
        if (sweeps) cfg.sweeps = *sweeps;
        if (restarts) cfg.restarts = *restarts;
        cfg.validate();
        return cfg;
    }
};

// A measurement set either read from a measurement file and its sidecar or
// synthesized from a source spec.
struct Instance {
    MeasurementSet ms;
    std::optional<RealSignal> truth;
};

Instance load_instance(const std::string& measurements, const std::string& truth_path,
                       const std::string& config, std::size_t n, std::size_t m, std::uint64_t seed,
                       const NoisePlan& noise, double r) {
    Instance inst;
    if (!measurements.empty()) {
        const Json meta = Json::parse(read_sidecar(measurements));
        const auto mm = meta.at("m").get<std::size_t>();
        const auto nn = meta.at("n").get<std::size_t>();
        const RealSignal y = read_signal(measurements);
        if (y.size() != mm) throw std::runtime_error(measurements + ": expected " + std::to_string(mm) + " values");
        inst.ms.matrix_seed = meta.at("matrix_seed").get<std::uint64_t>();
        inst.ms.A = gaussian_matrix(mm, nn, inst.ms.matrix_seed);
        inst.ms.y = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
        if (meta.contains("noise")) inst.ms.noise = noise_from_json(meta.at("noise"));
        if (!truth_path.empty()) inst.truth = read_signal(truth_path);
        return inst;
    }
    if (n == 0 || m == 0) throw UsageError("need --measurements, or --config with --n and --m");
    SourceSpec spec = load_source(config);
    const TrialSeeds seeds = trial_seeds(seed, 0);
    spec.seed = seeds.source;
    inst.truth = generate(spec, n);
    inst.ms = make_measurements(*inst.truth, m, seeds.matrix, noise.resolve(m, r), seeds.noise);
    return inst;
}

int cmd_generate(const std::string& config, std::size_t n, std::optional<std::uint64_t> seed,
                 const std::string& out) {
    if (n == 0) throw UsageError("--n must be positive");
    if (out.empty()) throw UsageError("--out is required");
    SourceSpec spec = load_source(config);
    if (seed) spec.seed = *seed;
    const RealSignal x = generate(spec, n);
    write_signal(out, x);
    Json meta = {{"kind", "signal"}, {"n", n}, {"source", to_json(spec)}, {"rng", std::string(Rng::name)}};
    write_sidecar(out, meta.dump(2));
    return exit_ok;
}

int cmd_estimate_id(const std::string& signal, const std::vector<unsigned>& b_grid, std::size_t k,
                    const std::string& reference) {
    if (signal.empty()) throw UsageError("--signal is required");
    const RealSignal x = read_signal(signal);
    std::optional<ReferenceId> ref;
    if (!reference.empty()) ref = reference_id(load_source(reference));
    std::cout << "b,k,id_estimate";
    if (ref) std::cout << ",reference_id,gap,reference_is_upper_bound";
    std::cout << '\n';
    for (unsigned b : b_grid) {
        const double est = id_estimate(x, Resolution(b), k);
        std::printf("%u,%zu,%.6f", b, k, est);
        if (ref) std::printf(",%.6f,%.6f,%d", ref->value, est - ref->value, ref->upper_bound ? 1 : 0);
        std::printf("\n");
    }
    return exit_ok;
}

int cmd_measure(const std::string& signal, std::size_t m, std::uint64_t seed, const NoisePlan& noise_plan,
                double r, const std::string& out, const std::string& matrix_out) {
    if (signal.empty() || out.empty()) throw UsageError("--signal and --out are required");
    if (m == 0) throw UsageError("--m must be positive");
    const RealSignal x = read_signal(signal);
    const std::uint64_t noise_seed = derive_seed(seed, 1);
    const NoiseSpec noise = noise_plan.resolve(m, r);
    const MeasurementSet ms = make_measurements(x, m, seed, noise, noise_seed);
    write_signal(out, std::span<const double>(ms.y.data(), static_cast<std::size_t>(ms.y.size())));
    Json meta = {{"kind", "measurements"}, {"m", m},
                 {"n", x.size()},          {"matrix_seed", seed},
                 {"noise", to_json(noise)}, {"noise_seed", noise_seed},
                 {"signal", signal},       {"rng", std::string(Rng::name)}};
    write_sidecar(out, meta.dump(2));
    if (!matrix_out.empty()) write_matrix_binary(ms.A, matrix_out);
    return exit_ok;
}

int cmd_decode(const Instance& inst, const DecoderConfig& cfg, const std::string& out, const std::string& xhat_out) {
    std::optional<std::span<const double>> truth;
    if (inst.truth) {
        if (static_cast<Eigen::Index>(inst.truth->size()) != inst.ms.n()) {
            throw std::runtime_error("ground truth length does not match n");
        }
        truth = std::span<const double>(*inst.truth);
    }
    std::optional<RecoveryResult> res;
    const ResultRow row = decode_row(inst.ms, cfg, truth, 0, &res);
    std::ostringstream csv;
    write_result_csv(csv, {row});
    write_text(out, csv.str());
    if (!xhat_out.empty()) write_signal(xhat_out, res->x_hat);
    return exit_ok;
}

int cmd_l1_baseline(const Instance& inst, const IstaConfig& cfg, const std::string& xhat_out) {
    const RealSignal x_hat = ista_decode(inst.ms, cfg);
    std::printf("method,n,m,normalized_error\n");
    std::printf("ista_l1_baseline,%td,%td,", inst.ms.n(), inst.ms.m());
    if (inst.truth) {
        std::printf("%.6f\n", recovery_error(*inst.truth, x_hat));
    } else {
        std::printf("\n");
    }
    if (!xhat_out.empty()) write_signal(xhat_out, x_hat);
    return exit_ok;
}

int cmd_experiment(const std::string& plan_path, const std::string& out) {
    if (plan_path.empty()) throw UsageError("--plan is required");
    const ExperimentPlan plan = plan_from_json(read_json_file(plan_path));
    const std::vector<ResultRow> rows = run_experiment(plan);
    const std::string target = out.empty() ? plan.output_path : out;
    if (target.empty() || target == "-") {
        write_result_csv(std::cout, rows);
    } else {
        write_result_csv(fs::path(target), rows);
    }
    std::size_t failed = 0;
    for (const auto& row : rows) failed += row.error.empty() ? 0 : 1;
    if (failed > 0) std::cerr << failed << " of " << rows.size() << " cells failed; see the error column\n";
    return exit_ok;
}

std::vector<SourceSpec> fixture_sources(std::uint64_t seed) {
    const auto u = ContinuousComponent::uniform(0.0, 1.0);
    return {{IidMixture{0.3, u}, derive_seed(seed, 1)},
            {PiecewiseMarkov{0.05, u}, derive_seed(seed, 2)},
            {ArMarkov{{0.3, 0.2}, 0.4, ContinuousComponent::uniform(0.0, 0.5)}, derive_seed(seed, 3)},
            {MovingAverage{4, 0.1, u}, derive_seed(seed, 4)}};
}

int cmd_lz_check(const std::string& config, std::size_t n, const std::vector<unsigned>& b_grid,
                 const std::vector<std::size_t>& k_grid, std::size_t trials, std::uint64_t seed) {
    if (n < 2) throw UsageError("--n must be >= 2");
    std::vector<SourceSpec> sources;
    if (config.empty()) {
        sources = fixture_sources(seed);
    } else {
        sources.push_back(load_source(config));
    }
    LzCheckReport total;
    std::printf("model,b,k,checked,violations,not_applicable,min_margin,mean_margin,max_margin\n");
    for (const auto& spec : sources) {
        for (unsigned b : b_grid) {
            for (std::size_t k : k_grid) {
                const LzCheckReport rep = run_lz_check(spec, n, Resolution(b), k, trials);
                std::printf("%s,%u,%zu,%zu,%zu,%zu,%.6f,%.6f,%.6f\n", model_name(spec.model).c_str(), b, k,
                            rep.checked, rep.violations, rep.not_applicable, rep.min_margin, rep.mean_margin,
                            rep.max_margin);
                merge_into(total, rep);
            }
        }
    }
    std::printf("total,,,%zu,%zu,%zu,%.6f,%.6f,%.6f\n", total.checked, total.violations, total.not_applicable,
                total.min_margin, total.mean_margin, total.max_margin);
    return total.violations == 0 ? exit_ok : exit_violation;
}

int cmd_chi2_check(const std::vector<std::size_t>& m_grid, const std::vector<double>& tau_grid,
                   std::size_t draws, std::uint64_t seed) {
    bool ok = true;
    std::uint64_t stream = 0;
    std::printf("m,tau,lower_bound,lower_empirical,upper_bound,upper_empirical,ok\n");
    for (std::size_t m : m_grid) {
        for (double tau : tau_grid) {
            const Chi2TailBounds bounds = chi2_tail_bounds(m, tau);
            const Chi2Empirical emp = chi2_empirical_tails(m, tau, draws, derive_seed(seed, stream++));
            const bool cell_ok = emp.lower_tail <= bounds.lower_tail_bound && emp.upper_tail <= bounds.upper_tail_bound;
            ok = ok && cell_ok;
            std::printf("%zu,%.3f,%.6g,%.6g,%.6g,%.6g,%d\n", m, tau, bounds.lower_tail_bound, emp.lower_tail,
                        bounds.upper_tail_bound, emp.upper_tail, cell_ok ? 1 : 0);
        }
    }
    return ok ? exit_ok : exit_violation;
}

int cmd_defaults(std::size_t n, double r, double delta, std::optional<double> d_o) {
    const DecoderDefaults d = parameter_defaults(n, r, delta, d_o);
    Json j = to_json(d.config);
    j["n"] = n;
    j["delta"] = delta;
    if (d.m) {
        j["m"] = *d.m;
        j["m_floor_used"] = d.m_floor_used;
    }
    std::cout << j.dump(2) << '\n';
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Universal compressed sensing: ID estimation and minimum-entropy recovery"};
    app.require_subcommand(1);

    std::string config, signal, reference, out, plan, measurements, truth, noise_text, matrix_out, xhat_out;
    std::optional<std::uint64_t> seed;
    std::size_t n = 0, m = 0, trials = 10, draws = 100000;
    std::size_t k = 0;
    double r = 1.5, delta = 1.0;
    std::optional<double> d_o;
    std::vector<unsigned> b_grid{4, 6, 8, 10};
    std::vector<std::size_t> k_grid{1, 2};
    std::vector<std::size_t> m_grid{10, 100, 1000};
    std::vector<double> tau_grid{0.1, 0.3, 0.5};
    IstaConfig ista;
    DecoderFlags dec;

    auto* gen = app.add_subcommand("generate", "write a source realization and its sidecar");
    gen->add_option("--config", config, "source JSON")->required();
    gen->add_option("--n", n, "length")->required();
    gen->add_option("--seed", seed, "overrides the seed in the source JSON");
    gen->add_option("--out", out, "output signal file")->required();

    auto* est = app.add_subcommand("estimate-id", "information-dimension estimates of a signal file");
    est->add_option("--signal", signal, "signal file")->required();
    est->add_option("--b", b_grid, "resolutions")->delimiter(',');
    est->add_option("--k", k, "context order");
    est->add_option("--reference", reference, "source JSON with the reference ID");

    auto* meas = app.add_subcommand("measure", "Gaussian measurements of a signal file");
    meas->add_option("--signal", signal, "signal file")->required();
    meas->add_option("--m", m, "measurement count")->required();
    meas->add_option("--seed", seed, "matrix seed");
    meas->add_option("--noise", noise_text, "none | gaussian:SD | fixed:C | scaled:S");
    meas->add_option("--r", r, "exponent used by scaled noise");
    meas->add_option("--out", out, "output measurement file")->required();
    meas->add_option("--matrix-out", matrix_out, "optional binary dump of A");

    auto add_instance_flags = [&](CLI::App* cmd) {
        cmd->add_option("--measurements", measurements, "measurement file (with sidecar)");
        cmd->add_option("--signal", truth, "ground-truth signal for the error column");
        cmd->add_option("--config", config, "source JSON to synthesize an instance");
        cmd->add_option("--n", n, "length of the synthesized signal");
        cmd->add_option("--m", m, "measurement count of the synthesized instance");
        cmd->add_option("--seed", seed, "instance and decoder seed");
        cmd->add_option("--noise", noise_text, "none | gaussian:SD | fixed:C | scaled:S");
        cmd->add_option("--xhat-out", xhat_out, "write the reconstruction here");
    };

    auto* dcd = app.add_subcommand("decode", "Lagrangian minimum-entropy decode; writes a CSV row");
    add_instance_flags(dcd);
    dec.attach(dcd);
    dcd->add_option("--out", out, "CSV output (default stdout)");

    auto* l1 = app.add_subcommand("l1-baseline", "iterative soft-thresholding baseline (not an entropy decoder)");
    add_instance_flags(l1);
    l1->add_option("--mu", ista.mu, "l1 weight relative to ||A^T y||_inf");
    l1->add_option("--iterations", ista.iterations, "iterations");

    auto* exp = app.add_subcommand("experiment", "run an experiment plan and write result CSV");
    exp->add_option("--plan", plan, "plan JSON")->required();
    exp->add_option("--out", out, "CSV output (overrides the plan)");

    auto* lzc = app.add_subcommand("lz-check", "check the LZ code-length bound over generated sequences");
    lzc->add_option("--config", config, "source JSON (default: the four fixture sources)");
    lzc->add_option("--n", n, "length")->required();
    lzc->add_option("--b", b_grid, "resolutions")->delimiter(',');
    lzc->add_option("--k", k_grid, "context orders")->delimiter(',');
    lzc->add_option("--trials", trials, "realizations per (source, b, k)");
    lzc->add_option("--seed", seed, "base seed for the fixture sources");

    auto* chi = app.add_subcommand("chi2-check", "Monte-Carlo chi-square tails against the analytic bounds");
    chi->add_option("--m", m_grid, "degrees of freedom")->delimiter(',');
    chi->add_option("--tau", tau_grid, "relative deviations in (0, 1)")->delimiter(',');
    chi->add_option("--draws", draws, "Monte-Carlo draws per cell");
    chi->add_option("--seed", seed, "seed");

    auto* def = app.add_subcommand("defaults", "print the parameter defaults for length n");
    def->add_option("--n", n, "length (>= 16)")->required();
    def->add_option("--r", r, "schedule exponent (> 1)");
    def->add_option("--delta", delta, "oversampling margin (> 0)");
    def->add_option("--d-o", d_o, "information-dimension hint; adds m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*gen) return cmd_generate(config, n, seed, out);
        if (*est) return cmd_estimate_id(signal, b_grid, k, reference);
        if (*meas) return cmd_measure(signal, m, seed.value_or(0), parse_noise(noise_text), r, out, matrix_out);
        if (*dcd || *l1) {
            const NoisePlan noise = parse_noise(noise_text);
            const Instance inst = load_instance(measurements, truth, config, n, m, seed.value_or(0), noise, dec.r);
            if (*l1) return cmd_l1_baseline(inst, ista, xhat_out);
            const DecoderConfig cfg =
                dec.resolve(static_cast<std::size_t>(inst.ms.n()), trial_seeds(seed.value_or(0), 0).decoder);
            return cmd_decode(inst, cfg, out, xhat_out);
        }
        if (*exp) return cmd_experiment(plan, out);
        if (*lzc) return cmd_lz_check(config, n, b_grid, k_grid, trials, seed.value_or(0));
        if (*chi) return cmd_chi2_check(m_grid, tau_grid, draws, seed.value_or(0));
        if (*def) return cmd_defaults(n, r, delta, d_o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
