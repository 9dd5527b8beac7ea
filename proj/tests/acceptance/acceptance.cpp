// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "ucs/decoder.hpp"
#include "ucs/empirical.hpp"
#include "ucs/experiment.hpp"
#include "ucs/lz.hpp"
#include "ucs/rng.hpp"
#include "ucs/sensing.hpp"
#include "ucs/sources.hpp"

using namespace ucs;

namespace {

constexpr std::uint64_t plan_seed = 42;
const ContinuousComponent unit = ContinuousComponent::uniform(0.0, 1.0);

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome id_memoryless() {
    const double p = 0.3;
    const auto x = generate({IidMixture{p, unit}, derive_seed(plan_seed, 1)}, std::size_t{1} << 17);
    bool ok = true;
    std::string detail;
    double at10 = 0.0;
    for (unsigned b : {4u, 6u, 8u, 10u}) {
        const double est = id_estimate(x, Resolution(b), 0);
        const double ref = oracle::mixture_quantized_entropy(p, b) / b;
        ok = ok && std::abs(est - ref) <= 0.03;
        detail += "b=" + std::to_string(b) + " est " + fmt("%.4f", est) + " ref " + fmt("%.4f", ref) + "; ";
        if (b == 10) at10 = est;
    }
    ok = ok && std::abs(at10 - p) <= 0.12;
    return {ok, detail + "|est10 - p| = " + fmt("%.4f", std::abs(at10 - p))};
}

Outcome id_piecewise() {
    const double p = 0.05;
    const unsigned b = 8;
    const auto x = generate({PiecewiseMarkov{p, unit}, derive_seed(plan_seed, 2)}, std::size_t{1} << 17);
    const double est = id_estimate(x, Resolution(b), 1);
    const double ref = oracle::piecewise_conditional_entropy(p, b, [](double) { return 1.0; }) / b;
    return {std::abs(est - ref) <= 0.04, "est " + fmt("%.4f", est) + " ref " + fmt("%.4f", ref)};
}

Outcome oracle_equivalence() {
    int hits = 0, below = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto seeds = trial_seeds(plan_seed, t);
        const auto x = generate({PiecewiseMarkov{0.2, unit}, seeds.source}, 10);
        const auto ms = make_measurements(x, 6, seeds.matrix);
        DecoderConfig cfg;
        cfg.b = Resolution(1);
        cfg.k = 1;
        cfg.lambda = std::pow(std::log2(10.0), 3.0);
        cfg.sweeps = 2000;
        cfg.restarts = 10;
        // Same end temperature as the default 400-sweep schedule.
        cfg.schedule.decay = std::pow(0.97, 400.0 / 2000.0);
        cfg.seed = seeds.decoder;
        const auto best = oracle::lagrangian_min(ms.A, ms.y, 1, 1, cfg.lambda);
        const double got = anneal_decode(ms, cfg).final_cost;
        hits += std::abs(got - best.cost) <= 1e-9;
        below += got < best.cost - 1e-9;
    }
    return {hits >= 9 && below == 0,
            std::to_string(hits) + "/10 at the exhaustive minimum, " + std::to_string(below) +
                " below it (decay " + fmt("%.5f", std::pow(0.97, 400.0 / 2000.0)) + ")"};
}

ExperimentPlan recovery_plan() {
    ExperimentPlan plan;
    plan.source = {PiecewiseMarkov{0.05, unit}, 0};
    plan.n_grid = {256};
    plan.m_grid = {16, 64};
    plan.r = 4.0 / 3.0;
    plan.delta = 4.0;
    plan.trials = 10;
    plan.seed = plan_seed;
    return plan;
}

double median_error(const std::vector<ResultRow>& rows, std::size_t m, bool& failed) {
    std::vector<double> errs;
    for (const auto& r : rows) {
        if (r.m != m) continue;
        if (!r.error.empty() || !r.normalized_error) {
            failed = true;
            continue;
        }
        errs.push_back(*r.normalized_error);
    }
    return errs.empty() ? INFINITY : oracle::median(errs);
}

double noiseless_median_64 = INFINITY;

Outcome recovery() {
    const auto plan = recovery_plan();
    const auto rows = run_experiment(plan);
    bool failed = false;
    const double m16 = median_error(rows, 16, failed);
    const double m64 = median_error(rows, 64, failed);
    noiseless_median_64 = m64;
    const bool defaults_ok = !rows.empty() && rows.front().b == 4 && rows.front().k == 1;
    return {!failed && defaults_ok && m64 <= 0.05 && m64 < m16,
            "median m=64 " + fmt("%.4f", m64) + ", m=16 " + fmt("%.4f", m16) +
                ", b=" + std::to_string(rows.front().b) + " k=" + std::to_string(rows.front().k) +
                " lambda=" + fmt("%.1f", rows.front().lambda)};
}

Outcome noise_robustness() {
    auto plan = recovery_plan();
    plan.m_grid = {64};
    plan.noise = {NoisePlan::Kind::scaled_fixed_norm, 1e-2};
    const auto rows = run_experiment(plan);
    bool failed = false;
    const double med = median_error(rows, 64, failed);
    const double c = plan.noise.resolve(64, plan.r).level;
    return {!failed && med <= 2.0 * noiseless_median_64,
            "noisy median " + fmt("%.4f", med) + " vs noiseless " + fmt("%.4f", noiseless_median_64) +
                " (c = " + fmt("%.5f", c) + ")"};
}

Outcome lz_bound() {
    const std::vector<SourceSpec> fixtures{{IidMixture{0.3, unit}, 0},
                                           {PiecewiseMarkov{0.05, unit}, 0},
                                           {ArMarkov{{0.3, 0.2}, 0.4, ContinuousComponent::uniform(0.0, 0.5)}, 0},
                                           {MovingAverage{4, 0.1, unit}, 0}};
    const std::size_t n = std::size_t{1} << 16;
    std::size_t sequences = 0, checks = 0, violations = 0, not_applicable = 0;
    double min_margin = INFINITY;
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        for (std::size_t t = 0; t < 250; ++t) {
            SourceSpec spec = fixtures[f];
            spec.seed = derive_seed(derive_seed(plan_seed, 600 + f), t);
            const auto x = generate(spec, n);
            ++sequences;
            for (unsigned b : {1u, 2u, 4u}) {
                const auto z = quantize_signal(x, Resolution(b));
                for (std::size_t k : {1u, 2u}) {
                    const auto r = check_lz_bound(z, k);
                    ++checks;
                    if (!r.applicable) {
                        ++not_applicable;
                        continue;
                    }
                    violations += !r.holds;
                    min_margin = std::min(min_margin, r.rhs - r.lhs);
                }
            }
        }
    }
    return {violations == 0, std::to_string(sequences) + " sequences, " + std::to_string(checks) + " checks, " +
                                 std::to_string(violations) + " violations, " + std::to_string(not_applicable) +
                                 " not applicable (vacuous regime), min margin " + fmt("%.4f", min_margin)};
}

Outcome concentration() {
    std::size_t chi_fail = 0;
    for (std::size_t m : {10u, 100u, 1000u}) {
        for (double tau : {0.1, 0.3, 0.5}) {
            const auto emp = chi2_empirical_tails(m, tau, 100000, derive_seed(plan_seed, 700 + m + std::size_t(tau * 10)));
            const auto bnd = chi2_tail_bounds(m, tau);
            chi_fail += emp.lower_tail > bnd.lower_tail_bound;
            chi_fail += emp.upper_tail > bnd.upper_tail_bound;
        }
    }
    std::size_t sigma_fail = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        sigma_fail += !sigma_max_check(gaussian_matrix(50, 200, derive_seed(plan_seed, 8000 + s))).within;
    }
    std::size_t tv_fail = 0, tv_pairs = 0;
    std::mt19937_64 gen(plan_seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (tv_pairs < 10000) {
        const std::size_t a = 2 + gen() % 30;
        std::vector<double> p(a), q(a);
        double sp = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < a; ++i) {
            p[i] = u(gen);
            sp += p[i];
        }
        const double mix = 0.5 * u(gen);
        for (std::size_t i = 0; i < a; ++i) {
            p[i] /= sp;
            q[i] = (1.0 - mix) * p[i] + mix * u(gen);
            sq += q[i];
        }
        double l1 = 0.0;
        for (std::size_t i = 0; i < a; ++i) {
            q[i] /= sq;
            l1 += std::abs(p[i] - q[i]);
        }
        if (!(l1 > 0.0 && l1 <= 0.5)) continue;
        ++tv_pairs;
        const double gap = std::abs(entropy(std::span<const double>(p)) - entropy(std::span<const double>(q)));
        tv_fail += gap > tv_entropy_bound(l1, a) + 1e-12;
    }
    return {chi_fail == 0 && sigma_fail == 0 && tv_fail == 0,
            "chi2 exceedances " + std::to_string(chi_fail) + "/18, sigma_max violations " +
                std::to_string(sigma_fail) + "/1000, TV violations " + std::to_string(tv_fail) + "/10000"};
}

Outcome structural() {
    std::size_t chain_fail = 0, mono_fail = 0, quant_fail = 0, incr_fail = 0, det_fail = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = generate({PiecewiseMarkov{0.1, unit}, derive_seed(plan_seed, 900 + s)}, 2000);
        const unsigned b = 1 + s % 6;
        const auto z = quantize_signal(x, Resolution(b));
        double prev = INFINITY;
        for (std::size_t k = 0; k <= 4; ++k) {
            const auto c = count_contexts(z, k);
            const double h = cond_empirical_entropy(c);
            chain_fail += std::abs(h - std::max(0.0, c.joint_entropy() - c.context_entropy())) > 1e-12;
            mono_fail += h > prev + 1e-12;
            prev = h;
        }
        for (double v : x) {
            const double q = bit_quantize(v, Resolution(b));
            quant_fail += bit_quantize(q, Resolution(b)) != q;
            quant_fail += bit_quantize(bit_quantize(v, Resolution(b + 1)), Resolution(b)) != q;
        }
    }
    for (std::uint64_t s = 0; s < 6; ++s) {
        const std::size_t n = 40 + 20 * s;
        const unsigned b = 1 + s % 4;
        const std::size_t k = s % 3;
        const auto x = generate({PiecewiseMarkov{0.1, unit}, derive_seed(plan_seed, 950 + s)}, n);
        const auto ms = make_measurements(x, n / 3, derive_seed(plan_seed, 960 + s));
        AnnealState state(ms, quantize_signal(x, Resolution(b)), k, 100.0);
        Rng rng(derive_seed(plan_seed, 970 + s));
        const std::uint64_t r = std::uint64_t{1} << b;
        for (int t = 0; t < 1000; ++t) {
            const std::size_t i = rng.uniform_index(n);
            const Symbol sym = static_cast<Symbol>(rng.uniform_index(r));
            if (t % 2) {
                state.apply(i, sym);
            } else {
                state.apply_block(i, 1 + rng.uniform_index(5), sym);
            }
        }
        const double ref = lagrangian_cost(state.candidate(), ms, k, 100.0).total;
        incr_fail += std::abs(state.cost() - ref) > 1e-6 * std::max(1.0, std::abs(ref));
    }
    {
        const SourceSpec spec{MovingAverage{4, 0.1, unit}, plan_seed};
        det_fail += generate(spec, 5000) != generate(spec, 5000);
        const auto x = generate({PiecewiseMarkov{0.05, unit}, plan_seed}, 64);
        const auto ms = make_measurements(x, 24, plan_seed);
        det_fail += ms.A != make_measurements(x, 24, plan_seed).A;
        DecoderConfig cfg = parameter_defaults(64, 4.0 / 3.0, 4.0).config;
        cfg.sweeps = 30;
        cfg.seed = plan_seed;
        const auto a = anneal_decode(ms, cfg);
        const auto b = anneal_decode(ms, cfg);
        det_fail += a.final_cost != b.final_cost || a.x_hat != b.x_hat;
    }
    const std::size_t total = chain_fail + mono_fail + quant_fail + incr_fail + det_fail;
    return {total == 0, "chain " + std::to_string(chain_fail) + ", monotone " + std::to_string(mono_fail) +
                            ", quantize " + std::to_string(quant_fail) + ", incremental " +
                            std::to_string(incr_fail) + ", determinism " + std::to_string(det_fail) + " failures"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "ID estimate, memoryless mixture", 30, id_memoryless},
        {2, "ID estimate, piecewise-constant Markov", 60, id_piecewise},
        {3, "annealer matches exhaustive Lagrangian minimum", 60, oracle_equivalence},
        {4, "end-to-end recovery, piecewise fixture", 600, recovery},
        {5, "noise robustness", 600, noise_robustness},
        {6, "LZ code length vs empirical entropy bound", 300, lz_bound},
        {7, "concentration inequalities", 120, concentration},
        {8, "structural invariants", 120, structural},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && secs <= c.budget_s;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s [%.1f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
