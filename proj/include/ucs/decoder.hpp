#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ucs/quantize.hpp"
#include "ucs/sensing.hpp"

namespace ucs {

// Geometric cooling: T at sweep s is initial * decay^s.
struct TemperatureSchedule {
    double initial = 1.0;
    double decay = 0.97;

    double at(std::size_t sweep) const;
};

struct DecoderConfig {
    Resolution b{4};
    std::size_t k = 1;
    double lambda = 1.0;
    double r = 1.5;  // exponent the defaults were derived from; informational
    std::size_t sweeps = 400;
    std::size_t restarts = 4;
    TemperatureSchedule schedule;
    std::uint64_t seed = 0;

    // Throws std::domain_error on lambda <= 0, restarts == 0 or decay outside (0, 1).
    void validate() const;
};

struct LagrangianCost {
    double total;
    double entropy_term;   // \hat H_k(u)
    double residual_term;  // (lambda / n^2) ||A u - y||^2
};

// From-scratch evaluation of \hat H_k(u) + (lambda / n^2) ||A u - y||_2^2.
LagrangianCost lagrangian_cost(const QuantizedSignal& u, const MeasurementSet& ms, std::size_t k,
                               double lambda);

// Single-owner annealing state: the candidate u, its circular gram counts and
// the residual A u - y, with O(k + m) cost deltas for one-symbol substitutions
// and O(len (k + m)) deltas for block substitutions.
class AnnealState {
public:
    AnnealState(const MeasurementSet& ms, QuantizedSignal init, std::size_t k, double lambda);
    ~AnnealState();
    AnnealState(AnnealState&&) noexcept;
    AnnealState& operator=(AnnealState&&) noexcept;

    const QuantizedSignal& candidate() const noexcept;
    const Vector& residual() const noexcept;
    double entropy_term() const noexcept;
    double residual_term() const noexcept;
    double cost() const noexcept { return entropy_term() + residual_term(); }

    // Cost change if u_i were replaced by s; the state is left untouched.
    double delta(std::size_t i, Symbol s);
    // Commits u_i := s.
    void apply(std::size_t i, Symbol s);
    // Same for the circular block u_start..u_{start+len-1} all set to s,
    // 1 <= len <= n - k.
    double delta_block(std::size_t start, std::size_t len, Symbol s);
    void apply_block(std::size_t start, std::size_t len, Symbol s);
    // Recomputes the residual and the entropy sums from the stored counts.
    void resync();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct MepResult {
    bool feasible;
    // Minimizer of \hat H_k among candidates with ||A u - y|| <= epsilon_feas.
    std::optional<QuantizedSignal> solution;
    double entropy;        // of the solution (feasible only)
    double residual_norm;  // of the solution (feasible only)
    double min_residual;   // smallest ||A u - y|| over all candidates
    std::uint64_t feasible_count;
};

// Largest number of candidates exhaustive_mep will enumerate.
inline constexpr std::uint64_t exhaustive_limit = std::uint64_t{1} << 24;

// Exhaustive MEP over X_b^n. Ties go to the smaller residual, then the
// lexicographically smaller symbol vector. Throws if (2^b)^n exceeds the limit.
MepResult exhaustive_mep(const MeasurementSet& ms, Resolution b, std::size_t k, double epsilon_feas);

// (sqrt n + 2 sqrt m) sqrt n 2^-b: radius within which [x]_b is feasible
// whenever sigma_max(A) respects its bound.
double default_feasibility_radius(const MeasurementSet& ms, Resolution b);

struct RecoveryResult {
    RealSignal x_hat;
    QuantizedSignal symbols;
    double final_cost;
    double entropy_term;
    double residual_term;
    std::size_t sweeps_run;
    std::size_t restart_index_of_best;
    std::optional<double> normalized_error;
    // Best cost seen so far in each chain, sampled after initialization and
    // after every sweep.
    std::vector<std::vector<double>> best_cost_trace;
};

// Minimum-norm least-squares solution, ridge-regularized, clipped to [0, 1]
// and bit-quantized.
QuantizedSignal least_squares_init(const MeasurementSet& ms, Resolution b, double ridge = 1e-8);

// Lagrangian-MEP by simulated annealing. Every coordinate visit makes a
// single-site proposal and a block proposal (recolor the run through the
// coordinate, or shift a run boundary). Returns the best state visited
// across all restarts.
RecoveryResult anneal_decode(const MeasurementSet& ms, const DecoderConfig& cfg,
                             std::optional<std::span<const double>> truth = std::nullopt);

struct DecoderDefaults {
    DecoderConfig config;
    std::optional<std::size_t> m;
    bool m_floor_used = false;
};

// b = ceil(r log log n), lambda = (log n)^{2r},
// k = max(1, floor(log n / (3 log log n))), all logs base 2.
DecoderDefaults parameter_defaults(std::size_t n, double r, double delta,
                                   std::optional<double> d_o_hint = std::nullopt);

// (1 / sqrt n) ||x - x_hat||_2.
double recovery_error(std::span<const double> x, std::span<const double> x_hat);

}  // namespace ucs
