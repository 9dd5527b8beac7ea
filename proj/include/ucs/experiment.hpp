#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucs/decoder.hpp"
#include "ucs/sensing.hpp"
#include "ucs/sources.hpp"

namespace ucs {

using Json = nlohmann::json;

// JSON forms of the configuration types (see README for the schema).
Json to_json(const ContinuousComponent& fc);
ContinuousComponent continuous_from_json(const Json& j);
Json to_json(const SourceSpec& spec);
SourceSpec source_from_json(const Json& j);
Json to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const Json& j);
Json to_json(const DecoderConfig& cfg);
// Applies the keys present in `j` on top of `base`.
DecoderConfig decoder_from_json(const Json& j, DecoderConfig base);

Json read_json_file(const std::filesystem::path& path);

// Noise for one grid cell. `scaled` sets the exact norm to
// scale * m / (log2 m)^{2r}.
struct NoisePlan {
    enum class Kind { none, gaussian, fixed_norm, scaled_fixed_norm };
    Kind kind = Kind::none;
    double level = 0.0;

    NoiseSpec resolve(std::size_t m, double r) const;
};

NoisePlan noise_plan_from_json(const Json& j);

struct ExperimentPlan {
    SourceSpec source{IidMixture{0.0, ContinuousComponent::uniform(0.0, 1.0)}, 0};
    std::vector<std::size_t> n_grid;
    // Either explicit counts, or rates turned into counts by measurement_count.
    std::vector<std::size_t> m_grid;
    std::vector<double> delta_grid;
    std::optional<double> d_o;
    double r = 1.5;
    double delta = 1.0;
    Json decoder_overrides = Json::object();
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    NoisePlan noise;
    std::string output_path;

    void validate() const;
};

ExperimentPlan plan_from_json(const Json& j);

struct ResultRow {
    std::size_t n = 0;
    std::size_t m = 0;
    unsigned b = 0;
    std::size_t k = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::size_t trial = 0;
    std::optional<double> normalized_error;
    double entropy_term = 0.0;
    double residual_term = 0.0;
    double wall_time_ms = 0.0;
    std::optional<double> id_estimate_of_source;
    std::string error;
};

// Stable CSV schema: header plus one row per decode, LF endings.
extern const char* const result_csv_header;
void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_result_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);

// Seeds used for one trial of a plan.
struct TrialSeeds {
    std::uint64_t source;
    std::uint64_t matrix;
    std::uint64_t noise;
    std::uint64_t decoder;
};

TrialSeeds trial_seeds(std::uint64_t plan_seed, std::size_t trial);

// Decodes one (n, m, trial) cell. Failures come back as a row with `error` set.
ResultRow run_cell(const ExperimentPlan& plan, std::size_t n, std::size_t m, std::size_t trial);

// The m values a plan uses at length n.
std::vector<std::size_t> plan_m_values(const ExperimentPlan& plan, std::size_t n);

// Full grid in plan order: n outer, m middle, trial inner.
std::vector<ResultRow> run_experiment(const ExperimentPlan& plan);

// Decodes with fully specified measurements and optional ground truth. The
// full decoder result is copied to `full` when given.
ResultRow decode_row(const MeasurementSet& ms, const DecoderConfig& cfg,
                     std::optional<std::span<const double>> truth, std::size_t trial = 0,
                     std::optional<RecoveryResult>* full = nullptr);

struct LzCheckReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::size_t not_applicable = 0;
    double min_margin = 0.0;   // min of rhs - lhs over applicable cases
    double mean_margin = 0.0;
    double max_margin = 0.0;
};

LzCheckReport& merge_into(LzCheckReport& into, const LzCheckReport& other);

// check_lz_bound over `trials` realizations of `spec` (seeds derived per trial).
LzCheckReport run_lz_check(const SourceSpec& spec, std::size_t n, Resolution b, std::size_t k,
                           std::size_t trials);

}  // namespace ucs
