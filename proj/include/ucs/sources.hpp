#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ucs/quantize.hpp"
#include "ucs/rng.hpp"

namespace ucs {

// Absolutely continuous law f_c supported inside [0, 1].
class ContinuousComponent {
public:
    enum class Kind { uniform, truncated_gaussian };

    static ContinuousComponent uniform(double lo, double hi);
    static ContinuousComponent truncated_gaussian(double mean, double sd, double lo, double hi);

    Kind kind() const noexcept { return kind_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    // Location/scale of the untruncated normal; unused for uniform.
    double location() const noexcept { return mean_; }
    double scale() const noexcept { return sd_; }

    double sample(Rng& rng) const;
    double density(double x) const;
    double mean() const;

    friend bool operator==(const ContinuousComponent&, const ContinuousComponent&) = default;

private:
    ContinuousComponent(Kind kind, double mean, double sd, double lo, double hi);

    Kind kind_;
    double mean_;
    double sd_;
    double lo_;
    double hi_;
};

// X_i ~ (1-p) delta_0 + p f_c, i.i.d.
struct IidMixture {
    double p;
    ContinuousComponent fc;
};

// X_1 ~ f_c; X_t = X_{t-1} w.p. 1-p, else a fresh f_c draw.
struct PiecewiseMarkov {
    double p;
    ContinuousComponent fc;
};

// X_t = sum_i a_i X_{t-i} + Z_t with Z_t ~ (1-p) delta_0 + p f_c.
// Requires sum a_i < 1 and supp f_c within [0, 1 - sum a_i].
struct ArMarkov {
    std::vector<double> coeffs;
    double p;
    ContinuousComponent fc;
};

// X_i = (1/l) sum_{j=1..l} Y_{i-j}, Y i.i.d. (1-p) delta_0 + p f_c.
struct MovingAverage {
    unsigned window;
    double p;
    ContinuousComponent fc;
};

using SourceModel = std::variant<IidMixture, PiecewiseMarkov, ArMarkov, MovingAverage>;

struct SourceSpec {
    SourceModel model;
    std::uint64_t seed = 0;
};

std::string model_name(const SourceModel& model);

// Throws std::domain_error when the spec violates its model's constraints.
void validate(const SourceSpec& spec);

RealSignal gen_iid_mixture(const SourceSpec& spec, std::size_t n);
RealSignal gen_piecewise_markov(const SourceSpec& spec, std::size_t n);
RealSignal gen_ar_markov(const SourceSpec& spec, std::size_t n);
RealSignal gen_moving_average(const SourceSpec& spec, std::size_t n);

// The l + n - 1 innovations Y_{-l+1}, ..., Y_{n-1} behind gen_moving_average
// (same seed, same draws).
RealSignal moving_average_innovations(const SourceSpec& spec, std::size_t n);

// Dispatches on the model.
RealSignal generate(const SourceSpec& spec, std::size_t n);

std::size_t ar_burn_in(std::size_t order);

struct ReferenceId {
    double value;
    // Set when only an upper bound on the information dimension is known.
    bool upper_bound;
};

ReferenceId reference_id(const SourceSpec& spec);

}  // namespace ucs
