#include "ucs/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ucs {

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::domain_error(what);
}

void check_probability(double p) {
    require(p >= 0.0 && p <= 1.0, "mixture weight p must be in [0, 1], got " + std::to_string(p));
}

double draw_sparse(double p, const ContinuousComponent& fc, Rng& rng) {
    return rng.bernoulli(p) ? fc.sample(rng) : 0.0;
}

template <class Model>
const Model& expect_model(const SourceSpec& spec, const char* name) {
    const auto* m = std::get_if<Model>(&spec.model);
    if (m == nullptr) {
        throw std::invalid_argument(std::string("source spec is not a ") + name + " model");
    }
    validate(spec);
    return *m;
}

}  // namespace

ContinuousComponent::ContinuousComponent(Kind kind, double mean, double sd, double lo, double hi)
    : kind_(kind), mean_(mean), sd_(sd), lo_(lo), hi_(hi) {
    require(lo >= 0.0 && hi <= 1.0 && lo < hi, "continuous component support must be a non-empty "
                                               "interval inside [0, 1]");
}

ContinuousComponent ContinuousComponent::uniform(double lo, double hi) {
    return ContinuousComponent(Kind::uniform, 0.0, 0.0, lo, hi);
}

ContinuousComponent ContinuousComponent::truncated_gaussian(double mean, double sd, double lo,
                                                            double hi) {
    require(sd > 0.0, "truncated gaussian needs sd > 0");
    const double mass = std_normal_cdf((hi - mean) / sd) - std_normal_cdf((lo - mean) / sd);
    require(mass > 1e-6, "truncated gaussian keeps too little mass on its support");
    return ContinuousComponent(Kind::truncated_gaussian, mean, sd, lo, hi);
}

double ContinuousComponent::sample(Rng& rng) const {
    if (kind_ == Kind::uniform) return rng.uniform(lo_, hi_);
    for (;;) {
        const double v = mean_ + sd_ * rng.normal();
        if (v >= lo_ && v <= hi_) return v;
    }
}

double ContinuousComponent::density(double x) const {
    if (x < lo_ || x > hi_) return 0.0;
    if (kind_ == Kind::uniform) return 1.0 / (hi_ - lo_);
    const double mass = std_normal_cdf((hi_ - mean_) / sd_) - std_normal_cdf((lo_ - mean_) / sd_);
    return std_normal_pdf((x - mean_) / sd_) / (sd_ * mass);
}

double ContinuousComponent::mean() const {
    if (kind_ == Kind::uniform) return 0.5 * (lo_ + hi_);
    const double a = (lo_ - mean_) / sd_;
    const double b = (hi_ - mean_) / sd_;
    const double mass = std_normal_cdf(b) - std_normal_cdf(a);
    return mean_ + sd_ * (std_normal_pdf(a) - std_normal_pdf(b)) / mass;
}

std::string model_name(const SourceModel& model) {
    struct Visitor {
        std::string operator()(const IidMixture&) const { return "iid_mixture"; }
        std::string operator()(const PiecewiseMarkov&) const { return "piecewise_markov"; }
        std::string operator()(const ArMarkov&) const { return "ar_markov"; }
        std::string operator()(const MovingAverage&) const { return "moving_average"; }
    };
    return std::visit(Visitor{}, model);
}

void validate(const SourceSpec& spec) {
    struct Visitor {
        void operator()(const IidMixture& m) const { check_probability(m.p); }
        void operator()(const PiecewiseMarkov& m) const { check_probability(m.p); }
        void operator()(const ArMarkov& m) const {
            check_probability(m.p);
            require(!m.coeffs.empty(), "AR model needs at least one coefficient");
            for (double a : m.coeffs) require(a > 0.0 && a < 1.0, "AR coefficients must lie in (0, 1)");
            const double sum = std::accumulate(m.coeffs.begin(), m.coeffs.end(), 0.0);
            require(sum < 1.0, "AR coefficients must sum to less than 1");
            require(m.fc.hi() <= 1.0 - sum + 1e-12,
                    "AR innovation support must lie in [0, 1 - sum(a_i)]");
        }
        void operator()(const MovingAverage& m) const {
            check_probability(m.p);
            require(m.window >= 1, "moving average window must be >= 1");
        }
    };
    std::visit(Visitor{}, spec.model);
}

RealSignal gen_iid_mixture(const SourceSpec& spec, std::size_t n) {
    const auto& m = expect_model<IidMixture>(spec, "iid_mixture");
    Rng rng(spec.seed);
    RealSignal x(n);
    for (auto& v : x) v = draw_sparse(m.p, m.fc, rng);
    return x;
}

RealSignal gen_piecewise_markov(const SourceSpec& spec, std::size_t n) {
    const auto& m = expect_model<PiecewiseMarkov>(spec, "piecewise_markov");
    Rng rng(spec.seed);
    RealSignal x(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (t == 0 || rng.bernoulli(m.p)) {
            x[t] = m.fc.sample(rng);
        } else {
            x[t] = x[t - 1];
        }
    }
    return x;
}

std::size_t ar_burn_in(std::size_t order) { return std::max<std::size_t>(1000, 20 * order); }

RealSignal gen_ar_markov(const SourceSpec& spec, std::size_t n) {
    const auto& m = expect_model<ArMarkov>(spec, "ar_markov");
    Rng rng(spec.seed);
    const std::size_t l = m.coeffs.size();
    const std::size_t burn = ar_burn_in(l);
    // history[0..l) is the zero initial state; the process is written after it.
    std::vector<double> path(l + burn + n, 0.0);
    for (std::size_t t = l; t < path.size(); ++t) {
        double pred = 0.0;
        for (std::size_t i = 1; i <= l; ++i) pred += m.coeffs[i - 1] * path[t - i];
        path[t] = std::min(1.0, pred + draw_sparse(m.p, m.fc, rng));
    }
    return RealSignal(path.end() - static_cast<std::ptrdiff_t>(n), path.end());
}

RealSignal moving_average_innovations(const SourceSpec& spec, std::size_t n) {
    const auto& m = expect_model<MovingAverage>(spec, "moving_average");
    Rng rng(spec.seed);
    RealSignal y(m.window + n - 1);
    for (auto& v : y) v = draw_sparse(m.p, m.fc, rng);
    return y;
}

RealSignal gen_moving_average(const SourceSpec& spec, std::size_t n) {
    const auto& m = expect_model<MovingAverage>(spec, "moving_average");
    const RealSignal y = moving_average_innovations(spec, n);
    const std::size_t l = m.window;
    // y[j] holds Y_{j - l + 1}; X_i (1-based) averages Y_{i-l} .. Y_{i-1}.
    RealSignal x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < l; ++j) sum += y[i + j];
        x[i] = std::min(1.0, sum / static_cast<double>(l));
    }
    return x;
}

RealSignal generate(const SourceSpec& spec, std::size_t n) {
    struct Visitor {
        const SourceSpec& spec;
        std::size_t n;
        RealSignal operator()(const IidMixture&) const { return gen_iid_mixture(spec, n); }
        RealSignal operator()(const PiecewiseMarkov&) const { return gen_piecewise_markov(spec, n); }
        RealSignal operator()(const ArMarkov&) const { return gen_ar_markov(spec, n); }
        RealSignal operator()(const MovingAverage&) const { return gen_moving_average(spec, n); }
    };
    return std::visit(Visitor{spec, n}, spec.model);
}

ReferenceId reference_id(const SourceSpec& spec) {
    validate(spec);
    struct Visitor {
        ReferenceId operator()(const IidMixture& m) const { return {m.p, false}; }
        ReferenceId operator()(const PiecewiseMarkov& m) const { return {m.p, false}; }
        ReferenceId operator()(const ArMarkov& m) const { return {m.p, false}; }
        ReferenceId operator()(const MovingAverage& m) const { return {m.p, true}; }
    };
    return std::visit(Visitor{}, spec.model);
}

}  // namespace ucs
