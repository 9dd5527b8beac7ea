#include "ucs/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ucs/detail/gram_key.hpp"
#include "ucs/empirical.hpp"
#include "ucs/rng.hpp"

namespace ucs {

double TemperatureSchedule::at(std::size_t sweep) const {
    return initial * std::pow(decay, static_cast<double>(sweep));
}

void DecoderConfig::validate() const {
    if (!(lambda > 0.0)) throw std::domain_error("decoder lambda must be positive");
    if (restarts == 0) throw std::domain_error("decoder needs at least one restart");
    if (!(schedule.decay > 0.0 && schedule.decay < 1.0)) {
        throw std::domain_error("temperature decay must lie in (0, 1)");
    }
    if (!(schedule.initial > 0.0)) throw std::domain_error("initial temperature must be positive");
}

namespace {

void check_dimensions(const QuantizedSignal& u, const MeasurementSet& ms) {
    if (static_cast<Eigen::Index>(u.size()) != ms.n() || ms.y.size() != ms.m()) {
        throw std::domain_error("candidate length " + std::to_string(u.size()) +
                                " does not match measurement set (m=" + std::to_string(ms.m()) +
                                ", n=" + std::to_string(ms.n()) + ")");
    }
}

Vector as_vector(const QuantizedSignal& u) {
    const RealSignal v = dequantize(u);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Tracks S = sum c log2 c over the circular (k+1)-gram and k-gram tables of
// a sequence under single-symbol substitutions. \hat H_k = (S_ctx - S_gram) / n.
class EntropyTracker {
public:
    virtual ~EntropyTracker() = default;
    virtual double entropy() const = 0;
    virtual double entropy_delta(std::size_t i, Symbol s) = 0;
    virtual void apply(std::size_t i, Symbol s) = 0;
    virtual double block_delta(std::size_t start, std::size_t len, Symbol s) = 0;
    virtual void apply_block(std::size_t start, std::size_t len, Symbol s) = 0;
    virtual void resync() = 0;
};

template <class Codec>
class GramEntropyTracker final : public EntropyTracker {
public:
    using Key = typename Codec::key_type;

    GramEntropyTracker(Codec codec, std::span<const Symbol> u, std::size_t k)
        : codec_(std::move(codec)), k_(k), u_(u.begin(), u.end()), flog_(u.size() + 1, 0.0) {
        const std::size_t n = u_.size();
        for (std::size_t c = 1; c <= n; ++c) {
            flog_[c] = static_cast<double>(c) * std::log2(static_cast<double>(c));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t start = (i + n - k_) % n;
            ++grams_[codec_.encode(u_, start, k_ + 1)];
            ++contexts_[codec_.encode(u_, start, k_)];
        }
        resync();
    }

    double entropy() const override {
        return (s_ctx_ - s_gram_) / static_cast<double>(u_.size());
    }

    double entropy_delta(std::size_t i, Symbol s) override {
        if (u_[i] == s) return 0.0;
        collect(i, s);
        const double d_gram = table_delta(grams_, gram_changes_);
        const double d_ctx = table_delta(contexts_, ctx_changes_);
        return (d_ctx - d_gram) / static_cast<double>(u_.size());
    }

    void apply(std::size_t i, Symbol s) override {
        if (u_[i] == s) return;
        collect(i, s);
        s_gram_ += commit(grams_, gram_changes_);
        s_ctx_ += commit(contexts_, ctx_changes_);
        u_[i] = s;
    }

    double block_delta(std::size_t start, std::size_t len, Symbol s) override {
        collect_block(start, len, s);
        const double d_gram = table_delta(grams_, gram_changes_);
        const double d_ctx = table_delta(contexts_, ctx_changes_);
        return (d_ctx - d_gram) / static_cast<double>(u_.size());
    }

    void apply_block(std::size_t start, std::size_t len, Symbol s) override {
        collect_block(start, len, s);
        s_gram_ += commit(grams_, gram_changes_);
        s_ctx_ += commit(contexts_, ctx_changes_);
        const std::size_t n = u_.size();
        for (std::size_t t = 0; t < len; ++t) u_[(start + t) % n] = s;
    }

    void resync() override {
        s_gram_ = sum_flog(grams_);
        s_ctx_ = sum_flog(contexts_);
    }

private:
    struct Change {
        Key key;
        long d;
    };

    static void add(std::vector<Change>& changes, Key key, long d) {
        for (auto& c : changes) {
            if (c.key == key) {
                c.d += d;
                return;
            }
        }
        changes.push_back({std::move(key), d});
    }

    // Windows touching position i: (k+1)-grams starting at i-k..i and
    // k-grams starting at i-k+1..i. k < n keeps these starts distinct.
    void collect(std::size_t i, Symbol s) {
        const std::size_t n = u_.size();
        gram_changes_.clear();
        ctx_changes_.clear();
        const Symbol old = u_[i];
        for (int pass = 0; pass < 2; ++pass) {
            const long d = pass == 0 ? -1 : +1;
            u_[i] = pass == 0 ? old : s;
            for (std::size_t t = 0; t <= k_; ++t) {
                add(gram_changes_, codec_.encode(u_, (i + n - t) % n, k_ + 1), d);
            }
            for (std::size_t t = 0; t < k_; ++t) {
                add(ctx_changes_, codec_.encode(u_, (i + n - t) % n, k_), d);
            }
        }
        u_[i] = old;
    }

    // Circular block start..start+len-1 set to s; needs len + k <= n so the
    // affected window starts stay distinct.
    void collect_block(std::size_t start, std::size_t len, Symbol s) {
        const std::size_t n = u_.size();
        gram_changes_.clear();
        ctx_changes_.clear();
        saved_.resize(len);
        for (std::size_t t = 0; t < len; ++t) saved_[t] = u_[(start + t) % n];
        for (int pass = 0; pass < 2; ++pass) {
            const long d = pass == 0 ? -1 : +1;
            for (std::size_t t = 0; t < len; ++t) u_[(start + t) % n] = pass == 0 ? saved_[t] : s;
            for (std::size_t t = 0; t < len + k_; ++t) {
                const std::size_t w = (start + n - k_ + t) % n;
                gram_changes_.push_back({codec_.encode(u_, w, k_ + 1), d});
                if (t > 0) ctx_changes_.push_back({codec_.encode(u_, w, k_), d});
            }
        }
        for (std::size_t t = 0; t < len; ++t) u_[(start + t) % n] = saved_[t];
        merge(gram_changes_);
        merge(ctx_changes_);
    }

    static void merge(std::vector<Change>& changes) {
        std::sort(changes.begin(), changes.end(), [](const Change& a, const Change& b) { return a.key < b.key; });
        std::size_t out = 0;
        for (std::size_t j = 0; j < changes.size(); ++j) {
            if (out > 0 && changes[out - 1].key == changes[j].key) {
                changes[out - 1].d += changes[j].d;
            } else {
                changes[out++] = std::move(changes[j]);
            }
        }
        changes.resize(out);
    }

    double table_delta(const std::unordered_map<Key, std::uint64_t>& table,
                       const std::vector<Change>& changes) const {
        double d = 0.0;
        for (const auto& c : changes) {
            if (c.d == 0) continue;
            const auto it = table.find(c.key);
            const long before = it == table.end() ? 0 : static_cast<long>(it->second);
            d += flog_[static_cast<std::size_t>(before + c.d)] - flog_[static_cast<std::size_t>(before)];
        }
        return d;
    }

    double commit(std::unordered_map<Key, std::uint64_t>& table, const std::vector<Change>& changes) {
        double d = 0.0;
        for (const auto& c : changes) {
            if (c.d == 0) continue;
            auto& count = table[c.key];
            const long before = static_cast<long>(count);
            const long after = before + c.d;
            d += flog_[static_cast<std::size_t>(after)] - flog_[static_cast<std::size_t>(before)];
            if (after == 0) {
                table.erase(c.key);
            } else {
                count = static_cast<std::uint64_t>(after);
            }
        }
        return d;
    }

    double sum_flog(const std::unordered_map<Key, std::uint64_t>& table) const {
        double s = 0.0;
        for (const auto& [key, c] : table) s += flog_[c];
        return s;
    }

    Codec codec_;
    std::size_t k_;
    std::vector<Symbol> u_;
    std::vector<double> flog_;
    std::unordered_map<Key, std::uint64_t> grams_;
    std::unordered_map<Key, std::uint64_t> contexts_;
    double s_gram_ = 0.0;
    double s_ctx_ = 0.0;
    std::vector<Change> gram_changes_;
    std::vector<Change> ctx_changes_;
    std::vector<Symbol> saved_;
};

std::unique_ptr<EntropyTracker> make_tracker(const QuantizedSignal& u, std::size_t k) {
    const unsigned bits = u.resolution().bits();
    if (detail::NarrowCodec::fits(k + 1, bits)) {
        return std::make_unique<GramEntropyTracker<detail::NarrowCodec>>(detail::NarrowCodec{bits},
                                                                         u.symbols(), k);
    }
    return std::make_unique<GramEntropyTracker<detail::WideCodec>>(detail::WideCodec{}, u.symbols(), k);
}

}  // namespace

LagrangianCost lagrangian_cost(const QuantizedSignal& u, const MeasurementSet& ms, std::size_t k,
                               double lambda) {
    check_dimensions(u, ms);
    const double n = static_cast<double>(u.size());
    const double h = cond_empirical_entropy(u, k);
    const double res = lambda / (n * n) * (ms.A * as_vector(u) - ms.y).squaredNorm();
    return {h + res, h, res};
}

struct AnnealState::Impl {
    const MeasurementSet* ms;
    QuantizedSignal u;
    std::unique_ptr<EntropyTracker> entropy;
    Vector residual;
    Vector col_norm2;
    double residual_norm2 = 0.0;
    double scale;  // lambda / n^2
    double step;   // 2^-b

    Impl(const MeasurementSet& set, QuantizedSignal init, std::size_t k, double lambda)
        : ms(&set), u(std::move(init)), k(k) {
        check_dimensions(u, set);
        if (k >= u.size()) throw std::domain_error("context order must be below n");
        const double n = static_cast<double>(u.size());
        scale = lambda / (n * n);
        step = u.resolution().step();
        entropy = make_tracker(u, k);
        col_norm2 = set.A.colwise().squaredNorm().transpose();
        recompute_residual();
    }

    void recompute_residual() {
        residual = ms->A * as_vector(u) - ms->y;
        residual_norm2 = residual.squaredNorm();
    }

    double residual_delta(std::size_t i, Symbol s) const {
        const double dv = (static_cast<double>(s) - static_cast<double>(u[i])) * step;
        const auto col = static_cast<Eigen::Index>(i);
        return 2.0 * dv * ms->A.col(col).dot(residual) + dv * dv * col_norm2[col];
    }

    // Fills block_change with A (u' - u) for the block move and returns the
    // change of ||A u - y||^2.
    double block_residual_delta(std::size_t start, std::size_t len, Symbol s) {
        const std::size_t n = u.size();
        block_change.setZero(ms->m());
        for (std::size_t t = 0; t < len; ++t) {
            const std::size_t j = (start + t) % n;
            const double dv = (static_cast<double>(s) - static_cast<double>(u[j])) * step;
            if (dv != 0.0) block_change += dv * ms->A.col(static_cast<Eigen::Index>(j));
        }
        return 2.0 * block_change.dot(residual) + block_change.squaredNorm();
    }

    void check_block(std::size_t start, std::size_t len) const {
        if (start >= u.size()) throw std::out_of_range("block start out of range");
        if (len == 0 || len + k > u.size()) throw std::out_of_range("block length must lie in [1, n - k]");
    }

    Vector block_change;
    std::size_t k;
};

AnnealState::AnnealState(const MeasurementSet& ms, QuantizedSignal init, std::size_t k, double lambda)
    : impl_(std::make_unique<Impl>(ms, std::move(init), k, lambda)) {}

AnnealState::~AnnealState() = default;
AnnealState::AnnealState(AnnealState&&) noexcept = default;
AnnealState& AnnealState::operator=(AnnealState&&) noexcept = default;

const QuantizedSignal& AnnealState::candidate() const noexcept { return impl_->u; }
const Vector& AnnealState::residual() const noexcept { return impl_->residual; }
double AnnealState::entropy_term() const noexcept { return impl_->entropy->entropy(); }
double AnnealState::residual_term() const noexcept { return impl_->scale * impl_->residual_norm2; }

double AnnealState::delta(std::size_t i, Symbol s) {
    if (i >= impl_->u.size()) throw std::out_of_range("coordinate out of range");
    if (s == impl_->u[i]) return 0.0;
    return impl_->entropy->entropy_delta(i, s) + impl_->scale * impl_->residual_delta(i, s);
}

void AnnealState::apply(std::size_t i, Symbol s) {
    if (i >= impl_->u.size()) throw std::out_of_range("coordinate out of range");
    if (s == impl_->u[i]) return;
    auto& st = *impl_;
    const double dv = (static_cast<double>(s) - static_cast<double>(st.u[i])) * st.step;
    st.residual_norm2 += st.residual_delta(i, s);
    st.residual += dv * st.ms->A.col(static_cast<Eigen::Index>(i));
    st.entropy->apply(i, s);
    st.u.set(i, s);
}

double AnnealState::delta_block(std::size_t start, std::size_t len, Symbol s) {
    auto& st = *impl_;
    st.check_block(start, len);
    return st.entropy->block_delta(start, len, s) + st.scale * st.block_residual_delta(start, len, s);
}

void AnnealState::apply_block(std::size_t start, std::size_t len, Symbol s) {
    auto& st = *impl_;
    st.check_block(start, len);
    st.residual_norm2 += st.block_residual_delta(start, len, s);
    st.residual += st.block_change;
    st.entropy->apply_block(start, len, s);
    const std::size_t n = st.u.size();
    for (std::size_t t = 0; t < len; ++t) st.u.set((start + t) % n, s);
}

void AnnealState::resync() {
    impl_->recompute_residual();
    impl_->entropy->resync();
}

namespace {

bool lex_less(const QuantizedSignal& a, const QuantizedSignal& b) {
    const auto sa = a.symbols();
    const auto sb = b.symbols();
    return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

}  // namespace

MepResult exhaustive_mep(const MeasurementSet& ms, Resolution b, std::size_t k, double epsilon_feas) {
    const auto n = static_cast<std::size_t>(ms.n());
    if (ms.y.size() != ms.m()) throw std::domain_error("measurement vector length mismatch");
    if (k >= n) throw std::domain_error("context order must be below n");
    const std::uint64_t r = b.alphabet_size();
    const double log_count = static_cast<double>(n) * std::log2(static_cast<double>(r));
    if (log_count > 24.0) {
        throw std::domain_error("exhaustive_mep limited to 2^24 candidates, got 2^" +
                                std::to_string(log_count));
    }
    const double step = b.step();

    MepResult out{false, std::nullopt, 0.0, 0.0, std::numeric_limits<double>::infinity(), 0};
    std::vector<Symbol> digits(n, 0);
    Vector residual = -ms.y;
    std::uint64_t visited = 0;
    for (;;) {
        if (++visited % 4096 == 0) {
            residual = ms.A * as_vector(QuantizedSignal(digits, b)) - ms.y;
        }
        const double res = residual.norm();
        out.min_residual = std::min(out.min_residual, res);
        if (res <= epsilon_feas) {
            ++out.feasible_count;
            QuantizedSignal cand(digits, b);
            const double h = cond_empirical_entropy(cand, k);
            // Enumeration is lexicographic, so keeping the first of equal
            // (entropy, residual) pairs realizes the lexicographic tie-break.
            const bool better = !out.feasible || h < out.entropy - 1e-12 ||
                                (h <= out.entropy + 1e-12 && res < out.residual_norm);
            if (better) {
                out.feasible = true;
                out.entropy = h;
                out.residual_norm = res;
                out.solution = std::move(cand);
            }
        }
        // Odometer increment, last coordinate fastest.
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            const auto col = static_cast<Eigen::Index>(pos);
            if (digits[pos] + 1 < r) {
                ++digits[pos];
                residual += step * ms.A.col(col);
                break;
            }
            residual -= static_cast<double>(digits[pos]) * step * ms.A.col(col);
            digits[pos] = 0;
            if (pos == 0) return out;
        }
    }
}

double default_feasibility_radius(const MeasurementSet& ms, Resolution b) {
    const double n = static_cast<double>(ms.n());
    const double m = static_cast<double>(ms.m());
    return (std::sqrt(n) + 2.0 * std::sqrt(m)) * std::sqrt(n) * b.step();
}

QuantizedSignal least_squares_init(const MeasurementSet& ms, Resolution b, double ridge) {
    const Matrix gram = ms.A * ms.A.transpose() + ridge * Matrix::Identity(ms.m(), ms.m());
    const Vector w = gram.ldlt().solve(ms.y);
    const Vector x = ms.A.transpose() * w;
    std::vector<Symbol> symbols(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double v = std::isfinite(x[i]) ? std::clamp(x[i], 0.0, 1.0) : 0.0;
        symbols[static_cast<std::size_t>(i)] = bit_quantize_index(v, b);
    }
    return QuantizedSignal(std::move(symbols), b);
}

namespace {

struct ChainResult {
    QuantizedSignal best;
    double best_cost;
    std::vector<double> trace;
};

Symbol propose(Symbol current, std::uint64_t alphabet, Rng& rng) {
    if (rng.bernoulli(0.5)) return static_cast<Symbol>(rng.uniform_index(alphabet));
    // Local move: a different symbol within +-2 indices, clipped to the alphabet.
    const std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(current) - 2);
    const std::int64_t hi =
        std::min<std::int64_t>(static_cast<std::int64_t>(alphabet) - 1, static_cast<std::int64_t>(current) + 2);
    const auto width = static_cast<std::uint64_t>(hi - lo);  // candidates excluding current
    if (width == 0) return current;
    auto pick = lo + static_cast<std::int64_t>(rng.uniform_index(width));
    if (pick >= static_cast<std::int64_t>(current)) ++pick;
    return static_cast<Symbol>(pick);
}

std::size_t run_start(const QuantizedSignal& u, std::size_t i, std::size_t max_len, std::size_t& len);

struct Move {
    std::size_t start;
    std::size_t len;  // 0 when there is nothing to propose
    Symbol symbol;
};

// Moves on whole stretches of the candidate. Half the time the maximal run of
// equal symbols through i is given a new value; otherwise 1 to 4 symbols
// starting at i take the value of the symbol just before or just after them,
// which moves a run boundary.
Move propose_block(const QuantizedSignal& u, std::size_t i, std::size_t k, std::uint64_t alphabet, Rng& rng) {
    const std::size_t n = u.size();
    const std::size_t max_len = n - k;
    if (rng.bernoulli(0.5)) {
        const Symbol v = u[i];
        std::size_t len = 0;
        const std::size_t start = run_start(u, i, max_len, len);
        const Symbol s = propose(v, alphabet, rng);
        if (s == v) return {i, 0, v};
        return {start, len, s};
    }
    const std::size_t len = std::min<std::size_t>(max_len, 1 + rng.uniform_index(4));
    const Symbol s = rng.bernoulli(0.5) ? u[(i + n - 1) % n] : u[(i + len) % n];
    bool changes = false;
    for (std::size_t t = 0; t < len && !changes; ++t) changes = u[(i + t) % n] != s;
    if (!changes) return {i, 0, s};
    return {i, len, s};
}

std::size_t run_start(const QuantizedSignal& u, std::size_t i, std::size_t max_len, std::size_t& len) {
    const std::size_t n = u.size();
    const Symbol v = u[i];
    std::size_t start = i;
    len = 1;
    while (len < max_len && u[(start + n - 1) % n] == v) {
        start = (start + n - 1) % n;
        ++len;
    }
    while (len < max_len && u[(start + len) % n] == v) ++len;
    return start;
}

// Zero-temperature descent: at each coordinate take the best improving move
// among all single-symbol substitutions, all recolorings of its run, and
// boundary shifts by up to 4 positions. Stops when a full pass improves nothing.
void polish(AnnealState& state, std::size_t k, std::uint64_t alphabet, std::size_t max_passes) {
    const std::size_t n = state.candidate().size();
    const std::size_t max_len = n - k;
    constexpr double tol = 1e-12;
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const QuantizedSignal& u = state.candidate();
            Move best{i, 0, u[i]};
            double best_d = -tol;
            auto consider = [&](std::size_t start, std::size_t len, Symbol s) {
                const double d = len == 1 ? state.delta(start, s) : state.delta_block(start, len, s);
                if (d < best_d) {
                    best_d = d;
                    best = {start, len, s};
                }
            };
            std::size_t len = 0;
            const std::size_t start = run_start(u, i, max_len, len);
            for (Symbol s = 0; s < alphabet; ++s) {
                if (s == u[i]) continue;
                consider(i, 1, s);
                if (len > 1) consider(start, len, s);
            }
            for (std::size_t l = 1; l <= std::min<std::size_t>(4, max_len); ++l) {
                for (const Symbol s : {u[(i + n - 1) % n], u[(i + l) % n]}) {
                    bool changes = false;
                    for (std::size_t t = 0; t < l && !changes; ++t) changes = u[(i + t) % n] != s;
                    if (changes) consider(i, l, s);
                }
            }
            if (best.len > 0) {
                state.apply_block(best.start, best.len, best.symbol);
                improved = true;
            }
        }
        state.resync();
        if (!improved) return;
    }
}

ChainResult run_chain(const MeasurementSet& ms, const DecoderConfig& cfg, std::size_t restart,
                      const QuantizedSignal& ls_start) {
    Rng rng = Rng(cfg.seed).split(restart);
    const std::size_t n = static_cast<std::size_t>(ms.n());
    const std::uint64_t alphabet = cfg.b.alphabet_size();

    QuantizedSignal init = ls_start;
    if (restart % 2 == 1) {
        std::vector<Symbol> sym(n);
        for (auto& s : sym) s = static_cast<Symbol>(rng.uniform_index(alphabet));
        init = QuantizedSignal(std::move(sym), cfg.b);
    }

    AnnealState state(ms, std::move(init), cfg.k, cfg.lambda);
    ChainResult out{state.candidate(), state.cost(), {}};
    out.trace.reserve(cfg.sweeps + 1);
    out.trace.push_back(out.best_cost);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
        const double temperature = cfg.schedule.at(sweep);
        for (std::size_t j = n; j > 1; --j) {
            std::swap(order[j - 1], order[rng.uniform_index(j)]);
        }
        for (std::size_t i : order) {
            // One single-site proposal, then one block proposal at i.
            for (int kind = 0; kind < 2; ++kind) {
                const Symbol current = state.candidate()[i];
                double d = 0.0;
                Move mv{i, 1, current};
                if (kind == 0) {
                    mv.symbol = propose(current, alphabet, rng);
                    if (mv.symbol == current) continue;
                    d = state.delta(i, mv.symbol);
                } else {
                    mv = propose_block(state.candidate(), i, cfg.k, alphabet, rng);
                    if (mv.len == 0) continue;
                    d = state.delta_block(mv.start, mv.len, mv.symbol);
                }
                if (d <= 0.0 || rng.uniform() < std::exp(-d / temperature)) {
                    state.apply_block(mv.start, mv.len, mv.symbol);
                    if (state.cost() < out.best_cost) {
                        out.best_cost = state.cost();
                        out.best = state.candidate();
                    }
                }
            }
        }
        state.resync();
        if (state.cost() < out.best_cost) {
            out.best_cost = state.cost();
            out.best = state.candidate();
        }
        out.trace.push_back(out.best_cost);
    }
    if (cfg.sweeps == 0) return out;
    AnnealState polished(ms, out.best, cfg.k, cfg.lambda);
    polish(polished, cfg.k, alphabet, n);
    if (polished.cost() < out.best_cost) {
        out.best_cost = polished.cost();
        out.best = polished.candidate();
        out.trace.back() = out.best_cost;
    }
    return out;
}

}  // namespace

RecoveryResult anneal_decode(const MeasurementSet& ms, const DecoderConfig& cfg,
                             std::optional<std::span<const double>> truth) {
    cfg.validate();
    if (ms.y.size() != ms.m()) throw std::domain_error("measurement vector length mismatch");
    if (truth && static_cast<Eigen::Index>(truth->size()) != ms.n()) {
        throw std::domain_error("ground truth length does not match n");
    }
    if (cfg.k >= static_cast<std::size_t>(ms.n())) throw std::domain_error("context order must be below n");

    const QuantizedSignal ls_start = least_squares_init(ms, cfg.b);

    std::optional<QuantizedSignal> best;
    LagrangianCost best_cost{};
    std::size_t best_restart = 0;
    std::vector<std::vector<double>> traces;
    for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
        ChainResult chain = run_chain(ms, cfg, restart, ls_start);
        traces.push_back(std::move(chain.trace));
        const LagrangianCost c = lagrangian_cost(chain.best, ms, cfg.k, cfg.lambda);
        bool better = !best || c.total < best_cost.total;
        if (best && c.total == best_cost.total) {
            better = c.residual_term < best_cost.residual_term ||
                     (c.residual_term == best_cost.residual_term && lex_less(chain.best, *best));
        }
        if (better) {
            best = std::move(chain.best);
            best_cost = c;
            best_restart = restart;
        }
    }

    RecoveryResult out{dequantize(*best), *best,     best_cost.total, best_cost.entropy_term,
                       best_cost.residual_term, cfg.sweeps, best_restart, std::nullopt,
                       std::move(traces)};
    if (truth) out.normalized_error = recovery_error(*truth, out.x_hat);
    return out;
}

DecoderDefaults parameter_defaults(std::size_t n, double r, double delta, std::optional<double> d_o_hint) {
    if (n < 16) throw std::domain_error("parameter_defaults needs n >= 16");
    if (!(r > 1.0)) throw std::domain_error("schedule exponent r must exceed 1");
    if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
    const double log_n = std::log2(static_cast<double>(n));
    const double loglog_n = std::log2(log_n);

    DecoderDefaults out;
    // Small epsilon keeps ceil(r * 3) from jumping when r * loglog n is an integer in exact arithmetic.
    const double b_real = r * loglog_n;
    const double b_ceil = std::ceil(b_real - 1e-12);
    out.config.b = Resolution(static_cast<unsigned>(std::max(1.0, b_ceil)));
    out.config.lambda = std::pow(log_n, 2.0 * r);
    out.config.k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(log_n / (3.0 * loglog_n))));
    out.config.r = r;
    out.config.sweeps = 400;
    out.config.restarts = 4;
    out.config.schedule = {1.0, 0.97};
    if (d_o_hint) {
        const auto mc = measurement_count(n, *d_o_hint, delta);
        out.m = mc.m;
        out.m_floor_used = mc.floor_used;
    }
    return out;
}

double recovery_error(std::span<const double> x, std::span<const double> x_hat) {
    if (x.size() != x_hat.size()) throw std::domain_error("recovery_error: length mismatch");
    if (x.empty()) throw std::domain_error("recovery_error: empty signals");
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_hat[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace ucs
