#include "ucs/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ucs {

namespace {

template <class Map>
double entropy_of_map(const Map& table, std::uint64_t total) {
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (const auto& [key, c] : table) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

constexpr std::uint64_t reference_stream = 0x5EF0'0000'0000'0001ULL;

}  // namespace

ContextCounts::ContextCounts(const QuantizedSignal& z, std::size_t k)
    : k_(k), res_(z.resolution()), n_(z.size()),
      tables_(Tables<detail::NarrowCodec>{detail::NarrowCodec{z.resolution().bits()}, {}, {}}) {
    const std::size_t n = z.size();
    if (n == 0) throw std::domain_error("empirical counts need a non-empty sequence");
    if (k >= n) {
        throw std::domain_error("context order k=" + std::to_string(k) +
                                " must be below sequence length n=" + std::to_string(n));
    }
    if (!detail::NarrowCodec::fits(k + 1, res_.bits())) {
        tables_ = Tables<detail::WideCodec>{};
    }
    std::visit(
        [&](auto& t) {
            const auto sym = z.symbols();
            for (std::size_t i = 0; i < n; ++i) {
                // Window ending at i starts at i - k (mod n).
                const std::size_t start = (i + n - k) % n;
                ++t.grams[t.codec.encode(sym, start, k + 1)];
                ++t.contexts[t.codec.encode(sym, start, k)];
            }
        },
        tables_);
}

std::uint64_t ContextCounts::gram_count(std::span<const Symbol> gram) const {
    if (gram.size() != k_ + 1) throw std::invalid_argument("gram length must be k + 1");
    return std::visit(
        [&](const auto& t) -> std::uint64_t {
            const auto it = t.grams.find(t.codec.encode(gram));
            return it == t.grams.end() ? 0 : it->second;
        },
        tables_);
}

std::uint64_t ContextCounts::context_count(std::span<const Symbol> ctx) const {
    if (ctx.size() != k_) throw std::invalid_argument("context length must be k");
    if (k_ == 0) return n_;
    return std::visit(
        [&](const auto& t) -> std::uint64_t {
            const auto it = t.contexts.find(t.codec.encode(ctx));
            return it == t.contexts.end() ? 0 : it->second;
        },
        tables_);
}

std::size_t ContextCounts::distinct_grams() const {
    return std::visit([](const auto& t) { return t.grams.size(); }, tables_);
}

std::size_t ContextCounts::distinct_contexts() const {
    return std::visit([](const auto& t) { return t.contexts.size(); }, tables_);
}

void ContextCounts::for_each_gram(const GramVisitor& visit) const {
    std::vector<Symbol> buf(k_ + 1);
    std::visit(
        [&](const auto& t) {
            for (const auto& [key, c] : t.grams) {
                t.codec.decode(key, buf);
                visit(buf, c);
            }
        },
        tables_);
}

void ContextCounts::for_each_context(const GramVisitor& visit) const {
    std::vector<Symbol> buf(k_);
    std::visit(
        [&](const auto& t) {
            for (const auto& [key, c] : t.contexts) {
                t.codec.decode(key, buf);
                visit(buf, c);
            }
        },
        tables_);
}

double ContextCounts::joint_entropy() const {
    return std::visit([&](const auto& t) { return entropy_of_map(t.grams, n_); }, tables_);
}

double ContextCounts::context_entropy() const {
    return std::visit([&](const auto& t) { return entropy_of_map(t.contexts, n_); }, tables_);
}

double entropy(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw std::domain_error("entropy of an empty count table");
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double entropy(std::span<const double> probabilities) {
    if (probabilities.empty()) throw std::domain_error("entropy of an empty distribution");
    double sum = 0.0;
    double h = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) throw std::domain_error("negative probability");
        sum += p;
        if (p > 0.0) h -= p * std::log2(p);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("probabilities must sum to 1");
    return h;
}

double entropy(const ContextCounts& counts) { return counts.joint_entropy(); }

ContextCounts count_contexts(const QuantizedSignal& z, std::size_t k) { return ContextCounts(z, k); }

double cond_empirical_entropy(const ContextCounts& counts) {
    const double h = counts.joint_entropy() - counts.context_entropy();
    return std::clamp(h, 0.0, static_cast<double>(counts.resolution().bits()));
}

double cond_empirical_entropy(const QuantizedSignal& z, std::size_t k) {
    return cond_empirical_entropy(ContextCounts(z, k));
}

double id_estimate(std::span<const double> x, Resolution b, std::size_t k) {
    return cond_empirical_entropy(quantize_signal(x, b), k) / static_cast<double>(b.bits());
}

double tv_entropy_bound(double epsilon, std::uint64_t alphabet_size) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::domain_error("tv_entropy_bound needs 0 < epsilon <= 1");
    }
    if (alphabet_size < 1) throw std::domain_error("alphabet size must be >= 1");
    return -epsilon * std::log2(epsilon) + epsilon * std::log2(static_cast<double>(alphabet_size));
}

double l1_distance(const ContextCounts& a, const ContextCounts& b) {
    if (a.order() != b.order() || a.resolution() != b.resolution()) {
        throw std::invalid_argument("l1_distance needs tables of equal order and resolution");
    }
    const double na = static_cast<double>(a.total());
    const double nb = static_cast<double>(b.total());
    double d = 0.0;
    a.for_each_gram([&](std::span<const Symbol> g, std::uint64_t c) {
        d += std::abs(static_cast<double>(c) / na - static_cast<double>(b.gram_count(g)) / nb);
    });
    b.for_each_gram([&](std::span<const Symbol> g, std::uint64_t c) {
        if (a.gram_count(g) == 0) d += static_cast<double>(c) / nb;
    });
    return d;
}

std::vector<ProbeRow> mixing_convergence_probe(const SourceSpec& spec, Resolution b, std::size_t k,
                                               std::span<const std::size_t> n_grid,
                                               std::size_t reference_factor) {
    if (n_grid.empty()) throw std::invalid_argument("mixing probe needs a non-empty n grid");
    if (reference_factor < 100) throw std::domain_error("reference run must be >= 100x the grid");
    const std::size_t n_max = *std::max_element(n_grid.begin(), n_grid.end());

    SourceSpec ref_spec = spec;
    ref_spec.seed = derive_seed(spec.seed, reference_stream);
    const ContextCounts reference(quantize_signal(generate(ref_spec, reference_factor * n_max), b), k);

    std::vector<ProbeRow> rows;
    rows.reserve(n_grid.size());
    for (std::size_t n : n_grid) {
        SourceSpec s = spec;
        s.seed = derive_seed(spec.seed, n);
        const ContextCounts sample(quantize_signal(generate(s, n), b), k);
        rows.push_back({n, l1_distance(sample, reference)});
    }
    return rows;
}

}  // namespace ucs
