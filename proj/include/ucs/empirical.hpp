#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ucs/detail/gram_key.hpp"
#include "ucs/quantize.hpp"
#include "ucs/sources.hpp"

namespace ucs {

// Circular (k+1)-gram counts of a quantized sequence together with the k-gram
// marginal. Window i (0-based) is (z_{i-k}, ..., z_i) with indices taken mod n,
// so both tables always total n. Immutable once built.
class ContextCounts {
public:
    using GramVisitor = std::function<void(std::span<const Symbol>, std::uint64_t)>;

    ContextCounts(const QuantizedSignal& z, std::size_t k);

    std::size_t order() const noexcept { return k_; }
    Resolution resolution() const noexcept { return res_; }
    std::uint64_t total() const noexcept { return n_; }

    // Count of the (k+1)-gram `gram` (oldest symbol first).
    std::uint64_t gram_count(std::span<const Symbol> gram) const;
    // Count of the k-gram context `ctx`.
    std::uint64_t context_count(std::span<const Symbol> ctx) const;

    std::size_t distinct_grams() const;
    std::size_t distinct_contexts() const;

    void for_each_gram(const GramVisitor& visit) const;
    void for_each_context(const GramVisitor& visit) const;

    // H(p_{k+1}) and H(p_k) in bits.
    double joint_entropy() const;
    double context_entropy() const;

private:
    template <class Codec>
    struct Tables {
        Codec codec;
        std::unordered_map<typename Codec::key_type, std::uint64_t> grams;
        std::unordered_map<typename Codec::key_type, std::uint64_t> contexts;
    };

    std::size_t k_;
    Resolution res_;
    std::uint64_t n_;
    std::variant<Tables<detail::NarrowCodec>, Tables<detail::WideCodec>> tables_;
};

// Shannon entropy in bits of a count vector, -sum (c/N) log2 (c/N).
double entropy(std::span<const std::uint64_t> counts);
// Shannon entropy in bits of an explicit probability vector.
double entropy(std::span<const double> probabilities);
// Entropy of the (k+1)-gram empirical law carried by `counts`.
double entropy(const ContextCounts& counts);

ContextCounts count_contexts(const QuantizedSignal& z, std::size_t k);

// \hat H_k(z) = H(p_{k+1}) - H(p_k), in bits.
double cond_empirical_entropy(const QuantizedSignal& z, std::size_t k);
double cond_empirical_entropy(const ContextCounts& counts);

// \hat H_k([x]_b) / b.
double id_estimate(std::span<const double> x, Resolution b, std::size_t k);

// -eps log eps + eps log |X|: bound on |H(p) - H(q)| when ||p - q||_1 <= eps.
double tv_entropy_bound(double epsilon, std::uint64_t alphabet_size);

// L1 distance between the (k+1)-gram empirical laws of two count tables.
double l1_distance(const ContextCounts& a, const ContextCounts& b);

struct ProbeRow {
    std::size_t n;
    double distance;
};

// For each n: L1 distance between the empirical (k+1)-gram law of one
// length-n realization and a reference law taken from a realization of
// length reference_factor * max(n_grid) drawn on an independent stream.
std::vector<ProbeRow> mixing_convergence_probe(const SourceSpec& spec, Resolution b, std::size_t k,
                                               std::span<const std::size_t> n_grid,
                                               std::size_t reference_factor = 100);

}  // namespace ucs
