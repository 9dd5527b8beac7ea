#include "ucs/lz.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "ucs/empirical.hpp"

namespace ucs {

LzParse lz_parse(const QuantizedSignal& z) {
    const std::size_t n = z.size();
    if (n == 0) throw std::domain_error("lz_parse needs a non-empty sequence");
    const unsigned bits = z.resolution().bits();

    // Trie edges keyed by (node << bits) | symbol; node 0 is the empty phrase.
    std::unordered_map<std::uint64_t, std::uint64_t> child;
    child.reserve(n);
    std::uint64_t nodes = 1;
    std::uint64_t phrases = 0;
    std::uint64_t cur = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t edge = (cur << bits) | z[i];
        const auto it = child.find(edge);
        if (it != child.end()) {
            cur = it->second;
            continue;
        }
        [[maybe_unused]] const auto [pos, inserted] = child.emplace(edge, nodes++);
        assert(inserted);
        ++phrases;
        cur = 0;
    }
    if (cur != 0) ++phrases;
    return {phrases, n, z.resolution()};
}

double lz_code_length(std::uint64_t n, std::uint64_t phrase_count, Resolution b) {
    if (n < 2) throw std::domain_error("lz_code_length needs n >= 2");
    if (phrase_count < 1 || phrase_count > n) throw std::domain_error("phrase count out of range");
    const double nn = static_cast<double>(n);
    const double big_n = static_cast<double>(phrase_count);
    const double log_n = std::log2(nn);
    const double log_big_n = std::log2(big_n);
    // log log N is -inf at N = 1; N >= 2 whenever n >= 2, so this is a guard only.
    const double loglog_big_n = phrase_count >= 2 ? std::log2(log_big_n) : 0.0;
    const double eta_times_n = log_n + 2.0 * std::log2(log_n) + log_big_n + 2.0 * loglog_big_n + 2.0;
    return big_n * log_big_n + static_cast<double>(b.bits()) * big_n + eta_times_n;
}

double lz_code_length(const QuantizedSignal& z) {
    if (z.size() < 2) throw std::domain_error("lz_code_length needs n >= 2");
    const auto parse = lz_parse(z);
    return lz_code_length(parse.n, parse.phrase_count, parse.b);
}

double lz_epsilon(std::uint64_t n, Resolution b) {
    if (n < 2) throw std::domain_error("lz_epsilon needs n >= 2");
    const double r = static_cast<double>(b.alphabet_size());
    const double log_n = std::log2(static_cast<double>(n));
    const double log_r_n = log_n / static_cast<double>(b.bits());
    return std::log2(((r - 1.0) * log_r_n + r - 2.0) * r * r) / log_n;
}

std::optional<double> lz_max_phrases(std::uint64_t n, Resolution b) {
    const double log_n = std::log2(static_cast<double>(n));
    const double denom = (1.0 - lz_epsilon(n, b)) * log_n - static_cast<double>(b.bits());
    if (!(denom > 0.0)) return std::nullopt;
    const double nn = static_cast<double>(n);
    return std::clamp(nn * static_cast<double>(b.bits()) / denom, 2.0, nn);
}

std::optional<double> lz_entropy_slack(std::uint64_t n, Resolution b, std::size_t k) {
    if (n < 2) return std::nullopt;
    const double log_n = std::log2(static_cast<double>(n));
    const double bb = static_cast<double>(b.bits());
    const double denom = (1.0 - lz_epsilon(n, b)) * log_n - bb;
    if (!(denom > 0.0)) return std::nullopt;

    const double big_n = *lz_max_phrases(n, b);
    const double nn = static_cast<double>(n);
    const double log_big_n = std::log2(big_n);
    const double eta = (log_n + 2.0 * std::log2(log_n) + log_big_n + 2.0 * std::log2(log_big_n) + 2.0) / nn;
    const double gamma = eta + log_n / (2.0 * std::sqrt(nn));
    return bb * (static_cast<double>(k) * bb + bb + 3.0) / denom + gamma;
}

LzBoundCheck check_lz_bound(const QuantizedSignal& z, std::size_t k) {
    const auto slack = lz_entropy_slack(z.size(), z.resolution(), k);
    if (!slack) return {false, false, 0.0, 0.0};
    const double lhs = lz_code_length(z) / static_cast<double>(z.size());
    const double rhs = cond_empirical_entropy(z, k) + *slack;
    return {true, lhs <= rhs, lhs, rhs};
}

}  // namespace ucs
