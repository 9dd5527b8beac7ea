#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ucs/empirical.hpp"
#include "ucs/sources.hpp"

using namespace ucs;

namespace {

QuantizedSignal qs(std::vector<Symbol> s, unsigned b) { return QuantizedSignal(std::move(s), Resolution(b)); }

std::vector<Symbol> random_symbols(std::size_t n, unsigned b, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<Symbol> z(n);
    for (auto& s : z) s = static_cast<Symbol>(gen() >> (64 - b));
    return z;
}

// Sticky sequence: repeats the last symbol with probability 0.8, so Ĥ_k is
// not trivially b.
std::vector<Symbol> sticky_symbols(std::size_t n, unsigned b, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<Symbol> z(n);
    Symbol cur = 0;
    for (auto& s : z) {
        if (gen() % 5 == 0) cur = static_cast<Symbol>(gen() >> (64 - b));
        s = cur;
    }
    return z;
}

}  // namespace

TEST(ContextCounts, Examples) {
    // a = 0, b = 1
    const auto c = count_contexts(qs({0, 0, 1, 0}, 1), 1);
    const Symbol a[] = {0}, bb[] = {1};
    EXPECT_EQ(c.context_count(a), 3u);
    EXPECT_EQ(c.context_count(bb), 1u);
    EXPECT_EQ(c.total(), 4u);

    const auto flat = count_contexts(qs(std::vector<Symbol>(9, 2), 2), 3);
    EXPECT_EQ(flat.distinct_grams(), 1u);
    const Symbol g[] = {2, 2, 2, 2};
    EXPECT_EQ(flat.gram_count(g), 9u);

    const auto alt = count_contexts(qs({0, 1, 0, 1}, 1), 1);
    const Symbol ab[] = {0, 1}, ba[] = {1, 0}, aa[] = {0, 0};
    EXPECT_EQ(alt.gram_count(ab), 2u);
    EXPECT_EQ(alt.gram_count(ba), 2u);
    EXPECT_EQ(alt.gram_count(aa), 0u);
}

TEST(ContextCounts, Errors) {
    EXPECT_THROW(count_contexts(qs({0, 1}, 1), 2), std::domain_error);
    EXPECT_THROW(count_contexts(qs({}, 1), 0), std::domain_error);
}

TEST(ContextCounts, MarginalsAgreeBothWays) {
    for (std::size_t k : {1u, 2u, 3u}) {
        const auto z = random_symbols(300, 2, 40 + k);
        const auto c = count_contexts(qs(z, 2), k);
        std::uint64_t sum = 0;
        std::map<std::vector<Symbol>, std::uint64_t> drop_last, drop_first;
        c.for_each_gram([&](std::span<const Symbol> g, std::uint64_t n) {
            sum += n;
            drop_last[std::vector<Symbol>(g.begin(), g.end() - 1)] += n;
            drop_first[std::vector<Symbol>(g.begin() + 1, g.end())] += n;
        });
        EXPECT_EQ(sum, 300u);
        EXPECT_EQ(drop_last, drop_first);
        c.for_each_context([&](std::span<const Symbol> ctx, std::uint64_t n) {
            EXPECT_EQ(drop_last[std::vector<Symbol>(ctx.begin(), ctx.end())], n);
        });
    }
}

TEST(CondEntropy, Examples) {
    EXPECT_EQ(cond_empirical_entropy(qs(std::vector<Symbol>(20, 3), 2), 2), 0.0);
    EXPECT_NEAR(cond_empirical_entropy(qs({0, 1, 0, 1}, 1), 1), 0.0, 1e-15);
    // i.i.d. uniform symbols: plug-in bias is about -(r-1)/(2 n ln 2).
    const std::size_t n = std::size_t{1} << 17;
    const auto z = random_symbols(n, 3, 5);
    const double bias = -7.0 / (2.0 * n * std::log(2.0));
    EXPECT_NEAR(cond_empirical_entropy(qs(z, 3), 0), 3.0 + bias, 0.05);
}

TEST(CondEntropy, MatchesEnumerationOracle) {
    for (unsigned b : {1u, 2u, 5u}) {
        for (std::size_t k : {0u, 1u, 2u, 4u}) {
            const auto z = sticky_symbols(500, b, 100 * b + k);
            EXPECT_NEAR(cond_empirical_entropy(qs(z, b), k), oracle::cond_entropy(z, k), 1e-12)
                << "b=" << b << " k=" << k;
        }
    }
}

TEST(CondEntropy, WideKeysMatchOracle) {
    // (k+1) b = 11 * 8 bits does not fit a 64-bit key.
    const auto z = sticky_symbols(400, 8, 9);
    const auto c = count_contexts(qs(z, 8), 10);
    EXPECT_NEAR(cond_empirical_entropy(c), oracle::cond_entropy(z, 10), 1e-12);
    EXPECT_EQ(c.total(), 400u);
}

TEST(Entropy, Examples) {
    const std::uint64_t one[] = {7};
    EXPECT_EQ(entropy(std::span<const std::uint64_t>(one)), 0.0);
    const std::uint64_t two[] = {4, 4};
    EXPECT_DOUBLE_EQ(entropy(std::span<const std::uint64_t>(two)), 1.0);
    const std::uint64_t three[] = {1, 2, 5};
    EXPECT_NEAR(entropy(std::span<const std::uint64_t>(three)), 1.2988, 1e-4);
    const std::uint64_t none[] = {0, 0};
    EXPECT_THROW(entropy(std::span<const std::uint64_t>(none)), std::domain_error);
    const double probs[] = {0.25, 0.25, 0.5};
    EXPECT_DOUBLE_EQ(entropy(std::span<const double>(probs)), 1.5);
    const double bad[] = {0.5, 0.2};
    EXPECT_THROW(entropy(std::span<const double>(bad)), std::domain_error);
}

TEST(TvEntropyBound, Examples) {
    EXPECT_DOUBLE_EQ(tv_entropy_bound(1.0, 2), 1.0);
    EXPECT_DOUBLE_EQ(tv_entropy_bound(0.5, 4), 1.5);
    EXPECT_NEAR(tv_entropy_bound(0.1, 256), 1.1322, 1e-4);
    EXPECT_THROW(tv_entropy_bound(0.0, 4), std::domain_error);
    EXPECT_THROW(tv_entropy_bound(1.5, 4), std::domain_error);
    EXPECT_THROW(tv_entropy_bound(0.5, 0), std::domain_error);
}

TEST(TvEntropyBound, HoldsOnRandomPairs) {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t a = 2 + gen() % 30;
        std::vector<double> p(a), q(a);
        for (auto& v : p) v = u(gen);
        const double s = std::accumulate(p.begin(), p.end(), 0.0);
        for (auto& v : p) v /= s;
        // q = (1 - t) p + t w has ||p - q||_1 = t ||p - w||_1; rescale t so the
        // distance is exactly eps.
        std::vector<double> w(a);
        for (auto& v : w) v = u(gen);
        const double sw = std::accumulate(w.begin(), w.end(), 0.0);
        double dist = 0.0;
        for (std::size_t i = 0; i < a; ++i) dist += std::abs(p[i] - w[i] / sw);
        const double eps = 0.5 * u(gen) + 1e-6;
        const double mix = std::min(1.0, eps / dist);
        double l1 = 0.0;
        for (std::size_t i = 0; i < a; ++i) {
            q[i] = (1.0 - mix) * p[i] + mix * w[i] / sw;
            l1 += std::abs(p[i] - q[i]);
        }
        if (l1 <= 0.0 || l1 > 0.5) continue;
        const double gap = std::abs(entropy(std::span<const double>(p)) - entropy(std::span<const double>(q)));
        ASSERT_LE(gap, tv_entropy_bound(l1, a) + 1e-12) << "trial " << t;
    }
}

TEST(EmpiricalProperties, ChainIdentityRangeMonotonicity) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const unsigned b = 1 + seed % 4;
        const auto z = seed % 2 ? random_symbols(200, b, seed) : sticky_symbols(200, b, seed);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= 5; ++k) {
            const auto c = count_contexts(qs(z, b), k);
            const double h = cond_empirical_entropy(c);
            EXPECT_GE(h, 0.0);
            EXPECT_LE(h, static_cast<double>(b));
            EXPECT_NEAR(h, std::max(0.0, entropy(c) - c.context_entropy()), 1e-12);
            EXPECT_LE(h, prev + 1e-12) << "seed " << seed << " k " << k;
            prev = h;
        }
    }
}

TEST(EmpiricalProperties, PermutationSensitivity) {
    auto z = sticky_symbols(500, 3, 8);
    const double h0 = cond_empirical_entropy(qs(z, 3), 0);
    const double h1 = cond_empirical_entropy(qs(z, 3), 1);
    std::mt19937_64 gen(8);
    std::shuffle(z.begin(), z.end(), gen);
    EXPECT_NEAR(cond_empirical_entropy(qs(z, 3), 0), h0, 1e-12);
    EXPECT_GT(std::abs(cond_empirical_entropy(qs(z, 3), 1) - h1), 0.1);
}

TEST(IdEstimate, Examples) {
    EXPECT_EQ(id_estimate(RealSignal(1000, 0.0), Resolution(6), 1), 0.0);
    const std::size_t n = std::size_t{1} << 17;
    const auto u = generate({IidMixture{1.0, ContinuousComponent::uniform(0.0, 1.0)}, 3}, n);
    EXPECT_NEAR(id_estimate(u, Resolution(8), 0), 1.0, 0.03);
    const auto x = generate({IidMixture{0.3, ContinuousComponent::uniform(0.0, 1.0)}, 4}, n);
    EXPECT_NEAR(id_estimate(x, Resolution(8), 0), oracle::mixture_quantized_entropy(0.3, 8) / 8.0, 0.03);
}

TEST(MixingProbe, ConstantSourceIsExact) {
    const std::size_t grid[] = {256, 1024};
    const auto rows = mixing_convergence_probe({IidMixture{0.0, ContinuousComponent::uniform(0.0, 1.0)}, 3},
                                               Resolution(2), 1, grid);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_EQ(r.distance, 0.0);
}

TEST(MixingProbe, IidMixtureDistanceShrinks) {
    const std::size_t grid[] = {1u << 10, 1u << 14};
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto rows = mixing_convergence_probe(
            {IidMixture{0.5, ContinuousComponent::uniform(0.0, 1.0)}, seed}, Resolution(2), 0, grid);
        wins += rows[1].distance < rows[0].distance;
    }
    EXPECT_GE(wins, 9);
}

TEST(MixingProbe, PiecewiseMarkovDistanceShrinks) {
    const std::size_t grid[] = {1u << 12, 1u << 16};
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto rows = mixing_convergence_probe(
            {PiecewiseMarkov{0.1, ContinuousComponent::uniform(0.0, 1.0)}, seed}, Resolution(3), 1, grid);
        wins += rows[1].distance < rows[0].distance;
    }
    EXPECT_GE(wins, 9);
}

TEST(L1Distance, SelfAndDisjoint) {
    const auto a = count_contexts(qs({0, 0, 0, 0}, 1), 0);
    const auto b = count_contexts(qs({1, 1, 1, 1}, 1), 0);
    EXPECT_EQ(l1_distance(a, a), 0.0);
    EXPECT_DOUBLE_EQ(l1_distance(a, b), 2.0);
    EXPECT_THROW(l1_distance(a, count_contexts(qs({1, 1, 1, 1}, 1), 1)), std::invalid_argument);
}
