#pragma once

#include <cstdint>
#include <optional>

#include "ucs/quantize.hpp"

namespace ucs {

struct LzParse {
    std::uint64_t phrase_count;
    std::uint64_t n;
    Resolution b;
};

// LZ78 incremental parsing: each phrase is the shortest prefix of the
// remainder not yet in the dictionary. A trailing phrase that is already in
// the dictionary still counts as one phrase.
LzParse lz_parse(const QuantizedSignal& z);

// Code length in bits, N log N + b N + n eta_n with
// eta_n = (log n + 2 log log n + log N + 2 log log N + 2) / n.
double lz_code_length(const QuantizedSignal& z);
double lz_code_length(std::uint64_t n, std::uint64_t phrase_count, Resolution b);

// eps_n = log(((r-1) log_r n + r - 2) r^2) / log n, r = 2^b.
double lz_epsilon(std::uint64_t n, Resolution b);

// Upper bound on N_LZ over all length-n sequences, n b / ((1 - eps_n) log n - b),
// capped at n. Empty when the denominator is not positive.
std::optional<double> lz_max_phrases(std::uint64_t n, Resolution b);

// Slack added to \hat H_k in the LZ upper bound:
//   b (kb + b + 3) / ((1 - eps_n) log n - b) + eta_n + log n / (2 sqrt n),
// eta_n evaluated at lz_max_phrases so the slack does not depend on the
// sequence. Empty ("bound not applicable") in the vacuous regime.
std::optional<double> lz_entropy_slack(std::uint64_t n, Resolution b, std::size_t k);

struct LzBoundCheck {
    bool applicable;
    bool holds;
    double lhs;  // lz_code_length / n
    double rhs;  // \hat H_k + slack
};

LzBoundCheck check_lz_bound(const QuantizedSignal& z, std::size_t k);

}  // namespace ucs
