#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ucs {

using RealSignal = std::vector<double>;
using Symbol = std::uint32_t;

// Bits per sample. The quantized alphabet X_b has exactly 2^b symbols.
class Resolution {
public:
    static constexpr unsigned max_bits = 30;

    explicit Resolution(unsigned bits);

    unsigned bits() const noexcept { return bits_; }
    std::uint64_t alphabet_size() const noexcept { return std::uint64_t{1} << bits_; }
    double step() const noexcept;

    friend bool operator==(Resolution, Resolution) = default;

private:
    unsigned bits_;
};

// [x^n]_b stored as symbol indices; symbol s stands for the real value s * 2^-b.
class QuantizedSignal {
public:
    QuantizedSignal(std::vector<Symbol> symbols, Resolution res);

    Resolution resolution() const noexcept { return res_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    std::span<const Symbol> symbols() const noexcept { return symbols_; }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }

    // Replaces one symbol; throws if out of alphabet.
    void set(std::size_t i, Symbol s);

    friend bool operator==(const QuantizedSignal&, const QuantizedSignal&) = default;

private:
    std::vector<Symbol> symbols_;
    Resolution res_;
};

// Index of [x]_b, in [0, 2^b - 1]. x = 1 maps to the top symbol.
Symbol bit_quantize_index(double x, Resolution b);

// [x]_b: first b bits of the binary expansion of x in [0, 1].
double bit_quantize(double x, Resolution b);

// <x>_l = floor(l x) / l, with the floor taken of the exact product.
double level_quantize(double x, std::uint64_t levels);

QuantizedSignal quantize_signal(std::span<const double> x, Resolution b);
RealSignal dequantize(const QuantizedSignal& z);

}  // namespace ucs
