#include "ucs/quantize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ucs {

Resolution::Resolution(unsigned bits) : bits_(bits) {
    if (bits < 1 || bits > max_bits) {
        throw std::domain_error("resolution must be in [1, " + std::to_string(max_bits) +
                                "] bits, got " + std::to_string(bits));
    }
}

double Resolution::step() const noexcept { return std::ldexp(1.0, -static_cast<int>(bits_)); }

QuantizedSignal::QuantizedSignal(std::vector<Symbol> symbols, Resolution res)
    : symbols_(std::move(symbols)), res_(res) {
    const auto r = res_.alphabet_size();
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i] >= r) {
            throw std::domain_error("symbol " + std::to_string(symbols_[i]) + " at index " +
                                    std::to_string(i) + " outside alphabet of size " +
                                    std::to_string(r));
        }
    }
}

void QuantizedSignal::set(std::size_t i, Symbol s) {
    if (s >= res_.alphabet_size()) throw std::domain_error("symbol outside alphabet");
    symbols_.at(i) = s;
}

Symbol bit_quantize_index(double x, Resolution b) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("bit_quantize expects x in [0, 1], got " + std::to_string(x));
    }
    // Scaling by a power of two is exact, so the floor is the exact binary truncation.
    const double scaled = std::ldexp(x, static_cast<int>(b.bits()));
    const auto top = static_cast<Symbol>(b.alphabet_size() - 1);
    if (x == 1.0) return top;
    return static_cast<Symbol>(std::floor(scaled));
}

double bit_quantize(double x, Resolution b) {
    return std::ldexp(static_cast<double>(bit_quantize_index(x, b)), -static_cast<int>(b.bits()));
}

double level_quantize(double x, std::uint64_t levels) {
    if (levels == 0) throw std::domain_error("level_quantize needs at least one level");
    const double l = static_cast<double>(levels);
    double f = std::floor(l * x);
    // l*x is rounded; fma gives the sign of the exact l*x - f, fixing an off-by-one floor.
    if (std::fma(l, x, -f) < 0.0) {
        f -= 1.0;
    } else if (std::fma(l, x, -(f + 1.0)) >= 0.0) {
        f += 1.0;
    }
    return f / l;
}

QuantizedSignal quantize_signal(std::span<const double> x, Resolution b) {
    std::vector<Symbol> symbols(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) symbols[i] = bit_quantize_index(x[i], b);
    return QuantizedSignal(std::move(symbols), b);
}

RealSignal dequantize(const QuantizedSignal& z) {
    const double step = z.resolution().step();
    RealSignal out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]) * step;
    return out;
}

}  // namespace ucs
