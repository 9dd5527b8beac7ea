#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>

#include "ucs/quantize.hpp"

namespace ucs::detail {

// Packs a window of `len` symbols (b bits each) into one machine word.
struct NarrowCodec {
    using key_type = std::uint64_t;

    unsigned bits;

    static bool fits(std::size_t len, unsigned bits) { return len * bits <= 64; }

    // Window z[start], z[start+1], ..., read circularly.
    key_type encode(std::span<const Symbol> z, std::size_t start, std::size_t len) const {
        const std::size_t n = z.size();
        key_type key = 0;
        std::size_t pos = start % n;
        for (std::size_t j = 0; j < len; ++j) {
            key = (key << bits) | z[pos];
            if (++pos == n) pos = 0;
        }
        return key;
    }

    key_type encode(std::span<const Symbol> gram) const { return encode(gram, 0, gram.size()); }

    void decode(key_type key, std::span<Symbol> out) const {
        const key_type mask = bits >= 64 ? ~key_type{0} : ((key_type{1} << bits) - 1);
        for (std::size_t j = out.size(); j-- > 0;) {
            out[j] = static_cast<Symbol>(key & mask);
            key >>= bits;
        }
    }
};

// Fallback when the window does not fit a word: raw symbol bytes.
struct WideCodec {
    using key_type = std::string;

    key_type encode(std::span<const Symbol> z, std::size_t start, std::size_t len) const {
        const std::size_t n = z.size();
        key_type key(len * sizeof(Symbol), '\0');
        std::size_t pos = start % n;
        for (std::size_t j = 0; j < len; ++j) {
            std::memcpy(key.data() + j * sizeof(Symbol), &z[pos], sizeof(Symbol));
            if (++pos == n) pos = 0;
        }
        return key;
    }

    key_type encode(std::span<const Symbol> gram) const { return encode(gram, 0, gram.size()); }

    void decode(const key_type& key, std::span<Symbol> out) const {
        for (std::size_t j = 0; j < out.size(); ++j) {
            std::memcpy(&out[j], key.data() + j * sizeof(Symbol), sizeof(Symbol));
        }
    }
};

}  // namespace ucs::detail
