#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace kumpul::prep {

/// 64-bit feature hash: FNV-1a over the token's UTF-8 bytes, then the
/// SplitMix64 finalizer so every output bit depends on every input byte.
std::uint64_t feature_hash(std::string_view token) noexcept;

/// Charikar SimHash over tokenize(text), one unit of weight per token
/// occurrence. Bit i is set when the weighted vote for it is positive, so
/// an empty text maps to 0.
std::uint64_t simhash64(std::string_view text);

inline int hamming(std::uint64_t a, std::uint64_t b) noexcept {
    return std::popcount(a ^ b);
}

} // namespace kumpul::prep
