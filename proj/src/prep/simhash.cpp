#include "kumpul/prep/simhash.hpp"

#include <array>

#include "kumpul/core/text.hpp"

namespace kumpul::prep {

std::uint64_t feature_hash(std::string_view token) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

std::uint64_t simhash64(std::string_view text) {
    std::array<long, 64> votes{};
    for (const auto& token : tokenize(text)) {
        const auto h = feature_hash(token);
        for (int bit = 0; bit < 64; ++bit) {
            votes[static_cast<std::size_t>(bit)] += ((h >> bit) & 1U) ? 1 : -1;
        }
    }
    std::uint64_t signature = 0;
    for (int bit = 0; bit < 64; ++bit) {
        if (votes[static_cast<std::size_t>(bit)] > 0) {
            signature |= std::uint64_t{1} << bit;
        }
    }
    return signature;
}

} // namespace kumpul::prep
