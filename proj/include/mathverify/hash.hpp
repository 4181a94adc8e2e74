// hash.hpp - Stable 64-bit FNV-1a, for reproducible seeding and log keys.

#pragma once

#include <cstdint>
#include <string_view>

namespace mathverify {

constexpr uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace mathverify
