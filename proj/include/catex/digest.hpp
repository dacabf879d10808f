#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace catex {

// FNV-1a 64-bit content digest; used to fingerprint configs and dataset files
// so every output can state exactly which inputs produced it.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes);

}  // namespace catex
