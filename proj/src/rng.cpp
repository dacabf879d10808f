#include "catex/rng.hpp"

#include <cmath>

#include "catex/digest.hpp"

namespace catex {

double SplitMix64::next_gaussian() {
    // Box-Muller; one value per call keeps the stream position predictable
    double u = 1.0 - next_double();  // (0, 1], so log is finite
    double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace catex
