#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qonline/errors.hpp"

namespace qonline {

// A sequence of classical bits, each element 0 or 1.
using BitString = std::vector<int>;

inline BitString bits_from_string(std::string_view s) {
    BitString out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '0') {
            out.push_back(0);
        } else if (c == '1') {
            out.push_back(1);
        } else {
            throw ValidationError("bit string may contain only '0' and '1', got '" +
                                  std::string(1, c) + "'");
        }
    }
    return out;
}

inline std::string bits_to_string(const BitString& bits) {
    std::string s;
    s.reserve(bits.size());
    for (int b : bits) s.push_back(b ? '1' : '0');
    return s;
}

inline int count_ones(const BitString& bits) {
    int n = 0;
    for (int b : bits) n += (b != 0);
    return n;
}

// FNV-1a over a sequence of ints, used for instance digests in reports.
inline std::uint64_t fnv1a(const std::vector<int>& values) {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : values) {
        auto u = static_cast<std::uint32_t>(v);
        for (int byte = 0; byte < 4; ++byte) {
            h ^= (u >> (8 * byte)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

// splitmix64, used to derive independent per-instance seeds from a root seed.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace qonline
