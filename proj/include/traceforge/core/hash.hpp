#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace traceforge {

// FNV-1a 64-bit. Stable across platforms, used for content hashes in
// manifests and for deriving per-question seeds.
inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 14695981039346656037ULL) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string content_hash(std::string_view data) {
    return hex64(fnv1a64(data));
}

}  // namespace traceforge
