#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ecl {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Labeled sub-seed: derive_seed(root, "scene") and derive_seed(root, "train")
// are independent streams of the same root.
inline uint64_t derive_seed(uint64_t root, std::string_view label) {
  return splitmix64(root ^ fnv1a(label));
}

inline uint64_t derive_seed(uint64_t root, std::string_view label, uint64_t index) {
  return splitmix64(derive_seed(root, label) + splitmix64(index));
}

}  // namespace ecl
