#pragma once
#include <cstdint>
#include <string_view>

namespace ghostsim {

inline constexpr std::string_view kVersion = "0.1.0";

/// FNV-1a 64-bit hash, used to fingerprint scenario files and output buffers.
inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ghostsim
