#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace hmmrd {

/// Incremental 64-bit FNV-1a. Stable across platforms, unlike std::hash.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= bytes[i];
      state_ *= 1099511628211ull;
    }
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 1469598103934665603ull;
};

}  // namespace hmmrd
