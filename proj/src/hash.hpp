#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace pinch::detail {

// 64-bit FNV-1a over explicit little-endian encodings, so hashes are stable across platforms.
class Fnv1a {
 public:
  void add_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      add_byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void add_double(double v) { add_u64(std::bit_cast<std::uint64_t>(v)); }
  void add_string(std::string_view s) {
    add_u64(s.size());
    for (char c : s) add_byte(static_cast<std::uint8_t>(c));
  }
  std::uint64_t value() const { return state_; }

 private:
  void add_byte(std::uint8_t b) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace pinch::detail
