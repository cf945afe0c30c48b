#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace ksa {

/// CRC-64/XZ (reflected polynomial 0xC96C5795D7870F42, init and xorout all
/// ones). crc64("123456789") == 0x995DC9BBDF1939FA.
class Crc64 {
 public:
  void update(const void* data, std::size_t len) noexcept {
    const auto* p = static_cast<const std::uint8_t*>(data);
    std::uint64_t crc = state_;
    for (std::size_t i = 0; i < len; ++i)
      crc = table()[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    state_ = crc;
  }

  std::uint64_t value() const noexcept { return ~state_; }

 private:
  static const std::array<std::uint64_t, 256>& table() {
    static const std::array<std::uint64_t, 256> t = [] {
      constexpr std::uint64_t poly = 0xC96C5795D7870F42ULL;
      std::array<std::uint64_t, 256> table{};
      for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint64_t crc = i;
        for (int bit = 0; bit < 8; ++bit)
          crc = (crc & 1) ? (crc >> 1) ^ poly : crc >> 1;
        table[i] = crc;
      }
      return table;
    }();
    return t;
  }

  std::uint64_t state_ = ~0ULL;
};

inline std::uint64_t crc64(const void* data, std::size_t len) noexcept {
  Crc64 crc;
  crc.update(data, len);
  return crc.value();
}

}  // namespace ksa
