#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace aesgrid {

using Bytes16 = std::array<std::uint8_t, 16>;

// Packs b0..b3 with b0 in the most significant byte.
constexpr std::uint32_t pack_word(std::uint8_t b0, std::uint8_t b1, std::uint8_t b2,
                                  std::uint8_t b3) noexcept {
  return (std::uint32_t{b0} << 24) | (std::uint32_t{b1} << 16) | (std::uint32_t{b2} << 8) |
         std::uint32_t{b3};
}

// Byte n of a word, n = 0 being the most significant.
constexpr std::uint8_t word_byte(std::uint32_t w, int n) noexcept {
  return static_cast<std::uint8_t>(w >> (24 - 8 * n));
}

/// One 128-bit AES block as four 32-bit lanes. Lane k holds state column k,
/// i.e. input bytes 4k..4k+3, most significant byte first. This is also the
/// content of one grid cell.
struct Block128 {
  std::uint32_t w0 = 0;
  std::uint32_t w1 = 0;
  std::uint32_t w2 = 0;
  std::uint32_t w3 = 0;

  static constexpr Block128 from_bytes(std::span<const std::uint8_t, 16> in) noexcept {
    return {pack_word(in[0], in[1], in[2], in[3]), pack_word(in[4], in[5], in[6], in[7]),
            pack_word(in[8], in[9], in[10], in[11]), pack_word(in[12], in[13], in[14], in[15])};
  }

  constexpr void to_bytes(std::span<std::uint8_t, 16> out) const noexcept {
    const std::uint32_t lanes[4] = {w0, w1, w2, w3};
    for (std::size_t k = 0; k < 4; ++k)
      for (int n = 0; n < 4; ++n) out[4 * k + static_cast<std::size_t>(n)] = word_byte(lanes[k], n);
  }

  constexpr Bytes16 to_bytes() const noexcept {
    Bytes16 out{};
    to_bytes(std::span<std::uint8_t, 16>(out));
    return out;
  }

  constexpr Block128& operator^=(const Block128& o) noexcept {
    w0 ^= o.w0;
    w1 ^= o.w1;
    w2 ^= o.w2;
    w3 ^= o.w3;
    return *this;
  }

  friend constexpr Block128 operator^(Block128 a, const Block128& b) noexcept { return a ^= b; }
  friend constexpr bool operator==(const Block128&, const Block128&) = default;
};

static_assert(sizeof(Block128) == 16);

}  // namespace aesgrid
