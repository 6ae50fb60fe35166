#pragma once

#include <cstdint>

namespace aesgrid {

// Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
inline constexpr std::uint16_t kAesPolynomial = 0x11B;

constexpr std::uint8_t xtime(std::uint8_t a) noexcept {
  return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? (kAesPolynomial & 0xFF) : 0));
}

constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) noexcept {
  std::uint8_t product = 0;
  while (b != 0) {
    if (b & 1) product ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return product;
}

// a^254 == a^-1 for a != 0; maps 0 to 0 as the S-box construction requires.
constexpr std::uint8_t gf_inverse(std::uint8_t a) noexcept {
  std::uint8_t result = 1;
  std::uint8_t base = a;
  for (unsigned e = 254; e != 0; e >>= 1) {
    if (e & 1) result = gf_mul(result, base);
    base = gf_mul(base, base);
  }
  return a == 0 ? 0 : result;
}

}  // namespace aesgrid
