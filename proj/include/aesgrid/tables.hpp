#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "aesgrid/block.hpp"
#include "aesgrid/gf256.hpp"

namespace aesgrid {

using SBox = std::array<std::uint8_t, 256>;
using Table = std::array<std::uint32_t, 256>;

struct SBoxPair {
  SBox sbox{};
  SBox inv_sbox{};
};

inline SBoxPair build_sbox() {
  SBoxPair p;
  for (unsigned x = 0; x < 256; ++x) {
    const std::uint8_t b = gf_inverse(static_cast<std::uint8_t>(x));
    const std::uint8_t s = static_cast<std::uint8_t>(
        b ^ std::rotl(b, 1) ^ std::rotl(b, 2) ^ std::rotl(b, 3) ^ std::rotl(b, 4) ^ 0x63);
    p.sbox[x] = s;
    p.inv_sbox[s] = static_cast<std::uint8_t>(x);
  }
  return p;
}

/// Fused SubBytes/ShiftRows/MixColumns tables. fwd[0][x] is the MixColumns
/// column (2s, s, s, 3s) for s = sbox[x]; fwd[i] is fwd[0] rotated right by
/// 8*i bits, so fwd[i] is indexed by byte i of its input lane. The inverse
/// tables follow the same layout with InvMixColumns coefficients (14, 9, 13, 11)
/// applied to inv_sbox.
struct TTableSet {
  std::array<Table, 4> fwd{};
  std::array<Table, 4> inv{};
  SBox sbox{};
  SBox inv_sbox{};
};

inline TTableSet build_ttables() {
  const SBoxPair boxes = build_sbox();
  TTableSet t;
  t.sbox = boxes.sbox;
  t.inv_sbox = boxes.inv_sbox;
  for (unsigned x = 0; x < 256; ++x) {
    const std::uint8_t s = boxes.sbox[x];
    const std::uint8_t is = boxes.inv_sbox[x];
    const std::uint32_t f = pack_word(gf_mul(s, 2), s, s, gf_mul(s, 3));
    const std::uint32_t r =
        pack_word(gf_mul(is, 14), gf_mul(is, 9), gf_mul(is, 13), gf_mul(is, 11));
    for (int i = 0; i < 4; ++i) {
      t.fwd[i][x] = std::rotr(f, 8 * i);
      t.inv[i][x] = std::rotr(r, 8 * i);
    }
  }
  // Spot values from the published reference tables.
  if (t.fwd[0][0x00] != 0xC66363A5u || t.inv[0][0x00] != 0x51F4A750u)
    throw std::logic_error("T-table construction failed its spot check");
  return t;
}

// Process-wide immutable table set.
inline const TTableSet& tables() {
  static const TTableSet instance = build_ttables();
  return instance;
}

}  // namespace aesgrid
