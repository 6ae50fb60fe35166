#pragma once

#include <cstdint>

#include "aesgrid/block.hpp"
#include "aesgrid/key_schedule.hpp"
#include "aesgrid/tables.hpp"

namespace aesgrid {

namespace detail {

constexpr std::uint8_t b0(std::uint32_t w) noexcept { return static_cast<std::uint8_t>(w >> 24); }
constexpr std::uint8_t b1(std::uint32_t w) noexcept { return static_cast<std::uint8_t>(w >> 16); }
constexpr std::uint8_t b2(std::uint32_t w) noexcept { return static_cast<std::uint8_t>(w >> 8); }
constexpr std::uint8_t b3(std::uint32_t w) noexcept { return static_cast<std::uint8_t>(w); }

}  // namespace detail

// One full round. Output lane i gathers byte k from input lane (i + k) mod 4,
// which is ShiftRows moving row k left by k columns; the table lookups apply
// SubBytes and MixColumns.
inline Block128 encrypt_round(const Block128& s, const Block128& k, const TTableSet& t) noexcept {
  using namespace detail;
  const auto& T = t.fwd;
  return {T[0][b0(s.w0)] ^ T[1][b1(s.w1)] ^ T[2][b2(s.w2)] ^ T[3][b3(s.w3)] ^ k.w0,
          T[0][b0(s.w1)] ^ T[1][b1(s.w2)] ^ T[2][b2(s.w3)] ^ T[3][b3(s.w0)] ^ k.w1,
          T[0][b0(s.w2)] ^ T[1][b1(s.w3)] ^ T[2][b2(s.w0)] ^ T[3][b3(s.w1)] ^ k.w2,
          T[0][b0(s.w3)] ^ T[1][b1(s.w0)] ^ T[2][b2(s.w1)] ^ T[3][b3(s.w2)] ^ k.w3};
}

// Same shape with InvShiftRows: byte k comes from lane (i - k) mod 4.
inline Block128 decrypt_round(const Block128& s, const Block128& k, const TTableSet& t) noexcept {
  using namespace detail;
  const auto& T = t.inv;
  return {T[0][b0(s.w0)] ^ T[1][b1(s.w3)] ^ T[2][b2(s.w2)] ^ T[3][b3(s.w1)] ^ k.w0,
          T[0][b0(s.w1)] ^ T[1][b1(s.w0)] ^ T[2][b2(s.w3)] ^ T[3][b3(s.w2)] ^ k.w1,
          T[0][b0(s.w2)] ^ T[1][b1(s.w1)] ^ T[2][b2(s.w0)] ^ T[3][b3(s.w3)] ^ k.w2,
          T[0][b0(s.w3)] ^ T[1][b1(s.w2)] ^ T[2][b2(s.w1)] ^ T[3][b3(s.w0)] ^ k.w3};
}

inline Block128 encrypt_block(Block128 b, const RoundKeySchedule& ks,
                              const TTableSet& t = tables()) noexcept {
  using namespace detail;
  b ^= ks.enc_keys[0];
  for (int r = 1; r < ks.rounds; ++r) b = encrypt_round(b, ks.enc_keys[r], t);

  // Last round has no MixColumns.
  const SBox& S = t.sbox;
  const Block128 shifted{pack_word(S[b0(b.w0)], S[b1(b.w1)], S[b2(b.w2)], S[b3(b.w3)]),
                         pack_word(S[b0(b.w1)], S[b1(b.w2)], S[b2(b.w3)], S[b3(b.w0)]),
                         pack_word(S[b0(b.w2)], S[b1(b.w3)], S[b2(b.w0)], S[b3(b.w1)]),
                         pack_word(S[b0(b.w3)], S[b1(b.w0)], S[b2(b.w1)], S[b3(b.w2)])};
  return shifted ^ ks.enc_keys[ks.rounds];
}

inline Block128 decrypt_block(Block128 b, const RoundKeySchedule& ks,
                              const TTableSet& t = tables()) noexcept {
  using namespace detail;
  b ^= ks.dec_keys[0];
  for (int r = 1; r < ks.rounds; ++r) b = decrypt_round(b, ks.dec_keys[r], t);

  const SBox& S = t.inv_sbox;
  const Block128 shifted{pack_word(S[b0(b.w0)], S[b1(b.w3)], S[b2(b.w2)], S[b3(b.w1)]),
                         pack_word(S[b0(b.w1)], S[b1(b.w0)], S[b2(b.w3)], S[b3(b.w2)]),
                         pack_word(S[b0(b.w2)], S[b1(b.w1)], S[b2(b.w0)], S[b3(b.w3)]),
                         pack_word(S[b0(b.w3)], S[b1(b.w2)], S[b2(b.w1)], S[b3(b.w0)])};
  return shifted ^ ks.dec_keys[ks.rounds];
}

}  // namespace aesgrid
