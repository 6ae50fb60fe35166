#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "aesgrid/block.hpp"
#include "aesgrid/error.hpp"
#include "aesgrid/gf256.hpp"
#include "aesgrid/tables.hpp"

namespace aesgrid {

inline constexpr int kMaxRounds = 14;

/// Round keys for both directions. enc_keys[r] is XORed after round r of the
/// cipher; dec_keys is the schedule of the equivalent inverse cipher: the
/// encryption keys in reverse order with InvMixColumns applied to all but the
/// first and last.
struct RoundKeySchedule {
  int key_bits = 0;
  int rounds = 0;
  std::array<Block128, kMaxRounds + 1> enc_keys{};
  std::array<Block128, kMaxRounds + 1> dec_keys{};
};

constexpr int rounds_for_key_bytes(std::size_t key_bytes) noexcept {
  switch (key_bytes) {
    case 16: return 10;
    case 24: return 12;
    case 32: return 14;
    default: return 0;
  }
}

namespace detail {

inline std::uint32_t inv_mix_column(std::uint32_t w) {
  const std::uint8_t a0 = word_byte(w, 0), a1 = word_byte(w, 1), a2 = word_byte(w, 2),
                     a3 = word_byte(w, 3);
  auto m = [](std::uint8_t x, std::uint8_t y, std::uint8_t z, std::uint8_t v) {
    return static_cast<std::uint8_t>(gf_mul(x, 14) ^ gf_mul(y, 11) ^ gf_mul(z, 13) ^ gf_mul(v, 9));
  };
  return pack_word(m(a0, a1, a2, a3), m(a1, a2, a3, a0), m(a2, a3, a0, a1), m(a3, a0, a1, a2));
}

inline std::uint32_t sub_word(std::uint32_t w, const SBox& sbox) {
  return pack_word(sbox[word_byte(w, 0)], sbox[word_byte(w, 1)], sbox[word_byte(w, 2)],
                   sbox[word_byte(w, 3)]);
}

}  // namespace detail

inline RoundKeySchedule expand_key(std::span<const std::uint8_t> key) {
  const int rounds = rounds_for_key_bytes(key.size());
  if (rounds == 0)
    throw Error(Errc::invalid_key_length,
                "key must be 16, 24 or 32 bytes, got " + std::to_string(key.size()));

  const SBox& sbox = tables().sbox;
  const std::size_t nk = key.size() / 4;
  const std::size_t total = 4 * static_cast<std::size_t>(rounds + 1);
  std::array<std::uint32_t, 4 * (kMaxRounds + 1)> w{};
  for (std::size_t i = 0; i < nk; ++i)
    w[i] = pack_word(key[4 * i], key[4 * i + 1], key[4 * i + 2], key[4 * i + 3]);

  std::uint8_t rcon = 0x01;
  for (std::size_t i = nk; i < total; ++i) {
    std::uint32_t temp = w[i - 1];
    if (i % nk == 0) {
      temp = detail::sub_word(std::rotl(temp, 8), sbox) ^ (std::uint32_t{rcon} << 24);
      rcon = xtime(rcon);
    } else if (nk > 6 && i % nk == 4) {
      temp = detail::sub_word(temp, sbox);
    }
    w[i] = w[i - nk] ^ temp;
  }

  RoundKeySchedule ks;
  ks.key_bits = static_cast<int>(key.size() * 8);
  ks.rounds = rounds;
  for (int r = 0; r <= rounds; ++r) {
    const std::size_t o = 4 * static_cast<std::size_t>(r);
    ks.enc_keys[r] = {w[o], w[o + 1], w[o + 2], w[o + 3]};
  }
  ks.dec_keys[0] = ks.enc_keys[rounds];
  ks.dec_keys[rounds] = ks.enc_keys[0];
  for (int r = 1; r < rounds; ++r) {
    const Block128& k = ks.enc_keys[rounds - r];
    ks.dec_keys[r] = {detail::inv_mix_column(k.w0), detail::inv_mix_column(k.w1),
                      detail::inv_mix_column(k.w2), detail::inv_mix_column(k.w3)};
  }
  return ks;
}

}  // namespace aesgrid
