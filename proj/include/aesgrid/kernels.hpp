#pragma once

#include <cstdint>

#include "aesgrid/cipher.hpp"
#include "aesgrid/grid.hpp"
#include "aesgrid/kernel.hpp"

namespace aesgrid::kernels {

namespace detail {

inline Block128 load(Coord c, const BlockGrid& in) noexcept {
  return in[static_cast<std::uint64_t>(c.x) +
            static_cast<std::uint64_t>(c.y) * static_cast<std::uint64_t>(in.dims().width)];
}

}  // namespace detail

inline KernelSpec identity() {
  return {KernelId::identity,
          [](Coord c, const BlockGrid& in, const Uniforms&) { return detail::load(c, in); },
          false};
}

inline KernelSpec ecb_encrypt() {
  return {KernelId::ecb_encrypt,
          [](Coord c, const BlockGrid& in, const Uniforms& u) {
            return encrypt_block(detail::load(c, in), u.keys, *u.tables);
          },
          false};
}

inline KernelSpec ecb_decrypt() {
  return {KernelId::ecb_decrypt,
          [](Coord c, const BlockGrid& in, const Uniforms& u) {
            return decrypt_block(detail::load(c, in), u.keys, *u.tables);
          },
          false};
}

// The counter is truncated to 32 bits; callers keep base + used below 2^32.
inline KernelSpec ctr() {
  return {KernelId::ctr,
          [](Coord c, const BlockGrid& in, const Uniforms& u) {
            const auto id = static_cast<std::uint32_t>(u.base_block_offset + block_id(c, in.dims()));
            return detail::load(c, in) ^ encrypt_block(ctr_state(u.iv, id), u.keys, *u.tables);
          },
          false};
}

// XORs with the previous ciphertext cell. Cell (0,0) has no predecessor and
// reads zero, so the caller must XOR the chunk IV into output block 0.
inline KernelSpec cbc_decrypt() {
  return {KernelId::cbc_decrypt,
          [](Coord c, const BlockGrid& in, const Uniforms& u) {
            return decrypt_block(detail::load(c, in), u.keys, *u.tables) ^
                   read_cell(in, prev_coord(c, in.dims()));
          },
          true};
}

}  // namespace aesgrid::kernels
