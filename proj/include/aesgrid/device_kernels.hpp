#pragma once

namespace aesgrid::device {

// OpenCL C source for the device backend. Only 32-bit unsigned integer
// operations and table loads are used.
//
// Buffer layout:
//   tables  10 rows of 256 words: fwd T0..T3, inv T0..T3, sbox, inv_sbox
//   params  [0, 60)  round keys, 4 words per round, direction already chosen
//           [60]     rounds
//           [61, 65) iv lanes w0..w3
//           [65]     base block offset (low 32 bits)
//           [66]     grid width
//           [67]     grid height
//   cells   uint4 per block, lanes w0..w3
inline constexpr const char* kKernelSource = R"CLC(
#define B0(w) ((w) >> 24)
#define B1(w) (((w) >> 16) & 0xffu)
#define B2(w) (((w) >> 8) & 0xffu)
#define B3(w) ((w) & 0xffu)
#define T(i, x) tables[(i) * 256u + (x)]
#define SB(x) tables[8u * 256u + (x)]
#define ISB(x) tables[9u * 256u + (x)]

#define P_ROUNDS 60
#define P_IV 61
#define P_BASE 65
#define P_WIDTH 66
#define P_HEIGHT 67

uint4 round_key(__constant const uint* p, uint r) {
  return (uint4)(p[4u * r], p[4u * r + 1u], p[4u * r + 2u], p[4u * r + 3u]);
}

uint4 encrypt_block(uint4 s, __constant const uint* p, __global const uint* tables) {
  const uint rounds = p[P_ROUNDS];
  s ^= round_key(p, 0u);
  for (uint r = 1u; r < rounds; ++r) {
    uint4 o;
    o.x = T(0u, B0(s.x)) ^ T(1u, B1(s.y)) ^ T(2u, B2(s.z)) ^ T(3u, B3(s.w));
    o.y = T(0u, B0(s.y)) ^ T(1u, B1(s.z)) ^ T(2u, B2(s.w)) ^ T(3u, B3(s.x));
    o.z = T(0u, B0(s.z)) ^ T(1u, B1(s.w)) ^ T(2u, B2(s.x)) ^ T(3u, B3(s.y));
    o.w = T(0u, B0(s.w)) ^ T(1u, B1(s.x)) ^ T(2u, B2(s.y)) ^ T(3u, B3(s.z));
    s = o ^ round_key(p, r);
  }
  uint4 o;
  o.x = (SB(B0(s.x)) << 24) | (SB(B1(s.y)) << 16) | (SB(B2(s.z)) << 8) | SB(B3(s.w));
  o.y = (SB(B0(s.y)) << 24) | (SB(B1(s.z)) << 16) | (SB(B2(s.w)) << 8) | SB(B3(s.x));
  o.z = (SB(B0(s.z)) << 24) | (SB(B1(s.w)) << 16) | (SB(B2(s.x)) << 8) | SB(B3(s.y));
  o.w = (SB(B0(s.w)) << 24) | (SB(B1(s.x)) << 16) | (SB(B2(s.y)) << 8) | SB(B3(s.z));
  return o ^ round_key(p, rounds);
}

uint4 decrypt_block(uint4 s, __constant const uint* p, __global const uint* tables) {
  const uint rounds = p[P_ROUNDS];
  s ^= round_key(p, 0u);
  for (uint r = 1u; r < rounds; ++r) {
    uint4 o;
    o.x = T(4u, B0(s.x)) ^ T(5u, B1(s.w)) ^ T(6u, B2(s.z)) ^ T(7u, B3(s.y));
    o.y = T(4u, B0(s.y)) ^ T(5u, B1(s.x)) ^ T(6u, B2(s.w)) ^ T(7u, B3(s.z));
    o.z = T(4u, B0(s.z)) ^ T(5u, B1(s.y)) ^ T(6u, B2(s.x)) ^ T(7u, B3(s.w));
    o.w = T(4u, B0(s.w)) ^ T(5u, B1(s.z)) ^ T(6u, B2(s.y)) ^ T(7u, B3(s.x));
    s = o ^ round_key(p, r);
  }
  uint4 o;
  o.x = (ISB(B0(s.x)) << 24) | (ISB(B1(s.w)) << 16) | (ISB(B2(s.z)) << 8) | ISB(B3(s.y));
  o.y = (ISB(B0(s.y)) << 24) | (ISB(B1(s.x)) << 16) | (ISB(B2(s.w)) << 8) | ISB(B3(s.z));
  o.z = (ISB(B0(s.z)) << 24) | (ISB(B1(s.y)) << 16) | (ISB(B2(s.x)) << 8) | ISB(B3(s.w));
  o.w = (ISB(B0(s.w)) << 24) | (ISB(B1(s.z)) << 16) | (ISB(B2(s.y)) << 8) | ISB(B3(s.x));
  return o ^ round_key(p, rounds);
}

__kernel void identity(__global const uint4* in, __global uint4* out,
                       __constant const uint* p, __global const uint* tables) {
  const uint id = get_global_id(0);
  out[id] = in[id];
}

__kernel void ecb_encrypt(__global const uint4* in, __global uint4* out,
                          __constant const uint* p, __global const uint* tables) {
  const uint id = get_global_id(0);
  out[id] = encrypt_block(in[id], p, tables);
}

__kernel void ecb_decrypt(__global const uint4* in, __global uint4* out,
                          __constant const uint* p, __global const uint* tables) {
  const uint id = get_global_id(0);
  out[id] = decrypt_block(in[id], p, tables);
}

__kernel void ctr(__global const uint4* in, __global uint4* out,
                  __constant const uint* p, __global const uint* tables) {
  const uint id = get_global_id(0);
  const uint4 iv = (uint4)(p[P_IV], p[P_IV + 1], p[P_IV + 2], p[P_IV + 3]);
  uint4 state = iv;
  state.x += p[P_BASE] + id;
  if (state.x < iv.x) {
    state.y++;
    if (state.y == 0u) {
      state.z++;
      if (state.z == 0u) state.w++;
    }
  }
  out[id] = in[id] ^ encrypt_block(state, p, tables);
}

__kernel void cbc_decrypt(__global const uint4* in, __global uint4* out,
                          __constant const uint* p, __global const uint* tables) {
  const uint id = get_global_id(0);
  const int width = (int)p[P_WIDTH];
  const int height = (int)p[P_HEIGHT];
  int x = (int)(id % (uint)width);
  int y = (int)(id / (uint)width);
  if (x == 0) { x = width - 1; y -= 1; } else { x -= 1; }
  uint4 prev = (uint4)(0u, 0u, 0u, 0u);
  if (x >= 0 && x < width && y >= 0 && y < height) prev = in[(uint)x + (uint)y * (uint)width];
  out[id] = decrypt_block(in[id], p, tables) ^ prev;
}
)CLC";

inline constexpr int kParamWords = 68;

}  // namespace aesgrid::device
