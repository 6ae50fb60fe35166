#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aesgrid/cipher.hpp"
#include "aesgrid/dispatch.hpp"
#include "aesgrid/error.hpp"
#include "aesgrid/grid.hpp"
#include "aesgrid/kernels.hpp"

namespace aesgrid {

enum class Mode { ecb, ctr, cbc };
enum class Direction { encrypt, decrypt };
enum class Padding { none, pkcs7 };

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::ecb: return "ecb";
    case Mode::ctr: return "ctr";
    case Mode::cbc: return "cbc";
  }
  return "?";
}

constexpr std::string_view to_string(Direction d) noexcept {
  return d == Direction::encrypt ? "enc" : "dec";
}

struct ModeParams {
  Mode mode = Mode::ecb;
  Direction direction = Direction::encrypt;
  std::vector<std::uint8_t> key;
  std::optional<Block128> iv;  // required for CTR and CBC
  Padding padding = Padding::pkcs7;

  // CBC encryption chains through the previous ciphertext block, so it can
  // only run sequentially on the host.
  bool host_sequential() const noexcept {
    return mode == Mode::cbc && direction == Direction::encrypt;
  }
};

/// Where and how engine-path modes run.
struct EngineConfig {
  Backend backend = Backend::reference;
  GridDims grid{};
  DispatchOptions dispatch{};
  DispatchStats* stats = nullptr;  // accumulates over all chunks when set
};

inline std::vector<std::uint8_t> pad(std::span<const std::uint8_t> data, Padding policy) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  if (policy == Padding::pkcs7) {
    const auto n = static_cast<std::uint8_t>(kBlockBytes - data.size() % kBlockBytes);
    out.insert(out.end(), n, n);
  }
  return out;
}

inline std::vector<std::uint8_t> unpad(std::span<const std::uint8_t> data, Padding policy) {
  if (data.size() % kBlockBytes != 0)
    throw Error(Errc::not_block_aligned,
                "cannot unpad " + std::to_string(data.size()) + " bytes");
  if (policy == Padding::none) return {data.begin(), data.end()};
  if (data.empty()) throw Error(Errc::bad_padding, "empty input has no padding block");
  const std::uint8_t n = data.back();
  if (n == 0 || n > kBlockBytes) throw Error(Errc::bad_padding, "invalid pad length");
  const auto tail = data.last(n);
  if (!std::all_of(tail.begin(), tail.end(), [n](std::uint8_t b) { return b == n; }))
    throw Error(Errc::bad_padding, "pad bytes do not match pad length");
  return {data.begin(), data.end() - n};
}

namespace detail {

inline void require_aligned(std::span<const std::uint8_t> data, std::string_view mode) {
  if (data.size() % kBlockBytes != 0)
    throw Error(Errc::not_block_aligned,
                std::string(mode) + " input of " + std::to_string(data.size()) +
                    " bytes is not a multiple of 16; use pkcs7 padding");
}

inline const Block128& require_iv(const ModeParams& p) {
  if (!p.iv) throw Error(Errc::missing_iv, std::string(to_string(p.mode)) + " requires an IV");
  return *p.iv;
}

// Splits block-aligned `data` into grid-sized chunks, dispatches each and
// writes the results to the same offsets of the returned buffer. `patch` sees
// each chunk's input and output grid before readback.
template <typename Patch>
std::vector<std::uint8_t> run_chunked(std::span<const std::uint8_t> data, const KernelSpec& kernel,
                                      Uniforms uniforms, const EngineConfig& cfg, Patch&& patch) {
  std::vector<std::uint8_t> out(data.size());
  std::size_t offset = 0;
  while (offset < data.size()) {
    PackResult packed = pack(data.subspan(offset), cfg.grid);
    DispatchResult r = dispatch(kernel, packed.grid, uniforms, cfg.backend, cfg.dispatch);
    patch(packed.grid, r.output);
    unpack_into(r.output, std::span(out).subspan(offset));
    if (cfg.stats != nullptr) *cfg.stats += r.stats;
    offset += static_cast<std::size_t>(packed.grid.used() * kBlockBytes);
    uniforms.base_block_offset += packed.grid.used();
  }
  return out;
}

}  // namespace detail

inline std::vector<std::uint8_t> ecb(std::span<const std::uint8_t> data, const ModeParams& p,
                                     const EngineConfig& cfg = {}) {
  Uniforms u;
  u.keys = expand_key(p.key);
  if (p.direction == Direction::encrypt) {
    const std::vector<std::uint8_t> padded = pad(data, p.padding);
    detail::require_aligned(padded, "ecb");
    return detail::run_chunked(padded, kernels::ecb_encrypt(), u, cfg,
                               [](const BlockGrid&, BlockGrid&) {});
  }
  detail::require_aligned(data, "ecb");
  return unpad(detail::run_chunked(data, kernels::ecb_decrypt(), u, cfg,
                                   [](const BlockGrid&, BlockGrid&) {}),
               p.padding);
}

/// Counter mode with the lane-carry counter of `ctr_state`. Encryption and
/// decryption are the same operation; any length is accepted and padding is
/// ignored.
inline std::vector<std::uint8_t> ctr(std::span<const std::uint8_t> data, const ModeParams& p,
                                     const EngineConfig& cfg = {}) {
  Uniforms u;
  u.keys = expand_key(p.key);
  u.iv = detail::require_iv(p);
  const std::uint64_t blocks = (data.size() + kBlockBytes - 1) / kBlockBytes;
  if (blocks > (std::uint64_t{1} << 32))
    throw Error(Errc::counter_overflow, "counter mode is limited to 2^32 blocks per message");

  std::vector<std::uint8_t> padded(static_cast<std::size_t>(blocks * kBlockBytes), 0);
  std::copy(data.begin(), data.end(), padded.begin());
  std::vector<std::uint8_t> out =
      detail::run_chunked(padded, kernels::ctr(), u, cfg, [](const BlockGrid&, BlockGrid&) {});
  out.resize(data.size());
  return out;
}

/// Parallel CBC decryption. The kernel XORs each block with the previous
/// ciphertext cell; block 0 of every chunk reads zero instead, and the chunk
/// IV (the message IV, or the last ciphertext block of the previous chunk) is
/// XORed in here after the dispatch.
inline std::vector<std::uint8_t> cbc_decrypt(std::span<const std::uint8_t> data,
                                             const ModeParams& p, const EngineConfig& cfg = {}) {
  Uniforms u;
  u.keys = expand_key(p.key);
  Block128 chain = detail::require_iv(p);
  detail::require_aligned(data, "cbc");
  std::vector<std::uint8_t> plain =
      detail::run_chunked(data, kernels::cbc_decrypt(), u, cfg,
                          [&chain](const BlockGrid& in, BlockGrid& out) {
                            if (in.used() == 0) return;
                            out[0] ^= chain;
                            chain = in[in.used() - 1];
                          });
  return unpad(plain, p.padding);
}

// Sequential by construction; never reaches the dispatch engine.
inline std::vector<std::uint8_t> cbc_encrypt(std::span<const std::uint8_t> data,
                                             const ModeParams& p) {
  const RoundKeySchedule ks = expand_key(p.key);
  Block128 chain = detail::require_iv(p);
  std::vector<std::uint8_t> out = pad(data, p.padding);
  detail::require_aligned(out, "cbc");
  for (std::size_t off = 0; off < out.size(); off += kBlockBytes) {
    auto block = std::span(out).subspan(off).first<kBlockBytes>();
    chain = encrypt_block(Block128::from_bytes(block) ^ chain, ks);
    chain.to_bytes(block);
  }
  return out;
}

/// Runs the mode and direction named in `p`.
inline std::vector<std::uint8_t> run_mode(std::span<const std::uint8_t> data, const ModeParams& p,
                                          const EngineConfig& cfg = {}) {
  switch (p.mode) {
    case Mode::ecb: return ecb(data, p, cfg);
    case Mode::ctr: return ctr(data, p, cfg);
    case Mode::cbc:
      return p.direction == Direction::encrypt ? cbc_encrypt(data, p) : cbc_decrypt(data, p, cfg);
  }
  return {};
}

}  // namespace aesgrid
