#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "aesgrid/block.hpp"
#include "aesgrid/grid.hpp"
#include "aesgrid/key_schedule.hpp"
#include "aesgrid/tables.hpp"

namespace aesgrid {

enum class Backend { reference, parallel, device };

constexpr std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::reference: return "ref";
    case Backend::parallel: return "par";
    case Backend::device: return "device";
  }
  return "?";
}

inline std::optional<Backend> parse_backend(std::string_view s) noexcept {
  if (s == "ref" || s == "reference") return Backend::reference;
  if (s == "par" || s == "parallel") return Backend::parallel;
  if (s == "device") return Backend::device;
  return std::nullopt;
}

/// Per-dispatch constants. Round keys and IV are small and read in order by
/// every invocation; the tables are bulk data indexed at random.
struct Uniforms {
  RoundKeySchedule keys{};
  Block128 iv{};
  std::uint64_t base_block_offset = 0;  // global block id of cell 0
  const TTableSet* tables = &aesgrid::tables();
};

enum class KernelId { custom, identity, ecb_encrypt, ecb_decrypt, ctr, cbc_decrypt };

constexpr std::string_view to_string(KernelId k) noexcept {
  switch (k) {
    case KernelId::custom: return "custom";
    case KernelId::identity: return "identity";
    case KernelId::ecb_encrypt: return "ecb_encrypt";
    case KernelId::ecb_decrypt: return "ecb_decrypt";
    case KernelId::ctr: return "ctr";
    case KernelId::cbc_decrypt: return "cbc_decrypt";
  }
  return "?";
}

/// Computes one output cell from the input grid and the uniforms. A kernel
/// must be deterministic and must not read anything else; in particular it
/// never sees other output cells.
using KernelFn = std::function<Block128(Coord, const BlockGrid&, const Uniforms&)>;

struct KernelSpec {
  KernelId id = KernelId::custom;
  KernelFn fn;
  bool reads_neighbors = false;
};

struct DispatchStats {
  std::uint64_t copy_in_ns = 0;
  std::uint64_t kernel_ns = 0;
  std::uint64_t copy_out_ns = 0;
  std::uint64_t bytes_processed = 0;

  std::uint64_t total_ns() const noexcept { return copy_in_ns + kernel_ns + copy_out_ns; }

  DispatchStats& operator+=(const DispatchStats& o) noexcept {
    copy_in_ns += o.copy_in_ns;
    kernel_ns += o.kernel_ns;
    copy_out_ns += o.copy_out_ns;
    bytes_processed += o.bytes_processed;
    return *this;
  }
};

struct DispatchResult {
  BlockGrid output;
  DispatchStats stats;
};

/// Cell load; anything outside the grid reads as the zero block.
inline Block128 read_cell(const BlockGrid& grid, Coord c) noexcept {
  if (!in_bounds(c, grid.dims())) return {};
  return grid[static_cast<std::uint64_t>(c.x) +
              static_cast<std::uint64_t>(c.y) * static_cast<std::uint64_t>(grid.dims().width)];
}

}  // namespace aesgrid
