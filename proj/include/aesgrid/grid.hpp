#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aesgrid/block.hpp"
#include "aesgrid/error.hpp"

namespace aesgrid {

inline constexpr std::size_t kBlockBytes = 16;

/// Grid extent in cells. The default is a 2048x2048 grid of 128-bit cells,
/// i.e. 64 MiB per dispatch.
struct GridDims {
  std::int64_t width = 2048;
  std::int64_t height = 2048;

  constexpr std::uint64_t capacity_blocks() const noexcept {
    return static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  }
  constexpr std::uint64_t capacity_bytes() const noexcept {
    return capacity_blocks() * kBlockBytes;
  }
  constexpr bool valid() const noexcept { return width >= 1 && height >= 1; }

  friend constexpr bool operator==(const GridDims&, const GridDims&) = default;
};

// Signed so that stepping back from the origin can produce y == -1.
struct Coord {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend constexpr bool operator==(const Coord&, const Coord&) = default;
};

constexpr bool in_bounds(Coord c, GridDims d) noexcept {
  return c.x >= 0 && c.x < d.width && c.y >= 0 && c.y < d.height;
}

/// A 2D row-major array of blocks. The first `used()` cells in block-id order
/// are the valid region; every other cell is zero.
class BlockGrid {
 public:
  explicit BlockGrid(GridDims dims = {}) : dims_(dims) {
    if (!dims.valid())
      throw std::invalid_argument("grid dimensions must be positive, got " +
                                  std::to_string(dims.width) + "x" + std::to_string(dims.height));
    cells_.resize(static_cast<std::size_t>(dims.capacity_blocks()));
  }

  GridDims dims() const noexcept { return dims_; }
  std::uint64_t used() const noexcept { return used_; }

  // Shrinking the region re-zeroes the cells that leave it.
  void set_used(std::uint64_t used) {
    if (used > dims_.capacity_blocks())
      throw Error(Errc::out_of_bounds, "used count " + std::to_string(used) +
                                           " exceeds grid capacity " +
                                           std::to_string(dims_.capacity_blocks()));
    if (used < used_)
      std::fill(cells_.begin() + static_cast<std::ptrdiff_t>(used),
                cells_.begin() + static_cast<std::ptrdiff_t>(used_), Block128{});
    used_ = used;
  }

  std::span<Block128> cells() noexcept { return cells_; }
  std::span<const Block128> cells() const noexcept { return cells_; }
  std::span<Block128> valid_cells() noexcept { return cells().first(used_); }
  std::span<const Block128> valid_cells() const noexcept { return cells().first(used_); }

  Block128& operator[](std::uint64_t id) noexcept { return cells_[id]; }
  const Block128& operator[](std::uint64_t id) const noexcept { return cells_[id]; }

  friend bool operator==(const BlockGrid&, const BlockGrid&) = default;

 private:
  GridDims dims_;
  std::vector<Block128> cells_;
  std::uint64_t used_ = 0;
};

struct PackResult {
  BlockGrid grid;
  std::size_t remainder = 0;  // bytes that did not fit
};

/// Loads whole blocks from `data` into a fresh grid, row-major, until the
/// data or the grid runs out.
inline PackResult pack(std::span<const std::uint8_t> data, GridDims dims) {
  if (data.size() % kBlockBytes != 0)
    throw Error(Errc::not_block_aligned,
                "pack needs a multiple of 16 bytes, got " + std::to_string(data.size()));
  PackResult r{BlockGrid(dims), 0};
  const std::uint64_t blocks = std::min<std::uint64_t>(data.size() / kBlockBytes,
                                                       dims.capacity_blocks());
  for (std::uint64_t i = 0; i < blocks; ++i)
    r.grid[i] = Block128::from_bytes(data.subspan(i * kBlockBytes).first<kBlockBytes>());
  r.grid.set_used(blocks);
  r.remainder = data.size() - static_cast<std::size_t>(blocks * kBlockBytes);
  return r;
}

inline void unpack_into(const BlockGrid& grid, std::span<std::uint8_t> out) {
  for (std::uint64_t i = 0; i < grid.used(); ++i)
    grid[i].to_bytes(out.subspan(i * kBlockBytes).first<kBlockBytes>());
}

inline std::vector<std::uint8_t> unpack(const BlockGrid& grid) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(grid.used() * kBlockBytes));
  unpack_into(grid, out);
  return out;
}

inline std::uint64_t block_id(Coord c, GridDims dims) {
  if (!in_bounds(c, dims))
    throw Error(Errc::out_of_bounds, "coordinate (" + std::to_string(c.x) + "," +
                                         std::to_string(c.y) + ") outside grid");
  return static_cast<std::uint64_t>(c.x) +
         static_cast<std::uint64_t>(c.y) * static_cast<std::uint64_t>(dims.width);
}

constexpr Coord coord_of(std::uint64_t id, GridDims dims) noexcept {
  const auto w = static_cast<std::uint64_t>(dims.width);
  return {static_cast<std::int64_t>(id % w), static_cast<std::int64_t>(id / w)};
}

/// Coordinate of the previous block in row-major order: one step left, or the
/// end of the previous row from column 0. The origin maps to (width-1, -1),
/// which lies outside the grid.
constexpr Coord prev_coord(Coord c, GridDims dims) noexcept {
  return c.x == 0 ? Coord{dims.width - 1, c.y - 1} : Coord{c.x - 1, c.y};
}

constexpr Coord next_coord(Coord c, GridDims dims) noexcept {
  return c.x == dims.width - 1 ? Coord{0, c.y + 1} : Coord{c.x + 1, c.y};
}

/// Counter block for block `id`: `id` is added to lane w0 and a wrap of w0
/// carries into w1, then w2, then w3. w0 is the least significant lane, so
/// this is not the big-endian increment of standard CTR.
constexpr Block128 ctr_state(Block128 iv, std::uint32_t id) noexcept {
  Block128 s = iv;
  s.w0 += id;
  if (s.w0 < iv.w0) {
    ++s.w1;
    if (s.w1 == 0) {
      ++s.w2;
      if (s.w2 == 0) ++s.w3;
    }
  }
  return s;
}

}  // namespace aesgrid
