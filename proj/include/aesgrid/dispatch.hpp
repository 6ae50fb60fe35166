#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aesgrid/device.hpp"
#include "aesgrid/error.hpp"
#include "aesgrid/grid.hpp"
#include "aesgrid/kernel.hpp"

namespace aesgrid {

inline constexpr std::uint64_t kDefaultWorkCapBytes = std::uint64_t{64} << 20;
inline constexpr std::uint64_t kMinBlocksPerTask = 4096;

struct DispatchOptions {
  unsigned threads = 0;  // parallel backend worker count; 0 means hardware concurrency
  std::uint64_t work_cap_bytes = kDefaultWorkCapBytes;
};

inline unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Dispatch counts per backend, for checking which modes reach the engine.
inline std::array<std::atomic<std::uint64_t>, 3>& dispatch_counters() noexcept {
  static std::array<std::atomic<std::uint64_t>, 3> counters{};
  return counters;
}

inline std::uint64_t dispatch_count(Backend b) noexcept {
  return dispatch_counters()[static_cast<std::size_t>(b)].load();
}

inline std::uint64_t total_dispatch_count() noexcept {
  return dispatch_count(Backend::reference) + dispatch_count(Backend::parallel) +
         dispatch_count(Backend::device);
}

/// Backends usable in this process. reference and parallel are always
/// present; device only when a compute device initialized. Computed once.
inline const std::vector<Backend>& list_backends() {
  static const std::vector<Backend> backends = [] {
    std::vector<Backend> b{Backend::reference, Backend::parallel};
    if (device::available()) b.push_back(Backend::device);
    return b;
  }();
  return backends;
}

inline bool backend_available(Backend b) {
  const auto& all = list_backends();
  return std::find(all.begin(), all.end(), b) != all.end();
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline std::uint64_t elapsed_ns(Clock::time_point from, Clock::time_point to) noexcept {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count());
}

// Runs the kernel for block ids [begin, end), walking coordinates row-major.
inline void run_range(const KernelSpec& spec, const BlockGrid& in, const Uniforms& u,
                      BlockGrid& out, std::uint64_t begin, std::uint64_t end) {
  Coord c = coord_of(begin, in.dims());
  for (std::uint64_t id = begin; id < end; ++id) {
    out[id] = spec.fn(c, in, u);
    c = next_coord(c, in.dims());
  }
}

inline void run_parallel(const KernelSpec& spec, const BlockGrid& in, const Uniforms& u,
                         BlockGrid& out, unsigned threads) {
  const std::uint64_t used = in.used();
  const std::uint64_t per_task =
      std::max(kMinBlocksPerTask, (used + threads - 1) / std::max(1u, threads));
  const std::uint64_t tasks = (used + per_task - 1) / per_task;

  std::vector<std::exception_ptr> errors(tasks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(tasks > 0 ? tasks - 1 : 0);
    auto task = [&](std::uint64_t t) {
      try {
        run_range(spec, in, u, out, t * per_task, std::min(used, (t + 1) * per_task));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    };
    for (std::uint64_t t = 1; t < tasks; ++t) workers.emplace_back(task, t);
    if (tasks > 0) task(0);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Host-side staging grids, created on first use and reused by later
// dispatches of the same shape on this thread.
struct Staging {
  BlockGrid in;
  BlockGrid out;
};

inline Staging& staging_for(GridDims dims) {
  thread_local std::optional<Staging> staging;
  if (!staging || staging->in.dims() != dims) {
    staging.reset();
    staging.emplace(Staging{BlockGrid(dims), BlockGrid(dims)});
  }
  return *staging;
}

}  // namespace detail

/// Runs `spec` once per valid cell of `input` and returns a grid of the same
/// shape holding the results. The valid region is copied into a private
/// staging grid before the kernel runs and results are copied out afterwards;
/// both copies are timed.
/// The output is bit-identical for every backend and thread count.
inline DispatchResult dispatch(const KernelSpec& spec, const BlockGrid& input, const Uniforms& u,
                               Backend backend, const DispatchOptions& opts = {}) {
  if (input.dims().capacity_bytes() > opts.work_cap_bytes)
    throw Error(Errc::work_cap_exceeded,
                "grid of " + std::to_string(input.dims().capacity_bytes()) +
                    " bytes exceeds the per-dispatch cap of " +
                    std::to_string(opts.work_cap_bytes) + "; split the data into chunks");
  if (!spec.fn && backend != Backend::device)
    throw Error(Errc::kernel_panic, "kernel has no host implementation");
  if (backend == Backend::device && !backend_available(Backend::device))
    throw Error(Errc::backend_unavailable, "device backend is not available");

  dispatch_counters()[static_cast<std::size_t>(backend)].fetch_add(1);

  if (backend == Backend::device) return device::dispatch(spec, input, u);

  using detail::Clock;
  DispatchStats stats;
  const std::uint64_t used = input.used();
  stats.bytes_processed = used * kBlockBytes;

  auto t0 = Clock::now();
  detail::Staging& staging = detail::staging_for(input.dims());
  staging.in.set_used(0);
  staging.in.set_used(used);
  std::copy_n(input.cells().begin(), used, staging.in.cells().begin());
  staging.out.set_used(0);
  staging.out.set_used(used);
  auto t1 = Clock::now();

  try {
    if (backend == Backend::reference || used == 0)
      detail::run_range(spec, staging.in, u, staging.out, 0, used);
    else
      detail::run_parallel(spec, staging.in, u, staging.out, resolve_threads(opts.threads));
  } catch (const std::exception& e) {
    throw Error(Errc::kernel_panic, std::string(to_string(spec.id)) + " kernel failed: " + e.what());
  } catch (...) {
    throw Error(Errc::kernel_panic, std::string(to_string(spec.id)) + " kernel failed");
  }
  auto t2 = Clock::now();

  BlockGrid output(input.dims());
  output.set_used(used);
  std::copy_n(staging.out.cells().begin(), used, output.cells().begin());
  auto t3 = Clock::now();

  stats.copy_in_ns = detail::elapsed_ns(t0, t1);
  stats.kernel_ns = detail::elapsed_ns(t1, t2);
  stats.copy_out_ns = detail::elapsed_ns(t2, t3);
  return {std::move(output), stats};
}

}  // namespace aesgrid
