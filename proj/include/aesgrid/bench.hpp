#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "aesgrid/dispatch.hpp"
#include "aesgrid/modes.hpp"

namespace aesgrid::bench {

inline constexpr std::string_view kCsvHeader =
    "mode,direction,key_size,backend,threads,data_bytes,mb_per_sec,copy_in_ns,kernel_ns,"
    "copy_out_ns,repetitions";

struct BenchRecord {
  Mode mode = Mode::ecb;
  Direction direction = Direction::encrypt;
  int key_size = 128;
  std::string backend;
  unsigned threads = 1;
  std::uint64_t data_bytes = 0;
  double mb_per_sec = 0;
  // Engine split, mean per repetition.
  std::uint64_t copy_in_ns = 0;
  std::uint64_t kernel_ns = 0;
  std::uint64_t copy_out_ns = 0;
  int repetitions = 0;
  bool skipped = false;
};

struct BenchConfig {
  std::vector<std::uint64_t> sizes{16 << 10, 256 << 10, 4 << 20, 64 << 20};
  std::vector<Mode> modes{Mode::ecb, Mode::ctr, Mode::cbc};
  std::vector<Direction> directions{Direction::encrypt, Direction::decrypt};
  std::vector<int> key_sizes{128, 192, 256};
  std::vector<Backend> backends{Backend::reference, Backend::parallel};
  std::vector<unsigned> threads{resolve_threads(0)};
  int reps = 3;
  GridDims grid{};
};

inline constexpr int kMinRepetitions = 3;

/// "16K", "4M", "1G" or a plain byte count; suffixes are powers of 1024.
inline std::uint64_t parse_size(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty size");
  std::uint64_t mult = 1;
  switch (s.back()) {
    case 'K': case 'k': mult = 1ull << 10; s.remove_suffix(1); break;
    case 'M': case 'm': mult = 1ull << 20; s.remove_suffix(1); break;
    case 'G': case 'g': mult = 1ull << 30; s.remove_suffix(1); break;
    default: break;
  }
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw std::invalid_argument("bad size '" + std::string(s) + "'");
  return std::stoull(std::string(s)) * mult;
}

inline std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(n);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const std::uint64_t v = rng();
    for (int k = 0; k < 8; ++k) out[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
  for (const std::uint64_t v = rng(); i < n; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * (i % 8)));
  return out;
}

inline std::uint64_t fnv1a(std::span<const std::uint8_t> data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline double mb_per_sec(std::uint64_t data_bytes, int reps, double total_seconds) noexcept {
  return static_cast<double>(data_bytes) * reps / total_seconds / static_cast<double>(1 << 20);
}

struct TimedRuns {
  std::vector<double> seconds;  // one entry per timed run
  DispatchStats stats;          // summed over the timed runs
  std::vector<std::uint8_t> first_output;
};

/// One untimed warm-up call, then `reps` calls each timed with a monotonic
/// clock around the whole mode operation, staging copies included.
inline TimedRuns time_runs(std::span<const std::uint8_t> data, const ModeParams& params,
                           EngineConfig cfg, int reps) {
  TimedRuns out;
  cfg.stats = nullptr;
  out.first_output = run_mode(data, params, cfg);
  DispatchStats stats;
  cfg.stats = &stats;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::uint8_t> result = run_mode(data, params, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    out.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  out.stats = stats;
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline ModeParams bench_params(Mode mode, Direction dir, int key_bits) {
  ModeParams p;
  p.mode = mode;
  p.direction = dir;
  p.padding = Padding::none;
  p.key.resize(static_cast<std::size_t>(key_bits / 8));
  for (std::size_t i = 0; i < p.key.size(); ++i) p.key[i] = static_cast<std::uint8_t>(i);
  p.iv = Block128{0x00010203, 0x04050607, 0x08090a0b, 0x0c0d0e0f};
  return p;
}

class ChecksumMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs every configuration in order: size, key size, mode, direction,
/// backend, thread count. CBC encryption is host-only and appears once per
/// size and key size with backend "host". Each configuration's output is
/// checked against the reference backend.
inline std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
  if (cfg.reps < kMinRepetitions)
    throw std::invalid_argument("at least " + std::to_string(kMinRepetitions) +
                                " repetitions are required");
  std::vector<BenchRecord> rows;
  for (std::uint64_t size : cfg.sizes) {
    if (size % kBlockBytes != 0)
      throw std::invalid_argument("bench size " + std::to_string(size) +
                                  " is not a multiple of 16");
    const std::vector<std::uint8_t> data = random_bytes(static_cast<std::size_t>(size), size);
    for (int key_bits : cfg.key_sizes) {
      for (Mode mode : cfg.modes) {
        for (Direction dir : cfg.directions) {
          const ModeParams params = bench_params(mode, dir, key_bits);
          std::optional<std::uint64_t> reference_sum;
          auto reference = [&] {
            if (!reference_sum) {
              EngineConfig ref{Backend::reference, cfg.grid, {}, nullptr};
              reference_sum = fnv1a(run_mode(data, params, ref));
            }
            return *reference_sum;
          };

          auto measure = [&](Backend backend, std::string name, unsigned threads) {
            BenchRecord rec{mode, dir, key_bits, std::move(name), threads, size};
            rec.repetitions = cfg.reps;
            if (backend == Backend::device && !backend_available(Backend::device)) {
              rec.skipped = true;
              rows.push_back(rec);
              return;
            }
            EngineConfig ec{backend, cfg.grid, {threads, kDefaultWorkCapBytes}, nullptr};
            TimedRuns runs = time_runs(data, params, ec, cfg.reps);
            if (fnv1a(runs.first_output) != reference())
              throw ChecksumMismatch("output of " + rec.backend + " differs from reference for " +
                                     std::string(to_string(mode)) + "-" +
                                     std::string(to_string(dir)));
            double total = 0;
            for (double s : runs.seconds) total += s;
            rec.mb_per_sec = mb_per_sec(size, cfg.reps, total);
            rec.copy_in_ns = runs.stats.copy_in_ns / static_cast<std::uint64_t>(cfg.reps);
            rec.kernel_ns = runs.stats.kernel_ns / static_cast<std::uint64_t>(cfg.reps);
            rec.copy_out_ns = runs.stats.copy_out_ns / static_cast<std::uint64_t>(cfg.reps);
            rows.push_back(rec);
          };

          if (params.host_sequential()) {
            if (!cfg.backends.empty()) measure(Backend::reference, "host", 1);
            continue;
          }
          for (Backend b : cfg.backends) {
            if (b == Backend::parallel) {
              for (unsigned t : cfg.threads) measure(b, std::string(to_string(b)), t);
            } else {
              measure(b, std::string(to_string(b)), 1);
            }
          }
        }
      }
    }
  }
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& rows) {
  os << kCsvHeader << '\n';
  for (const BenchRecord& r : rows) {
    os << to_string(r.mode) << ',' << to_string(r.direction) << ',' << r.key_size << ','
       << r.backend << ',' << r.threads << ',' << r.data_bytes << ',';
    if (r.skipped) {
      os << "skipped,skipped,skipped,skipped,";
    } else {
      std::ostringstream mbs;
      mbs << std::fixed << std::setprecision(3) << r.mb_per_sec;
      os << mbs.str() << ',' << r.copy_in_ns << ',' << r.kernel_ns << ',' << r.copy_out_ns << ',';
    }
    os << r.repetitions << '\n';
  }
}

}  // namespace aesgrid::bench
