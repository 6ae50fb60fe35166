// aesgrid: file encryption over the block-grid engine and the throughput
// benchmark.
//
//   aesgrid crypt --mode cbc --direction dec --key-hex ... --iv-hex ... --in a --out b
//   aesgrid bench --sizes 16K,4M --backends ref,par --threads 1,4 --csv out.csv

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aesgrid/bench.hpp"
#include "aesgrid/modes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> parse_hex(const std::string& hex, const char* what) {
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw UsageError(std::string(what) + ": invalid hex digit '" + c + "'");
  };
  if (hex.size() % 2 != 0) throw UsageError(std::string(what) + ": odd number of hex digits");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

aesgrid::GridDims parse_grid(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    aesgrid::GridDims d{std::stoll(s.substr(0, x)), std::stoll(s.substr(x + 1))};
    if (!d.valid()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw UsageError("--grid expects WIDTHxHEIGHT, got '" + s + "'");
  }
}

aesgrid::Backend parse_backend_or_throw(const std::string& s) {
  auto b = aesgrid::parse_backend(s);
  if (!b) throw UsageError("unknown backend '" + s + "'");
  return *b;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

struct CryptFlags {
  std::string mode, direction, key_hex, iv_hex, backend = "ref", pad = "pkcs7", in, out;
  std::string grid = "2048x2048";
  unsigned threads = 0;
};

int cmd_crypt(const CryptFlags& f) {
  aesgrid::ModeParams p;
  p.mode = f.mode == "ecb" ? aesgrid::Mode::ecb
           : f.mode == "ctr" ? aesgrid::Mode::ctr
                             : aesgrid::Mode::cbc;
  p.direction = f.direction == "enc" ? aesgrid::Direction::encrypt : aesgrid::Direction::decrypt;
  p.padding = f.pad == "none" ? aesgrid::Padding::none : aesgrid::Padding::pkcs7;
  p.key = parse_hex(f.key_hex, "--key-hex");
  if (aesgrid::rounds_for_key_bytes(p.key.size()) == 0)
    throw UsageError("--key-hex must encode 16, 24 or 32 bytes");
  if (p.mode != aesgrid::Mode::ecb) {
    if (f.iv_hex.empty()) throw UsageError("--iv-hex is required for " + f.mode);
    const auto iv = parse_hex(f.iv_hex, "--iv-hex");
    if (iv.size() != aesgrid::kBlockBytes) throw UsageError("--iv-hex must encode 16 bytes");
    p.iv = aesgrid::Block128::from_bytes(std::span<const std::uint8_t, 16>(iv.data(), 16));
  }

  aesgrid::EngineConfig cfg;
  cfg.backend = parse_backend_or_throw(f.backend);
  cfg.grid = parse_grid(f.grid);
  cfg.dispatch.threads = f.threads;
  if (p.host_sequential() && cfg.backend != aesgrid::Backend::reference)
    std::cerr << "warning: cbc encryption is sequential; running on the host instead of "
              << f.backend << "\n";
  else if (!aesgrid::backend_available(cfg.backend))
    throw aesgrid::Error(aesgrid::Errc::backend_unavailable,
                         "backend " + f.backend + " is not available on this host");

  write_file(f.out, aesgrid::run_mode(read_file(f.in), p, cfg));
  return kExitOk;
}

struct BenchFlags {
  std::string sizes = "16K,256K,4M,64M";
  std::vector<std::string> modes{"ecb", "ctr", "cbc"};
  std::vector<std::string> directions{"enc", "dec"};
  std::vector<int> key_sizes{128, 192, 256};
  std::vector<std::string> backends{"ref", "par"};
  std::vector<unsigned> threads;
  int reps = 3;
  std::string grid = "2048x2048";
  std::string csv;
};

int cmd_bench(const BenchFlags& f) {
  aesgrid::bench::BenchConfig cfg;
  cfg.sizes.clear();
  std::string sizes = f.sizes;
  for (std::size_t start = 0; start <= sizes.size();) {
    const std::size_t comma = std::min(sizes.find(',', start), sizes.size());
    try {
      cfg.sizes.push_back(aesgrid::bench::parse_size(sizes.substr(start, comma - start)));
      if (cfg.sizes.back() % aesgrid::kBlockBytes != 0)
        throw std::invalid_argument("size " + std::to_string(cfg.sizes.back()) +
                                    " is not a multiple of 16");
    } catch (const std::exception& e) {
      throw UsageError(std::string("--sizes: ") + e.what());
    }
    start = comma + 1;
  }
  cfg.modes.clear();
  for (const auto& m : f.modes)
    cfg.modes.push_back(m == "ecb" ? aesgrid::Mode::ecb : m == "ctr" ? aesgrid::Mode::ctr
                                                                     : aesgrid::Mode::cbc);
  cfg.directions.clear();
  for (const auto& d : f.directions)
    cfg.directions.push_back(d == "enc" ? aesgrid::Direction::encrypt
                                        : aesgrid::Direction::decrypt);
  cfg.key_sizes = f.key_sizes;
  cfg.backends.clear();
  for (const auto& b : f.backends) cfg.backends.push_back(parse_backend_or_throw(b));
  if (!f.threads.empty()) cfg.threads = f.threads;
  cfg.reps = f.reps;
  cfg.grid = parse_grid(f.grid);

  const auto rows = aesgrid::bench::run_bench(cfg);
  if (f.csv.empty()) {
    aesgrid::bench::write_csv(std::cout, rows);
  } else {
    std::ofstream out(f.csv, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + f.csv);
    aesgrid::bench::write_csv(out, rows);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AES over a data-parallel block grid"};
  app.require_subcommand(1);

  CryptFlags cf;
  auto* crypt = app.add_subcommand("crypt", "Encrypt or decrypt a file");
  crypt->add_option("--mode", cf.mode, "ecb, ctr or cbc")
      ->required()
      ->check(CLI::IsMember({"ecb", "ctr", "cbc"}));
  crypt->add_option("--direction", cf.direction, "enc or dec")
      ->required()
      ->check(CLI::IsMember({"enc", "dec"}));
  crypt->add_option("--key-hex", cf.key_hex, "128/192/256-bit key in hex")->required();
  crypt->add_option("--iv-hex", cf.iv_hex, "128-bit IV in hex (ctr, cbc)");
  crypt->add_option("--backend", cf.backend, "ref, par or device")->capture_default_str();
  crypt->add_option("--pad", cf.pad, "pkcs7 or none")
      ->capture_default_str()
      ->check(CLI::IsMember({"pkcs7", "none"}));
  crypt->add_option("--threads", cf.threads, "parallel backend workers (0 = all cores)");
  crypt->add_option("--grid", cf.grid, "grid size WIDTHxHEIGHT")->capture_default_str();
  crypt->add_option("--in", cf.in, "input file")->required();
  crypt->add_option("--out", cf.out, "output file")->required();

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Throughput versus data size, as CSV");
  bench->add_option("--sizes", bf.sizes, "comma-separated sizes, K/M/G suffixes")
      ->capture_default_str();
  bench->add_option("--modes", bf.modes)->delimiter(',')->check(
      CLI::IsMember({"ecb", "ctr", "cbc"}));
  bench->add_option("--directions", bf.directions)->delimiter(',')->check(
      CLI::IsMember({"enc", "dec"}));
  bench->add_option("--key-sizes", bf.key_sizes)->delimiter(',')->check(
      CLI::IsMember({128, 192, 256}));
  bench->add_option("--backends", bf.backends)->delimiter(',')->check(
      CLI::IsMember({"ref", "par", "device"}));
  bench->add_option("--threads", bf.threads, "parallel backend thread counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--reps", bf.reps, "timed repetitions per row (>= 3)")
      ->capture_default_str()
      ->check(CLI::Range(aesgrid::bench::kMinRepetitions, 1000000));
  bench->add_option("--grid", bf.grid, "grid size WIDTHxHEIGHT")->capture_default_str();
  bench->add_option("--csv", bf.csv, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*crypt) return cmd_crypt(cf);
    return cmd_bench(bf);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
