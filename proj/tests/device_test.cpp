#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "aesgrid/device.hpp"
#include "aesgrid/dispatch.hpp"
#include "aesgrid/kernels.hpp"
#include "aesgrid/modes.hpp"
#include "support/test_util.hpp"

namespace {

using namespace aesgrid;

#define REQUIRE_DEVICE() \
  if (!backend_available(Backend::device)) GTEST_SKIP() << "no compute device"

TEST(DeviceTables, UploadLayoutMatchesHostTables) {
  const TTableSet& t = tables();
  const auto rows = device::table_rows(t);
  ASSERT_EQ(rows.size(), 10u * 256);
  for (unsigned x = 0; x < 256; ++x) {
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(rows[i * 256 + x], t.fwd[i][x]);
      EXPECT_EQ(rows[(4 + i) * 256 + x], t.inv[i][x]);
    }
    EXPECT_EQ(rows[8 * 256 + x], t.sbox[x]);
    EXPECT_EQ(rows[9 * 256 + x], t.inv_sbox[x]);
  }
}

TEST(DeviceEnv, DisableVariableWins) {
  ::setenv(device::kDisableEnv, "1", 1);
  EXPECT_FALSE(device::available());
  EXPECT_THROW(device::dispatch(kernels::identity(), BlockGrid({1, 1}), {}), Error);
  ::unsetenv(device::kDisableEnv);
}

TEST(DeviceBackend, CustomKernelsAreRejected) {
  REQUIRE_DEVICE();
  KernelSpec custom{KernelId::custom, [](Coord, const BlockGrid&, const Uniforms&) { return Block128{}; }};
  BlockGrid g({2, 2});
  g.set_used(1);
  try {
    dispatch(custom, g, {}, Backend::device);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::backend_unavailable);
  }
}

TEST(DeviceBackend, Fips197Block) {
  REQUIRE_DEVICE();
  Uniforms u;
  u.keys = expand_key(testutil::hex(testutil::kFips197[0].key));
  BlockGrid in({1, 1});
  in[0] = testutil::block(testutil::kFips197[0].plaintext);
  in.set_used(1);
  EXPECT_EQ(dispatch(kernels::ecb_encrypt(), in, u, Backend::device).output[0],
            testutil::block(testutil::kFips197[0].ciphertext));
}

TEST(DeviceBackend, EmptyDispatch) {
  REQUIRE_DEVICE();
  DispatchResult r = dispatch(kernels::ecb_encrypt(), BlockGrid({8, 8}), {}, Backend::device);
  EXPECT_EQ(r.output.used(), 0u);
  EXPECT_EQ(r.stats.kernel_ns, 0u);
}

TEST(DeviceBackend, RandomGridsMatchReference) {
  REQUIRE_DEVICE();
  testutil::Rng rng(50);
  const KernelSpec specs[] = {kernels::ecb_encrypt(), kernels::ecb_decrypt(), kernels::ctr(),
                              kernels::cbc_decrypt(), kernels::identity()};
  for (std::size_t key_len : {16u, 24u, 32u}) {
    Uniforms u;
    u.keys = expand_key(rng.bytes(key_len));
    u.iv = Block128{0xFFFFFF00, 0xFFFFFFFF, rng.block().w2, 0};
    u.base_block_offset = 17;
    BlockGrid in({64, 64});
    in.set_used(4096);
    for (auto& c : in.valid_cells()) c = rng.block();
    for (const KernelSpec& spec : specs)
      EXPECT_EQ(dispatch(spec, in, u, Backend::device).output,
                dispatch(spec, in, u, Backend::reference).output)
          << to_string(spec.id) << " key " << key_len;
  }
}

TEST(DeviceBackend, ModesMatchReference) {
  REQUIRE_DEVICE();
  testutil::Rng rng(51);
  const auto data = rng.bytes(16 * 3000);
  for (std::size_t key_len : {16u, 24u, 32u}) {
    for (Mode m : {Mode::ecb, Mode::ctr, Mode::cbc}) {
      for (Direction d : {Direction::encrypt, Direction::decrypt}) {
        ModeParams p{m, d, rng.bytes(key_len), rng.block(), Padding::none};
        if (p.host_sequential()) continue;
        EngineConfig dev{Backend::device, {32, 32}, {}, nullptr};
        EngineConfig ref{Backend::reference, {32, 32}, {}, nullptr};
        EXPECT_EQ(run_mode(data, p, dev), run_mode(data, p, ref));
      }
    }
  }
}

// Upload plus readback as a share of the dispatch should shrink as the data
// grows; 10% slack for timer noise. Each size gets a warm-up dispatch and the
// median of five timed ones.
TEST(DeviceBackend, CopyOverheadFractionShrinks) {
  REQUIRE_DEVICE();
  testutil::Rng rng(52);
  Uniforms u;
  u.keys = expand_key(rng.bytes(16));
  double previous = 1.0;
  for (std::uint64_t bytes : {std::uint64_t{64} << 10, std::uint64_t{1} << 20, std::uint64_t{64} << 20}) {
    BlockGrid in({2048, 2048});
    in.set_used(bytes / 16);
    dispatch(kernels::ecb_encrypt(), in, u, Backend::device);
    std::vector<double> fracs;
    for (int i = 0; i < 5; ++i) {
      const DispatchStats s = dispatch(kernels::ecb_encrypt(), in, u, Backend::device).stats;
      fracs.push_back(static_cast<double>(s.copy_in_ns + s.copy_out_ns) /
                      static_cast<double>(s.total_ns()));
    }
    std::sort(fracs.begin(), fracs.end());
    const double frac = fracs[2];
    RecordProperty("copy_fraction_" + std::to_string(bytes), std::to_string(frac));
    EXPECT_LE(frac, previous * 1.10) << bytes;
    previous = frac;
  }
}

}  // namespace
