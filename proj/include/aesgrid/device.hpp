#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "aesgrid/error.hpp"
#include "aesgrid/grid.hpp"
#include "aesgrid/kernel.hpp"

#if defined(AESGRID_WITH_DEVICE)
#include <dlfcn.h>

#include <memory>
#include <mutex>

#include "aesgrid/device_kernels.hpp"
#endif

namespace aesgrid::device {

inline constexpr const char* kDisableEnv = "AESGRID_DISABLE_DEVICE";

inline bool disabled_by_env() noexcept {
  const char* v = std::getenv(kDisableEnv);
  return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

/// Words uploaded to the device: fwd T0..T3, inv T0..T3, sbox, inv_sbox.
inline std::vector<std::uint32_t> table_rows(const TTableSet& t) {
  std::vector<std::uint32_t> rows;
  rows.reserve(10 * 256);
  for (const Table& tab : t.fwd) rows.insert(rows.end(), tab.begin(), tab.end());
  for (const Table& tab : t.inv) rows.insert(rows.end(), tab.begin(), tab.end());
  for (std::uint8_t s : t.sbox) rows.push_back(s);
  for (std::uint8_t s : t.inv_sbox) rows.push_back(s);
  return rows;
}

#if defined(AESGRID_WITH_DEVICE)

namespace cl {

// The subset of the OpenCL 1.2 C API used here, resolved at run time from the
// ICD loader so that builds do not need OpenCL headers.
using cl_int = std::int32_t;
using cl_uint = std::uint32_t;
using cl_ulong = std::uint64_t;
using cl_bool = cl_uint;
using cl_device_type = cl_ulong;
using cl_mem_flags = cl_ulong;
using cl_command_queue_properties = cl_ulong;
using cl_context_properties = std::intptr_t;
using cl_platform_id = struct _cl_platform_id*;
using cl_device_id = struct _cl_device_id*;
using cl_context = struct _cl_context*;
using cl_command_queue = struct _cl_command_queue*;
using cl_program = struct _cl_program*;
using cl_kernel = struct _cl_kernel*;
using cl_mem = struct _cl_mem*;
using cl_event = struct _cl_event*;

inline constexpr cl_int kSuccess = 0;
inline constexpr cl_int kDeviceNotAvailable = -2;
inline constexpr cl_int kOutOfResources = -5;
inline constexpr cl_int kExecStatusError = -14;
inline constexpr cl_device_type kDeviceTypeAll = 0xFFFFFFFF;
inline constexpr cl_mem_flags kMemWriteOnly = 1 << 1;
inline constexpr cl_mem_flags kMemReadOnly = 1 << 2;
inline constexpr cl_mem_flags kMemCopyHostPtr = 1 << 5;
inline constexpr cl_uint kProgramBuildLog = 0x1183;
inline constexpr cl_bool kTrue = 1;

struct Api {
  void* lib = nullptr;
  cl_int (*GetPlatformIDs)(cl_uint, cl_platform_id*, cl_uint*) = nullptr;
  cl_int (*GetDeviceIDs)(cl_platform_id, cl_device_type, cl_uint, cl_device_id*, cl_uint*) = nullptr;
  cl_context (*CreateContext)(const cl_context_properties*, cl_uint, const cl_device_id*,
                              void (*)(const char*, const void*, std::size_t, void*), void*,
                              cl_int*) = nullptr;
  cl_command_queue (*CreateCommandQueue)(cl_context, cl_device_id, cl_command_queue_properties,
                                         cl_int*) = nullptr;
  cl_program (*CreateProgramWithSource)(cl_context, cl_uint, const char**, const std::size_t*,
                                        cl_int*) = nullptr;
  cl_int (*BuildProgram)(cl_program, cl_uint, const cl_device_id*, const char*,
                         void (*)(cl_program, void*), void*) = nullptr;
  cl_int (*GetProgramBuildInfo)(cl_program, cl_device_id, cl_uint, std::size_t, void*,
                                std::size_t*) = nullptr;
  cl_kernel (*CreateKernel)(cl_program, const char*, cl_int*) = nullptr;
  cl_mem (*CreateBuffer)(cl_context, cl_mem_flags, std::size_t, void*, cl_int*) = nullptr;
  cl_int (*SetKernelArg)(cl_kernel, cl_uint, std::size_t, const void*) = nullptr;
  cl_int (*EnqueueWriteBuffer)(cl_command_queue, cl_mem, cl_bool, std::size_t, std::size_t,
                               const void*, cl_uint, const cl_event*, cl_event*) = nullptr;
  cl_int (*EnqueueReadBuffer)(cl_command_queue, cl_mem, cl_bool, std::size_t, std::size_t, void*,
                              cl_uint, const cl_event*, cl_event*) = nullptr;
  cl_int (*EnqueueNDRangeKernel)(cl_command_queue, cl_kernel, cl_uint, const std::size_t*,
                                 const std::size_t*, const std::size_t*, cl_uint, const cl_event*,
                                 cl_event*) = nullptr;
  cl_int (*Finish)(cl_command_queue) = nullptr;
  cl_int (*ReleaseMemObject)(cl_mem) = nullptr;
  cl_int (*ReleaseKernel)(cl_kernel) = nullptr;
  cl_int (*ReleaseProgram)(cl_program) = nullptr;
  cl_int (*ReleaseCommandQueue)(cl_command_queue) = nullptr;
  cl_int (*ReleaseContext)(cl_context) = nullptr;

  bool load() {
    for (const char* name : {"libOpenCL.so.1", "libOpenCL.so"}) {
      lib = ::dlopen(name, RTLD_NOW | RTLD_LOCAL);
      if (lib != nullptr) break;
    }
    if (lib == nullptr) return false;
    bool ok = true;
    auto bind = [&](auto& fn, const char* sym) {
      void* p = ::dlsym(lib, sym);
      ok = ok && p != nullptr;
      fn = reinterpret_cast<std::remove_reference_t<decltype(fn)>>(p);
    };
    bind(GetPlatformIDs, "clGetPlatformIDs");
    bind(GetDeviceIDs, "clGetDeviceIDs");
    bind(CreateContext, "clCreateContext");
    bind(CreateCommandQueue, "clCreateCommandQueue");
    bind(CreateProgramWithSource, "clCreateProgramWithSource");
    bind(BuildProgram, "clBuildProgram");
    bind(GetProgramBuildInfo, "clGetProgramBuildInfo");
    bind(CreateKernel, "clCreateKernel");
    bind(CreateBuffer, "clCreateBuffer");
    bind(SetKernelArg, "clSetKernelArg");
    bind(EnqueueWriteBuffer, "clEnqueueWriteBuffer");
    bind(EnqueueReadBuffer, "clEnqueueReadBuffer");
    bind(EnqueueNDRangeKernel, "clEnqueueNDRangeKernel");
    bind(Finish, "clFinish");
    bind(ReleaseMemObject, "clReleaseMemObject");
    bind(ReleaseKernel, "clReleaseKernel");
    bind(ReleaseProgram, "clReleaseProgram");
    bind(ReleaseCommandQueue, "clReleaseCommandQueue");
    bind(ReleaseContext, "clReleaseContext");
    return ok;
  }
};

}  // namespace cl

/// One compute device with the kernel program built and the tables
/// uploaded. Dispatches on a context are serialized by its mutex.
class DeviceContext {
 public:
  static DeviceContext* instance() {
    static DeviceContext* ctx = [] {
      auto* c = new DeviceContext();
      if (!c->init()) {
        delete c;
        return static_cast<DeviceContext*>(nullptr);
      }
      return c;
    }();
    return ctx;
  }

  const std::string& description() const noexcept { return description_; }

  DispatchResult dispatch(const KernelSpec& spec, const BlockGrid& input, const Uniforms& u) {
    using clock = std::chrono::steady_clock;
    const std::scoped_lock lock(mutex_);
    cl::cl_kernel kernel = kernel_for(spec.id);
    DispatchResult result{BlockGrid(input.dims()), {}};
    const std::uint64_t used = input.used();
    result.stats.bytes_processed = used * kBlockBytes;
    if (used == 0) return result;

    const std::size_t bytes = static_cast<std::size_t>(used * kBlockBytes);
    const std::array<std::uint32_t, kParamWords> params = param_block(
        u, input.dims(), spec.id == KernelId::ecb_decrypt || spec.id == KernelId::cbc_decrypt);
    cl::cl_int err = cl::kSuccess;

    auto t0 = clock::now();
    reserve(bytes);
    MemHandle par(api_.CreateBuffer(context_, cl::kMemReadOnly | cl::kMemCopyHostPtr,
                                    sizeof(params), const_cast<std::uint32_t*>(params.data()),
                                    &err),
                  api_);
    check(err, "uniform buffer");
    check(api_.EnqueueWriteBuffer(queue_, in_buf_, cl::kTrue, 0, bytes, input.cells().data(), 0,
                                  nullptr, nullptr),
          "upload");
    auto t1 = clock::now();

    cl::cl_mem args[] = {in_buf_, out_buf_, par.get(), tables_};
    for (cl::cl_uint i = 0; i < 4; ++i)
      check(api_.SetKernelArg(kernel, i, sizeof(cl::cl_mem), &args[i]), "kernel argument");
    const std::size_t global = static_cast<std::size_t>(used);
    check(api_.EnqueueNDRangeKernel(queue_, kernel, 1, nullptr, &global, nullptr, 0, nullptr,
                                    nullptr),
          "kernel launch");
    check(api_.Finish(queue_), "kernel execution");
    auto t2 = clock::now();

    result.output.set_used(used);
    check(api_.EnqueueReadBuffer(queue_, out_buf_, cl::kTrue, 0, bytes,
                                 result.output.cells().data(), 0, nullptr, nullptr),
          "readback");
    auto t3 = clock::now();

    auto ns = [](auto d) {
      return static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(d).count());
    };
    result.stats.copy_in_ns = ns(t1 - t0);
    result.stats.kernel_ns = ns(t2 - t1);
    result.stats.copy_out_ns = ns(t3 - t2);
    return result;
  }

 private:
  struct MemHandle {
    MemHandle(cl::cl_mem m, const cl::Api& api) : mem(m), api(&api) {}
    ~MemHandle() {
      if (mem != nullptr) api->ReleaseMemObject(mem);
    }
    MemHandle(const MemHandle&) = delete;
    MemHandle& operator=(const MemHandle&) = delete;
    cl::cl_mem get() const noexcept { return mem; }
    cl::cl_mem mem;
    const cl::Api* api;
  };

  // Staging buffers live as long as the context and only grow.
  void reserve(std::size_t bytes) {
    if (bytes <= capacity_) return;
    release_staging();
    cl::cl_int err = cl::kSuccess;
    in_buf_ = api_.CreateBuffer(context_, cl::kMemReadOnly, bytes, nullptr, &err);
    check(err, "input buffer");
    out_buf_ = api_.CreateBuffer(context_, cl::kMemWriteOnly, bytes, nullptr, &err);
    check(err, "output buffer");
    capacity_ = bytes;
  }

  void release_staging() {
    if (in_buf_ != nullptr) api_.ReleaseMemObject(in_buf_);
    if (out_buf_ != nullptr) api_.ReleaseMemObject(out_buf_);
    in_buf_ = out_buf_ = nullptr;
    capacity_ = 0;
  }

  static void check(cl::cl_int err, const char* what) {
    if (err == cl::kSuccess) return;
    const std::string msg = std::string(what) + " failed with OpenCL error " + std::to_string(err);
    if (err == cl::kOutOfResources || err == cl::kExecStatusError || err == cl::kDeviceNotAvailable)
      throw Error(Errc::device_lost, msg);
    throw Error(Errc::kernel_panic, msg);
  }

  static std::array<std::uint32_t, kParamWords> param_block(const Uniforms& u, GridDims dims,
                                                           bool inverse) {
    std::array<std::uint32_t, kParamWords> p{};
    const auto& keys = inverse ? u.keys.dec_keys : u.keys.enc_keys;
    for (int r = 0; r <= u.keys.rounds; ++r) {
      p[4 * r] = keys[r].w0;
      p[4 * r + 1] = keys[r].w1;
      p[4 * r + 2] = keys[r].w2;
      p[4 * r + 3] = keys[r].w3;
    }
    p[60] = static_cast<std::uint32_t>(u.keys.rounds);
    p[61] = u.iv.w0;
    p[62] = u.iv.w1;
    p[63] = u.iv.w2;
    p[64] = u.iv.w3;
    p[65] = static_cast<std::uint32_t>(u.base_block_offset);
    p[66] = static_cast<std::uint32_t>(dims.width);
    p[67] = static_cast<std::uint32_t>(dims.height);
    return p;
  }

  cl::cl_kernel kernel_for(KernelId id) const {
    switch (id) {
      case KernelId::identity: return k_identity_;
      case KernelId::ecb_encrypt: return k_ecb_enc_;
      case KernelId::ecb_decrypt: return k_ecb_dec_;
      case KernelId::ctr: return k_ctr_;
      case KernelId::cbc_decrypt: return k_cbc_dec_;
      case KernelId::custom: break;
    }
    throw Error(Errc::backend_unavailable, "custom kernels cannot run on the device backend");
  }

  bool init() {
    if (!api_.load()) return false;
    cl::cl_uint n = 0;
    if (api_.GetPlatformIDs(0, nullptr, &n) != cl::kSuccess || n == 0) return false;
    std::vector<cl::cl_platform_id> platforms(n);
    if (api_.GetPlatformIDs(n, platforms.data(), nullptr) != cl::kSuccess) return false;
    for (cl::cl_platform_id pl : platforms) {
      cl::cl_uint nd = 0;
      if (api_.GetDeviceIDs(pl, cl::kDeviceTypeAll, 1, &device_, &nd) == cl::kSuccess && nd > 0)
        break;
      device_ = nullptr;
    }
    if (device_ == nullptr) return false;

    cl::cl_int err = cl::kSuccess;
    context_ = api_.CreateContext(nullptr, 1, &device_, nullptr, nullptr, &err);
    if (err != cl::kSuccess) return false;
    queue_ = api_.CreateCommandQueue(context_, device_, 0, &err);
    if (err != cl::kSuccess) return false;
    const char* src = kKernelSource;
    program_ = api_.CreateProgramWithSource(context_, 1, &src, nullptr, &err);
    if (err != cl::kSuccess) return false;
    if (api_.BuildProgram(program_, 1, &device_, "", nullptr, nullptr) != cl::kSuccess) {
      std::size_t len = 0;
      api_.GetProgramBuildInfo(program_, device_, cl::kProgramBuildLog, 0, nullptr, &len);
      std::string log(len, '\0');
      api_.GetProgramBuildInfo(program_, device_, cl::kProgramBuildLog, len, log.data(), nullptr);
      description_ = "kernel build failed: " + log;
      return false;
    }
    for (auto [slot, name] : {std::pair{&k_identity_, "identity"}, {&k_ecb_enc_, "ecb_encrypt"},
                              {&k_ecb_dec_, "ecb_decrypt"}, {&k_ctr_, "ctr"},
                              {&k_cbc_dec_, "cbc_decrypt"}}) {
      *slot = api_.CreateKernel(program_, name, &err);
      if (err != cl::kSuccess) return false;
    }
    std::vector<std::uint32_t> rows = table_rows(aesgrid::tables());
    tables_ = api_.CreateBuffer(context_, cl::kMemReadOnly | cl::kMemCopyHostPtr,
                                rows.size() * sizeof(std::uint32_t), rows.data(), &err);
    if (err != cl::kSuccess) return false;
    description_ = "opencl";
    return true;
  }

  ~DeviceContext() {
    release_staging();
    if (tables_ != nullptr) api_.ReleaseMemObject(tables_);
    for (cl::cl_kernel k : {k_identity_, k_ecb_enc_, k_ecb_dec_, k_ctr_, k_cbc_dec_})
      if (k != nullptr) api_.ReleaseKernel(k);
    if (program_ != nullptr) api_.ReleaseProgram(program_);
    if (queue_ != nullptr) api_.ReleaseCommandQueue(queue_);
    if (context_ != nullptr) api_.ReleaseContext(context_);
  }

  DeviceContext() = default;

  cl::Api api_;
  cl::cl_device_id device_ = nullptr;
  cl::cl_context context_ = nullptr;
  cl::cl_command_queue queue_ = nullptr;
  cl::cl_program program_ = nullptr;
  cl::cl_kernel k_identity_ = nullptr, k_ecb_enc_ = nullptr, k_ecb_dec_ = nullptr,
                k_ctr_ = nullptr, k_cbc_dec_ = nullptr;
  cl::cl_mem tables_ = nullptr;
  cl::cl_mem in_buf_ = nullptr;
  cl::cl_mem out_buf_ = nullptr;
  std::size_t capacity_ = 0;
  std::string description_;
  std::mutex mutex_;
};

inline bool compiled_in() noexcept { return true; }

inline bool available() {
  if (disabled_by_env()) return false;
  return DeviceContext::instance() != nullptr;
}

inline DispatchResult dispatch(const KernelSpec& spec, const BlockGrid& input, const Uniforms& u) {
  if (disabled_by_env())
    throw Error(Errc::backend_unavailable, std::string("device disabled by ") + kDisableEnv);
  DeviceContext* ctx = DeviceContext::instance();
  if (ctx == nullptr) throw Error(Errc::backend_unavailable, "no OpenCL device initialized");
  return ctx->dispatch(spec, input, u);
}

#else

inline bool compiled_in() noexcept { return false; }
inline bool available() { return false; }

inline DispatchResult dispatch(const KernelSpec&, const BlockGrid&, const Uniforms&) {
  throw Error(Errc::backend_unavailable, "built without AESGRID_WITH_DEVICE");
}

#endif

}  // namespace aesgrid::device
