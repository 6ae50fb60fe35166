#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aesgrid {

enum class Errc {
  invalid_key_length,
  not_block_aligned,
  out_of_bounds,
  bad_padding,
  missing_iv,
  backend_unavailable,
  kernel_panic,
  work_cap_exceeded,
  counter_overflow,
  device_lost,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::invalid_key_length: return "InvalidKeyLength";
    case Errc::not_block_aligned: return "NotBlockAligned";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::bad_padding: return "BadPadding";
    case Errc::missing_iv: return "MissingIV";
    case Errc::backend_unavailable: return "BackendUnavailable";
    case Errc::kernel_panic: return "KernelPanic";
    case Errc::work_cap_exceeded: return "WorkCapExceeded";
    case Errc::counter_overflow: return "CounterOverflow";
    case Errc::device_lost: return "DeviceLost";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  // DeviceLost is the only condition a caller can reasonably retry.
  bool retryable() const noexcept { return code_ == Errc::device_lost; }

 private:
  Errc code_;
};

}  // namespace aesgrid
