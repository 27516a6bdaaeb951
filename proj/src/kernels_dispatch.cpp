#include "twistdisc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace twistdisc::kernels {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Backend* pick_default() {
  if (const char* env = std::getenv("TWISTDISC_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_backend();
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2() && avx2_backend()) return avx2_backend();
    // Unknown or unavailable request in the environment: fall through to auto.
  }
  if (cpu_has_avx2() && avx2_backend()) return avx2_backend();
  return &scalar_backend();
}

std::atomic<const Backend*>& current() {
  static std::atomic<const Backend*> ptr{pick_default()};
  return ptr;
}

}  // namespace

const Backend& active() { return *current().load(std::memory_order_relaxed); }

void force_backend(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    current().store(&scalar_backend(), std::memory_order_relaxed);
    return;
  }
  if (std::strcmp(name, "avx2") == 0) {
    if (!cpu_has_avx2() || !avx2_backend())
      throw std::invalid_argument("force_backend: avx2 not available on this machine");
    current().store(avx2_backend(), std::memory_order_relaxed);
    return;
  }
  throw std::invalid_argument(std::string("force_backend: unknown backend '") + name + "'");
}

}  // namespace twistdisc::kernels
