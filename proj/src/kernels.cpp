#include "pointdr/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace pointdr::kern {
namespace {

Backend pick_initial() {
  const char* env = std::getenv("POINTDR_KERNELS");
  const std::string_view v = env != nullptr ? env : "auto";
  if (v == "scalar") return Backend::scalar;
  if (v == "avx2") {
    if (!avx2_available()) {
      throw std::runtime_error("POINTDR_KERNELS=avx2 but AVX2 is unavailable");
    }
    return Backend::avx2;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

Backend& backend_slot() {
  static Backend b = pick_initial();
  return b;
}

}  // namespace

bool avx2_available() {
#ifdef POINTDR_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#ifndef POINTDR_HAVE_AVX2_TU
const Ops& avx2_ops() {
  throw std::logic_error("AVX2 kernels not built on this architecture");
}
#endif

const Ops& ops() {
  return backend_slot() == Backend::avx2 ? avx2_ops() : scalar_ops();
}

Backend active_backend() { return backend_slot(); }

void select(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) {
    throw std::invalid_argument("AVX2 backend unavailable on this machine");
  }
  backend_slot() = b;
}

std::string_view backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace pointdr::kern
