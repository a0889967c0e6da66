#pragma once

#include <cstddef>
#include <string_view>

namespace pointdr::kern {

// Dispatch table for the dense inner loops. All kernels work on contiguous
// double buffers; n may be zero unless stated otherwise. Elementwise kernels
// (axpy, scale, relu, relu_mask, sgd_update) produce bit-identical results
// across backends because every backend performs the same per-element
// rounding sequence. Reductions (dot, sum) reassociate and may differ by
// a few ulps between backends.
struct Ops {
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double* x, std::size_t n, double a);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // Maximum element; n >= 1, inputs must be finite.
  double (*max)(const double* x, std::size_t n);
  // y[i] = x[i] > 0 ? x[i] : 0
  void (*relu)(const double* x, double* y, std::size_t n);
  // g[i] = pre[i] > 0 ? g[i] : 0, in place.
  void (*relu_mask)(const double* pre, double* g, std::size_t n);
  // Momentum SGD with additive weight decay, in place:
  //   u = g[i] + wd * w[i];  v[i] = mu * v[i] + u;  w[i] -= lr * v[i]
  void (*sgd_update)(double* w, double* v, const double* g, std::size_t n,
                     double lr, double mu, double wd);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();

// True when the binary carries the AVX2 translation unit and the CPU
// reports AVX2 + FMA.
bool avx2_available();
const Ops& avx2_ops();  // only valid when avx2_available()

// Active table. The backend is picked on first use from the POINTDR_KERNELS
// environment variable ("scalar", "avx2", "auto"; default auto = best
// available) and can be overridden programmatically.
const Ops& ops();
Backend active_backend();
void select(Backend b);  // throws std::invalid_argument if unavailable

std::string_view backend_name(Backend b);

}  // namespace pointdr::kern
