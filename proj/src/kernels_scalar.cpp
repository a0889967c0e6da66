// Reference kernels. Compiled with -ffp-contract=off so that a*b+c keeps
// the two-rounding sequence the SIMD backends replicate.

#include "pointdr/kernels.hpp"

namespace pointdr::kern {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double max(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

void relu(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask(const double* pre, double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pre[i] > 0.0)) g[i] = 0.0;
  }
}

void sgd_update(double* w, double* v, const double* g, std::size_t n,
                double lr, double mu, double wd) {
  for (std::size_t i = 0; i < n; ++i) {
    const double u = g[i] + wd * w[i];
    const double vi = mu * v[i] + u;
    v[i] = vi;
    w[i] -= lr * vi;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{axpy, scale, dot, sum, max, relu, relu_mask, sgd_update};
  return table;
}

}  // namespace pointdr::kern
