#include "twistdisc/kernels.hpp"

namespace twistdisc::kernels {

namespace {

cd dotc_scalar(std::size_t n, const cd* x, const cd* y) {
  cd acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

cd dotu_scalar(std::size_t n, const cd* x, const cd* y) {
  cd acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void matvec_scalar(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dotu_scalar(n, a + i * n, x);
}

void matvec_adj_scalar(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = cd{0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    const cd xi = x[i];
    const cd* row = a + i * n;
    for (std::size_t j = 0; j < n; ++j) y[j] += std::conj(row[j]) * xi;
  }
}

void axpy_scalar(std::size_t n, cd alpha, const cd* x, cd* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double nrm2sq_scalar(std::size_t n, const cd* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return acc;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar",     dotc_scalar, dotu_scalar,  matvec_scalar,
      matvec_adj_scalar, axpy_scalar, nrm2sq_scalar,
  };
  return backend;
}

}  // namespace twistdisc::kernels
