#pragma once
/*
 * Dense complex<double> arithmetic kernels.
 *
 * A plain scalar backend is the reference implementation.  On x86-64 an
 * AVX2+FMA backend is compiled alongside it (per-function target attributes,
 * so no special build flags) and selected at runtime when the CPU supports
 * it.  TWISTDISC_KERNELS=scalar|avx2 overrides the automatic choice;
 * force_backend() does the same programmatically (used by the equivalence
 * tests).  Both backends implement the same contract and are tested against
 * each other on random inputs.
 */

#include <complex>
#include <cstddef>

namespace twistdisc::kernels {

using cd = std::complex<double>;

struct Backend {
  const char* name;
  // sum_i conj(x_i) * y_i
  cd (*dotc)(std::size_t n, const cd* x, const cd* y);
  // sum_i x_i * y_i
  cd (*dotu)(std::size_t n, const cd* x, const cd* y);
  // y = A x with A row-major m x n; y must not alias A or x
  void (*matvec)(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y);
  // y = A† x with A row-major m x n (y has n entries); no aliasing
  void (*matvec_adj)(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y);
  // y += alpha * x
  void (*axpy)(std::size_t n, cd alpha, const cd* x, cd* y);
  // sum_i |x_i|^2
  double (*nrm2sq)(std::size_t n, const cd* x);
};

const Backend& scalar_backend();
// Null when the build target is not x86-64.
const Backend* avx2_backend();
bool cpu_has_avx2();

// Runtime-selected backend (env override honoured on first use).
const Backend& active();
// "scalar" or "avx2"; throws std::invalid_argument if unknown/unavailable.
void force_backend(const char* name);

inline cd dotc(std::size_t n, const cd* x, const cd* y) { return active().dotc(n, x, y); }
inline cd dotu(std::size_t n, const cd* x, const cd* y) { return active().dotu(n, x, y); }
inline void matvec(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  active().matvec(m, n, a, x, y);
}
inline void matvec_adj(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  active().matvec_adj(m, n, a, x, y);
}
inline void axpy(std::size_t n, cd alpha, const cd* x, cd* y) { active().axpy(n, alpha, x, y); }
inline double nrm2sq(std::size_t n, const cd* x) { return active().nrm2sq(n, x); }

}  // namespace twistdisc::kernels
