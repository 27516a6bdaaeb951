// AVX2+FMA variants of the complex kernels.  Each function carries its own
// target attribute so this translation unit builds without -mavx2; dispatch
// checks the CPU at runtime.  Data layout is the standard interleaved
// (re, im) of std::complex<double>: one __m256d holds two complex numbers.

#include "twistdisc/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace twistdisc::kernels {

namespace {

#define TD_AVX2 __attribute__((target("avx2,fma")))

TD_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Alternating-sign horizontal sum: v0 - v1 + v2 - v3.
TD_AVX2 inline double hsum_alt(__m256d v) {
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  return hsum(_mm256_mul_pd(v, sign));
}

TD_AVX2 cd dotc_avx2(std::size_t n, const cd* x, const cd* y) {
  const double* px = reinterpret_cast<const double*>(x);
  const double* py = reinterpret_cast<const double*>(y);
  __m256d acc_a = _mm256_setzero_pd();  // xr*yr, xi*yi pairs
  __m256d acc_b = _mm256_setzero_pd();  // xr*yi, xi*yr pairs
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d vys = _mm256_permute_pd(vy, 0x5);  // swap re/im within pairs
    acc_a = _mm256_fmadd_pd(vx, vy, acc_a);
    acc_b = _mm256_fmadd_pd(vx, vys, acc_b);
  }
  // conj(x)*y: re = xr*yr + xi*yi, im = xr*yi - xi*yr
  double re = hsum(acc_a);
  double im = hsum_alt(acc_b);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return cd{re, im};
}

TD_AVX2 cd dotu_avx2(std::size_t n, const cd* x, const cd* y) {
  const double* px = reinterpret_cast<const double*>(x);
  const double* py = reinterpret_cast<const double*>(y);
  __m256d acc_a = _mm256_setzero_pd();
  __m256d acc_b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d vys = _mm256_permute_pd(vy, 0x5);
    acc_a = _mm256_fmadd_pd(vx, vy, acc_a);
    acc_b = _mm256_fmadd_pd(vx, vys, acc_b);
  }
  // x*y: re = xr*yr - xi*yi, im = xr*yi + xi*yr
  double re = hsum_alt(acc_a);
  double im = hsum(acc_b);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return cd{re, im};
}

TD_AVX2 void matvec_avx2(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dotu_avx2(n, a + i * n, x);
}

TD_AVX2 void matvec_adj_avx2(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = cd{0.0, 0.0};
  double* py = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = reinterpret_cast<const double*>(a + i * n);
    const __m256d xr = _mm256_set1_pd(x[i].real());
    const __m256d xi = _mm256_set1_pd(x[i].imag());
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      __m256d va = _mm256_loadu_pd(row + 2 * j);
      __m256d vas = _mm256_permute_pd(va, 0x5);
      __m256d t = _mm256_mul_pd(va, xr);  // ar*xr | ai*xr
      // conj(a)*x: re = ar*xr + ai*xi (even lanes), im = ar*xi - ai*xr (odd)
      __m256d res = _mm256_fmsubadd_pd(vas, xi, t);
      _mm256_storeu_pd(py + 2 * j, _mm256_add_pd(_mm256_loadu_pd(py + 2 * j), res));
    }
    for (; j < n; ++j) y[j] += std::conj(a[i * n + j]) * x[i];
  }
}

TD_AVX2 void axpy_avx2(std::size_t n, cd alpha, const cd* x, cd* y) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vxs = _mm256_permute_pd(vx, 0x5);
    __m256d t = _mm256_mul_pd(vx, ar);  // xr*ar | xi*ar
    __m256d u = _mm256_mul_pd(vxs, ai); // xi*ai | xr*ai
    // alpha*x: re = ar*xr - ai*xi (even), im = ar*xi + ai*xr (odd)
    __m256d res = _mm256_addsub_pd(t, u);
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(_mm256_loadu_pd(py + 2 * i), res));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

TD_AVX2 double nrm2sq_avx2(std::size_t n, const cd* x) {
  const double* px = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

#undef TD_AVX2

}  // namespace

const Backend* avx2_backend() {
  static const Backend backend{
      "avx2",          dotc_avx2, dotu_avx2,   matvec_avx2,
      matvec_adj_avx2, axpy_avx2, nrm2sq_avx2,
  };
  return &backend;
}

}  // namespace twistdisc::kernels

#else

namespace twistdisc::kernels {
const Backend* avx2_backend() { return nullptr; }
}  // namespace twistdisc::kernels

#endif
