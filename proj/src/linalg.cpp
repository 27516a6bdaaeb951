#include "twistdisc/linalg.hpp"

#include <cmath>

#include "twistdisc/kernels.hpp"

namespace twistdisc {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.entries[i] - b.entries[i]));
  return worst;
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tolerance) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  return max_abs_diff(a, b) <= tolerance;
}

double unitarity_error(const ComplexMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("unitarity_error: matrix must be square");
  const std::size_t d = m.rows;
  double worst = 0.0;
  // (U†U)[i,j] = <col_i, col_j>; columns are strided, do it directly.
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      cd acc{0.0, 0.0};
      for (std::size_t k = 0; k < d; ++k) acc += std::conj(m(k, i)) * m(k, j);
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

UnitaryMatrix make_verified_unitary(ComplexMatrix m, double tolerance) {
  const double err = unitarity_error(m);
  if (err > tolerance)
    throw std::invalid_argument("make_verified_unitary: U†U deviates from I by " +
                                std::to_string(err));
  return UnitaryMatrix{std::move(m), true};
}

double state_norm(const PureState& s) {
  return std::sqrt(kernels::nrm2sq(s.dim(), s.data()));
}

PureState make_pure_state(std::vector<cd> amplitudes, double tolerance) {
  if (amplitudes.empty()) throw std::invalid_argument("make_pure_state: empty amplitude vector");
  PureState s{std::move(amplitudes)};
  const double n = state_norm(s);
  if (std::abs(n - 1.0) > tolerance)
    throw std::invalid_argument("make_pure_state: norm " + std::to_string(n) + " is not 1");
  return s;
}

PureState normalized_state(std::vector<cd> amplitudes) {
  if (amplitudes.empty()) throw std::invalid_argument("normalized_state: empty amplitude vector");
  PureState s{std::move(amplitudes)};
  const double n = state_norm(s);
  if (n < 1e-12) throw std::invalid_argument("normalized_state: zero vector");
  for (auto& a : s.amplitudes) a /= n;
  return s;
}

ComplexMatrix mul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("mul: dimension mismatch");
  ComplexMatrix c(a.rows, b.cols);
  // C_row_i += A[i,k] * B_row_k  (axpy over contiguous rows of B)
  for (std::size_t i = 0; i < a.rows; ++i) {
    cd* crow = c.data() + i * c.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const cd aik = a(i, k);
      if (aik == cd{0.0, 0.0}) continue;
      kernels::axpy(b.cols, aik, b.data() + k * b.cols, crow);
    }
  }
  return c;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

ComplexMatrix transpose_of(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
  return r;
}

ComplexMatrix conj_of(const ComplexMatrix& m) {
  ComplexMatrix r = m;
  for (auto& e : r.entries) e = std::conj(e);
  return r;
}

cd trace(const ComplexMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("trace: matrix must be square");
  cd acc{0.0, 0.0};
  for (std::size_t i = 0; i < m.rows; ++i) acc += m(i, i);
  return acc;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.rows * b.rows, a.cols * b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) {
      const cd aij = a(i, j);
      for (std::size_t k = 0; k < b.rows; ++k)
        for (std::size_t l = 0; l < b.cols; ++l)
          r(i * b.rows + k, j * b.cols + l) = aij * b(k, l);
    }
  return r;
}

cd hs_inner(const ComplexMatrix& v, const ComplexMatrix& u) {
  if (!v.is_square() || !u.is_square() || v.rows != u.rows)
    throw std::invalid_argument("hs_inner: need same-dimension square matrices");
  // Tr(V†U) = sum_{ij} conj(V_ij) U_ij
  const cd t = kernels::dotc(v.size(), v.data(), u.data());
  return t / static_cast<double>(v.rows);
}

PureState apply(const UnitaryMatrix& u, const PureState& s) {
  if (u.dim() != s.dim()) throw std::invalid_argument("apply: dimension mismatch");
  PureState out;
  out.amplitudes.resize(s.dim());
  kernels::matvec(u.dim(), u.dim(), u.matrix.data(), s.data(), out.data());
  if (u.verified) {
    const double drift = std::abs(state_norm(out) - state_norm(s));
    if (drift > tol::exact)
      throw std::runtime_error("apply: norm drifted by " + std::to_string(drift));
  }
  return out;
}

cd state_inner(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("state_inner: dimension mismatch");
  return kernels::dotc(a.dim(), a.data(), b.data());
}

UnitaryMatrix tensor_u(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  return UnitaryMatrix{tensor(a.matrix, b.matrix), a.verified && b.verified};
}

}  // namespace twistdisc
