#pragma once
/*
 * Core value types: dense row-major complex matrices, unitaries that carry a
 * verification flag, and unit-norm state vectors.  All equality checks are
 * tolerance-based; tolerances are explicit parameters with named defaults.
 */

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistdisc {

using cd = std::complex<double>;

namespace tol {
// Exact analytic constructions (roots of unity, permutation structure).
inline constexpr double exact = 1e-12;
// Unitarity drift allowed on verified unitaries.
inline constexpr double unitary = 1e-12;
// Orthogonality / Gram-matrix checks on constructed bases.
inline constexpr double ortho = 1e-10;
// Residual threshold for accepting a discrimination certificate.
inline constexpr double cert = 1e-9;
// Solver objective acceptance; below this every pairwise residual is < cert.
inline constexpr double objective_accept = 1e-18;
}  // namespace tol

struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cd> entries;  // row-major

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {
    if (r == 0 || c == 0) throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
  }

  static ComplexMatrix identity(std::size_t d) {
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m.entries[i * d + i] = 1.0;
    return m;
  }

  cd& operator()(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  cd operator()(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

  cd* data() { return entries.data(); }
  const cd* data() const { return entries.data(); }

  bool is_square() const { return rows == cols; }
  std::size_t size() const { return entries.size(); }
};

// Largest entrywise absolute difference; dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Entrywise comparison with an explicit absolute tolerance.
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tolerance);

struct UnitaryMatrix {
  ComplexMatrix matrix;
  bool verified = false;

  std::size_t dim() const { return matrix.rows; }
};

// max entrywise |U†U - I|; requires a square matrix.
double unitarity_error(const ComplexMatrix& m);

// Checks U†U = I within `tolerance` and returns a verified wrapper; throws otherwise.
UnitaryMatrix make_verified_unitary(ComplexMatrix m, double tolerance = tol::unitary);

struct PureState {
  std::vector<cd> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  const cd* data() const { return amplitudes.data(); }
  cd* data() { return amplitudes.data(); }
};

double state_norm(const PureState& s);

// Validates unit norm within `tolerance`; throws otherwise.
PureState make_pure_state(std::vector<cd> amplitudes, double tolerance = tol::exact);

// Rescales to unit norm; throws on (near-)zero vectors.
PureState normalized_state(std::vector<cd> amplitudes);

}  // namespace twistdisc
