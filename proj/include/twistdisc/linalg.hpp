#pragma once
/*
 * Matrix/vector operations used throughout: products, adjoints, Kronecker
 * products, the normalized Hilbert-Schmidt inner product, and state
 * application.  hs_inner(v, u) = Tr(v† u) / d so that the correspondence
 * between maximally entangled states and unitaries is isometric: the overlap
 * of two such states equals hs_inner of their defining unitaries.
 */

#include "twistdisc/types.hpp"

namespace twistdisc {

ComplexMatrix mul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix transpose_of(const ComplexMatrix& m);
ComplexMatrix conj_of(const ComplexMatrix& m);
cd trace(const ComplexMatrix& m);

// Kronecker product; (a ⊗ b)[(i*br + k), (j*bc + l)] = a[i,j] * b[k,l].
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

// Tr(v† u) / d for same-dimension square matrices.
cd hs_inner(const ComplexMatrix& v, const ComplexMatrix& u);

// y = U x; when u is verified the output norm is checked against the input.
PureState apply(const UnitaryMatrix& u, const PureState& s);

// <a|b> for equal-dimension states.
cd state_inner(const PureState& a, const PureState& b);

UnitaryMatrix tensor_u(const UnitaryMatrix& a, const UnitaryMatrix& b);

}  // namespace twistdisc
