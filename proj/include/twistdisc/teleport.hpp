#pragma once
/*
 * Maximally entangled bases and exact teleportation expansion.
 *
 * mes_state(U) is (U ⊗ I)|Ψ0>, |Ψ0> = (1/√d) Σ |ii>, so state overlaps equal
 * hs_inner of the defining unitaries.  expand_teleport projects the tripartite
 * vector |ψ>_C |Ψ_r>_AB (C slowest, then A, then B) onto each |Ψ_i>_CA ⊗ |j>_B
 * and returns the branch table: outcome i occurs with probability 1/d² and
 * leaves B in U_rᵀ U_i† |ψ> up to a phase.  The expansion is computed by
 * honest projection (not from that closed form) and self-checks that the
 * branches reassemble the input vector.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include "twistdisc/operators.hpp"
#include "twistdisc/types.hpp"

namespace twistdisc {

// |Ψ_U> amplitudes: amp[a*d + b] = U(a,b)/√d.
PureState mes_state(const UnitaryMatrix& u);

struct MesBasis {
  std::size_t dim = 0;
  std::string family;  // "gbs" | "lattice" | "generic"
  std::vector<UnitaryMatrix> unitaries;
  std::vector<std::string> labels;
  std::vector<std::vector<SlotLabel>> slot_labels;  // empty for generic
  std::optional<TwistPhaseTable> twist;
};

MesBasis make_gbs_basis(std::size_t d, bool with_twist = true);
MesBasis make_lattice_basis(std::uint64_t d, bool with_twist = true);

struct Branch {
  std::size_t outcome = 0;     // basis index i measured on systems C, A
  double probability = 0.0;
  PureState bob_state;         // normalized post-measurement state of B
};

struct BranchTable {
  std::size_t dim = 0;
  std::size_t resource_index = 0;
  std::vector<Branch> branches;  // one per basis element, in basis order
};

// psi: state of C.  basis: orthonormal MES basis (twist not required).
// resource_index: which basis element supplies the AB resource state.
BranchTable expand_teleport(const PureState& psi, const MesBasis& basis,
                            std::size_t resource_index);

// One seeded draw from the outcome distribution.
std::size_t sample_measurement(const BranchTable& table, std::uint64_t seed);

}  // namespace twistdisc
