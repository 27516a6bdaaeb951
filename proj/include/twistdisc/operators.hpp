#pragma once
/*
 * Discrete Weyl operator families and twist-commutativity analysis.
 *
 * build_shift(d) is the cyclic shift X_d (X|j> = |j+1 mod d>) and
 * build_clock(d) the phase operator Z_d = diag(ω^j), ω = exp(2πi/d).  A
 * generalized Bell label (m, n) names X^m Z^n.  A qudit-lattice label over
 * d = Π p_j^{r_j} (factors sorted by ascending prime power) names
 * ⊗_j (⊗_i X_{p_j}^{s_i}) (⊗_i Z_{p_j}^{t_i}), which equals the tensor
 * product of one prime-dimensional Weyl operator per position ("slot").
 *
 * A family {U_i} is twist commutative when U_i U_jᵀ = w(i,j) U_jᵀ U_i with
 * unimodular w(i,j) for every ordered pair, including i = j (with a
 * transpose on one side the diagonal relation is not automatic, and for
 * X^m Z^n it holds with w = ω^{-2mn}, which is 1 only in special cases).
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twistdisc/types.hpp"

namespace twistdisc {

// exp(2πi k / d), k reduced mod d.
cd root_of_unity(std::uint64_t d, std::int64_t k);

bool is_prime(std::uint64_t n);

struct PrimePower {
  std::uint64_t p = 0;
  unsigned r = 0;
  std::uint64_t value = 0;  // p^r
};

// Trial-division factorization, sorted by ascending prime power value.
// Throws for d < 2.
std::vector<PrimePower> factorize(std::uint64_t d);

UnitaryMatrix build_shift(std::size_t d);
UnitaryMatrix build_clock(std::size_t d);

struct GbsLabel {
  std::size_t d = 0;
  std::size_t m = 0, n = 0;  // X^m Z^n, exponents mod d
};

// X^m Z^n assembled directly: entry (j+m mod d, j) = ω^{n j}.
UnitaryMatrix gbs_unitary(const GbsLabel& label);

struct LatticeLabel {
  std::uint64_t d = 0;
  std::vector<PrimePower> factors;           // ascending p^r; must multiply to d
  std::vector<std::vector<unsigned>> s;      // per factor: r shift exponents mod p
  std::vector<std::vector<unsigned>> t;      // per factor: r clock exponents mod p
};

UnitaryMatrix lattice_unitary(const LatticeLabel& label);

// One prime-dimensional tensor slot of a family element.  For generalized
// Bell labels at composite d the whole element is a single slot with
// prime = false.
struct SlotLabel {
  std::uint64_t q = 0;   // slot dimension
  unsigned a = 0, b = 0; // X^a Z^b exponents mod q
  bool prime = false;
};

std::vector<SlotLabel> slots_of_gbs(const GbsLabel& label);
std::vector<SlotLabel> slots_of_lattice(const LatticeLabel& label);

// Canonical enumeration.  Generalized Bell: index = m*d + n.  Lattice:
// factor-major, then mixed-radix over the digits (s_1..s_r, t_1..t_r) with
// s_1 slowest; for a prime d the two enumerations agree.
GbsLabel gbs_label_from_index(std::size_t d, std::size_t index);
std::size_t gbs_index_of(const GbsLabel& label);
LatticeLabel lattice_label_from_index(std::uint64_t d, std::size_t index);
std::size_t lattice_index_of(const LatticeLabel& label);

// Label grammar used by the CLI and reports.
//   gbs:      "(m,n)"                e.g. "(1,2)"
//   lattice:  "p^r:[s,...]/[t,...]" per factor, factors joined by '*',
//             e.g. "2^2:[1,0]/[0,1]*3^1:[2]/[1]"
// Lists of labels are joined by ';'.
std::string format_gbs_label(const GbsLabel& label);
std::string format_lattice_label(const LatticeLabel& label);
GbsLabel parse_gbs_label(const std::string& text, std::size_t d);
LatticeLabel parse_lattice_label(const std::string& text, std::uint64_t d);
std::vector<std::string> split_label_list(const std::string& text);

struct TwistPhaseTable {
  std::size_t size = 0;
  std::vector<cd> phases;  // row-major size x size; valid entries only where pair_ok
  std::vector<char> pair_ok;
  bool orthogonal = false;
  bool is_twist = false;
  std::string note;  // first failure, empty when is_twist

  cd phase(std::size_t i, std::size_t j) const { return phases[i * size + j]; }
};

// Tests every ordered pair (i, j) for U_i U_jᵀ = w U_jᵀ U_i with |w| = 1 and
// records the scalar.  A non-orthogonal input is reported via the flags (the
// table is still computed), never silently accepted as twist.
TwistPhaseTable twist_table(const std::vector<UnitaryMatrix>& basis,
                            double pair_tolerance = tol::ortho);

// All tensor products of the factor bases, lexicographic in factor indices
// (first factor slowest).
std::vector<UnitaryMatrix> tensor_basis(const std::vector<std::vector<UnitaryMatrix>>& factors);

}  // namespace twistdisc
