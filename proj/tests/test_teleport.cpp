// Maximally entangled bases and the exact teleportation branch expansion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "twistdisc/linalg.hpp"
#include "twistdisc/operators.hpp"
#include "twistdisc/rng.hpp"
#include "twistdisc/teleport.hpp"

using namespace twistdisc;

namespace {

PureState basis_vector(std::size_t d, std::size_t k) {
  std::vector<cd> amps(d);
  amps[k] = 1.0;
  return make_pure_state(std::move(amps));
}

// Expected branch state up to a global phase: resource^T outcome^dagger psi.
PureState lemma_branch(const UnitaryMatrix& resource, const UnitaryMatrix& outcome,
                       const PureState& psi) {
  const ComplexMatrix op = mul(transpose_of(resource.matrix), adjoint(outcome.matrix));
  std::vector<cd> amps(psi.dim());
  for (std::size_t r = 0; r < psi.dim(); ++r) {
    cd acc{0, 0};
    for (std::size_t c = 0; c < psi.dim(); ++c) acc += op(r, c) * psi.amplitudes[c];
    amps[r] = acc;
  }
  return normalized_state(std::move(amps));
}

double phase_free_distance(const PureState& a, const PureState& b) {
  return std::abs(1.0 - std::abs(state_inner(a, b)));
}

}  // namespace

TEST_CASE("entangled-state amplitudes follow amp[a*d+b] = U(a,b)/sqrt(d)") {
  const double s = 1.0 / std::sqrt(2.0);

  const PureState bell = mes_state(make_verified_unitary(ComplexMatrix::identity(2)));
  CHECK(std::abs(bell.amplitudes[0] - cd{s, 0}) < 1e-15);
  CHECK(std::abs(bell.amplitudes[1]) < 1e-15);
  CHECK(std::abs(bell.amplitudes[2]) < 1e-15);
  CHECK(std::abs(bell.amplitudes[3] - cd{s, 0}) < 1e-15);

  const PureState xstate = mes_state(build_shift(2));
  CHECK(std::abs(xstate.amplitudes[0]) < 1e-15);
  CHECK(std::abs(xstate.amplitudes[1] - cd{s, 0}) < 1e-15);
  CHECK(std::abs(xstate.amplitudes[2] - cd{s, 0}) < 1e-15);
  CHECK(std::abs(xstate.amplitudes[3]) < 1e-15);

  // Non-unitary input (unverified) is rejected.
  ComplexMatrix bad(2, 2);
  bad(0, 0) = 2.0;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS(mes_state(UnitaryMatrix{bad, false}), std::invalid_argument);
}

TEST_CASE("generated bases are orthonormal and carry twist metadata") {
  const MesBasis gbs = make_gbs_basis(3);
  CHECK(gbs.dim == 3);
  CHECK(gbs.family == "gbs");
  REQUIRE(gbs.unitaries.size() == 9);
  REQUIRE(gbs.labels.size() == 9);
  CHECK(gbs.labels[0] == "(0,0)");
  CHECK(gbs.labels[5] == "(1,2)");
  REQUIRE(gbs.twist.has_value());
  CHECK(gbs.twist->is_twist);

  const MesBasis lat = make_lattice_basis(6);
  CHECK(lat.family == "lattice");
  REQUIRE(lat.unitaries.size() == 36);
  REQUIRE(lat.slot_labels.size() == 36);
  CHECK(lat.slot_labels[0].size() == 2);
  REQUIRE(lat.twist.has_value());
  CHECK(lat.twist->is_twist);

  const MesBasis quick = make_lattice_basis(6, /*with_twist=*/false);
  CHECK_FALSE(quick.twist.has_value());
}

TEST_CASE("qubit teleportation of |0> over the Bell resource") {
  const MesBasis basis = make_gbs_basis(2);
  const BranchTable table = expand_teleport(basis_vector(2, 0), basis, 0);

  REQUIRE(table.branches.size() == 4);
  for (const auto& br : table.branches)
    CHECK(br.probability == doctest::Approx(0.25).epsilon(1e-12));

  // Labels in index order: (0,0)=I, (0,1)=Z, (1,0)=X, (1,1)=XZ.
  // Bob holds U_i^dagger |0>, i.e. |0>, |0>, |1>, |1> up to phase.
  const std::array<std::size_t, 4> expected{0, 0, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    const PureState want = basis_vector(2, expected[i]);
    CHECK(phase_free_distance(table.branches[i].bob_state, want) < 1e-12);
  }
}

TEST_CASE("shift resource, clock outcome flips the teleported qubit") {
  const MesBasis basis = make_gbs_basis(2);
  // Index order m*d+n: resource (1,0) = X at index 2, outcome (0,1) = Z at 1.
  const BranchTable table = expand_teleport(basis_vector(2, 0), basis, 2);
  // Bob holds X^T Z^dagger |0> = X|0> = |1> up to phase.
  CHECK(phase_free_distance(table.branches[1].bob_state, basis_vector(2, 1)) < 1e-12);
}

TEST_CASE("every branch has probability 1/d^2 and the closed-form Bob state") {
  std::mt19937_64 rng(101);
  for (std::size_t d = 2; d <= 6; ++d) {
    const MesBasis basis = make_gbs_basis(d, /*with_twist=*/false);
    for (int trial = 0; trial < 3; ++trial) {
      const PureState psi = random_unit_state(d, rng);
      const std::size_t r = rng() % (d * d);
      const BranchTable table = expand_teleport(psi, basis, r);
      REQUIRE(table.branches.size() == d * d);
      const double want_p = 1.0 / static_cast<double>(d * d);
      for (std::size_t i = 0; i < d * d; ++i) {
        CHECK(table.branches[i].probability == doctest::Approx(want_p).epsilon(1e-10));
        const PureState want = lemma_branch(basis.unitaries[r], basis.unitaries[i], psi);
        CHECK(phase_free_distance(table.branches[i].bob_state, want) < 1e-10);
      }
    }
  }
}

TEST_CASE("the branch law needs no twist structure: a rotated basis behaves the same") {
  // Left-multiplying every basis element by a fixed generic unitary preserves
  // orthonormality of the entangled states but destroys twist commutativity.
  const double th = 0.7;
  ComplexMatrix v(2, 2);
  v(0, 0) = std::cos(th);
  v(0, 1) = -std::sin(th);
  v(1, 0) = std::sin(th);
  v(1, 1) = std::cos(th);

  MesBasis rotated;
  rotated.dim = 2;
  rotated.family = "generic";
  for (std::size_t i = 0; i < 4; ++i) {
    rotated.unitaries.push_back(
        make_verified_unitary(mul(v, gbs_unitary(gbs_label_from_index(2, i)).matrix)));
    rotated.labels.push_back("rot" + std::to_string(i));
  }
  CHECK_FALSE(twist_table(rotated.unitaries).is_twist);

  std::mt19937_64 rng(909);
  const PureState psi = random_unit_state(2, rng);
  const BranchTable table = expand_teleport(psi, rotated, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(table.branches[i].probability == doctest::Approx(0.25).epsilon(1e-10));
    const PureState want = lemma_branch(rotated.unitaries[2], rotated.unitaries[i], psi);
    CHECK(phase_free_distance(table.branches[i].bob_state, want) < 1e-10);
  }
}

TEST_CASE("branch coefficients reassemble the tripartite product state") {
  const std::size_t d = 3;
  const MesBasis basis = make_gbs_basis(d, false);
  std::mt19937_64 rng(55);
  const PureState psi = random_unit_state(d, rng);
  const std::size_t r = 7;
  const BranchTable table = expand_teleport(psi, basis, r);

  // Sum over outcomes of sqrt(p_i) (phase included in bob_state is arbitrary,
  // so reassemble from the closed form instead): (1/d) Psi_i (x) (U_r^T U_i^dag psi)
  // must equal psi (x) Psi_r with C slowest, then A, then B.
  std::vector<cd> recon(d * d * d);
  for (std::size_t i = 0; i < d * d; ++i) {
    const PureState mes_i = mes_state(basis.unitaries[i]);
    const ComplexMatrix op =
        mul(transpose_of(basis.unitaries[r].matrix), adjoint(basis.unitaries[i].matrix));
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          cd bob{0, 0};
          for (std::size_t k = 0; k < d; ++k) bob += op(b, k) * psi.amplitudes[k];
          recon[(c * d + a) * d + b] +=
              (1.0 / static_cast<double>(d)) * mes_i.amplitudes[c * d + a] * bob;
        }
      }
    }
  }
  const PureState mes_r = mes_state(basis.unitaries[r]);
  double dist2 = 0.0;
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        const cd want = psi.amplitudes[c] * mes_r.amplitudes[a * d + b];
        dist2 += std::norm(recon[(c * d + a) * d + b] - want);
      }
  CHECK(std::sqrt(dist2) < 1e-12);

  (void)table;  // the library runs its own reassembly self-check inside expand_teleport
}

TEST_CASE("projection coefficients match the closed form entrywise") {
  // The coefficient of the tripartite product state on |Phi_i>_CA |j>_B is
  // (1/d) sum_k psi_k <k| conj(U_i) U_r |j>.
  const std::size_t d = 3;
  const MesBasis basis = make_gbs_basis(d, false);
  std::mt19937_64 rng(77);
  const PureState psi = random_unit_state(d, rng);
  const std::size_t r = 4;

  const PureState mes_r = mes_state(basis.unitaries[r]);
  std::vector<cd> tri(d * d * d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        tri[(c * d + a) * d + b] = psi.amplitudes[c] * mes_r.amplitudes[a * d + b];

  for (std::size_t i = 0; i < d * d; ++i) {
    const PureState mes_i = mes_state(basis.unitaries[i]);
    const ComplexMatrix m =
        mul(conj_of(basis.unitaries[i].matrix), basis.unitaries[r].matrix);
    for (std::size_t j = 0; j < d; ++j) {
      cd projected{0, 0};
      for (std::size_t ca = 0; ca < d * d; ++ca)
        projected += std::conj(mes_i.amplitudes[ca]) * tri[ca * d + j];
      cd formula{0, 0};
      for (std::size_t k = 0; k < d; ++k)
        formula += psi.amplitudes[k] * m(k, j);
      formula /= static_cast<double>(d);
      CHECK(std::abs(projected - formula) < 1e-12);
    }
  }
}

TEST_CASE("a point-mass branch table always yields its only branch") {
  const MesBasis basis = make_gbs_basis(2);
  BranchTable table = expand_teleport(basis_vector(2, 0), basis, 0);
  for (std::size_t i = 0; i < table.branches.size(); ++i)
    table.branches[i].probability = (i == 3) ? 1.0 : 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    CHECK(sample_measurement(table, seed) == 3);
}

TEST_CASE("measurement sampling is seeded and uniform") {
  const MesBasis basis = make_gbs_basis(2);
  const BranchTable table = expand_teleport(basis_vector(2, 0), basis, 1);

  CHECK(sample_measurement(table, 42) == sample_measurement(table, 42));

  std::array<std::size_t, 4> counts{};
  const std::size_t n = 10000;
  for (std::size_t s = 0; s < n; ++s) ++counts[sample_measurement(table, s)];
  double chi2 = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double expect = n / 4.0;
    chi2 += (counts[k] - expect) * (counts[k] - expect) / expect;
  }
  // df = 3 at significance 0.001.
  CHECK(chi2 < 16.266);
}

TEST_CASE("teleport expansion rejects malformed inputs") {
  const MesBasis basis = make_gbs_basis(2);
  CHECK_THROWS_AS(expand_teleport(basis_vector(3, 0), basis, 0), std::invalid_argument);
  CHECK_THROWS_AS(expand_teleport(basis_vector(2, 0), basis, 4), std::invalid_argument);

  MesBasis truncated = basis;
  truncated.unitaries.pop_back();
  CHECK_THROWS_AS(expand_teleport(basis_vector(2, 0), truncated, 0), std::invalid_argument);
}
