// Discrete Weyl operator families, labels, factorization, and the
// twist-commutativity analysis.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "twistdisc/linalg.hpp"
#include "twistdisc/operators.hpp"
#include "twistdisc/rng.hpp"

using namespace twistdisc;

TEST_CASE("roots of unity and primality") {
  CHECK(std::abs(root_of_unity(4, 1) - cd{0, 1}) < 1e-15);
  CHECK(std::abs(root_of_unity(4, -1) - cd{0, -1}) < 1e-15);
  CHECK(std::abs(root_of_unity(2, 1) - cd{-1, 0}) < 1e-15);
  CHECK(std::abs(root_of_unity(3, 3) - cd{1, 0}) < 1e-15);
  CHECK(std::abs(root_of_unity(6, -7) - root_of_unity(6, 5)) < 1e-15);

  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK(is_prime(7));
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(4));
  CHECK_FALSE(is_prime(91));  // 7 * 13
}

TEST_CASE("factorize sorts prime powers by ascending value") {
  const auto f12 = factorize(12);
  REQUIRE(f12.size() == 2);
  CHECK(f12[0].p == 3);
  CHECK(f12[0].r == 1);
  CHECK(f12[0].value == 3);
  CHECK(f12[1].p == 2);
  CHECK(f12[1].r == 2);
  CHECK(f12[1].value == 4);

  const auto f60 = factorize(60);
  REQUIRE(f60.size() == 3);
  CHECK(f60[0].value == 3);
  CHECK(f60[1].value == 4);
  CHECK(f60[2].value == 5);

  const auto f14 = factorize(14);
  REQUIRE(f14.size() == 2);
  CHECK(f14[0].value == 2);
  CHECK(f14[1].value == 7);

  CHECK_THROWS_AS(factorize(1), std::invalid_argument);
  CHECK_THROWS_AS(factorize(0), std::invalid_argument);
}

TEST_CASE("shift and clock generators") {
  const UnitaryMatrix x5 = build_shift(5);
  ComplexMatrix acc = ComplexMatrix::identity(5);
  for (int k = 0; k < 5; ++k) acc = mul(x5.matrix, acc);
  CHECK(max_abs_diff(acc, ComplexMatrix::identity(5)) < 1e-14);

  CHECK(std::abs(trace(build_clock(7).matrix)) < 1e-13);
  CHECK(unitarity_error(build_shift(6).matrix) < 1e-15);
  CHECK(unitarity_error(build_clock(6).matrix) < 1e-15);

  // X|j> = |j+1 mod d>.
  const ComplexMatrix& x = x5.matrix;
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(std::abs(x((j + 1) % 5, j) - cd{1, 0}) < 1e-15);

  // Qubit generators are the Pauli matrices.
  const ComplexMatrix x2 = build_shift(2).matrix;
  CHECK(std::abs(x2(0, 1) - cd{1, 0}) < 1e-15);
  CHECK(std::abs(x2(1, 0) - cd{1, 0}) < 1e-15);
  CHECK(std::abs(x2(0, 0)) + std::abs(x2(1, 1)) < 1e-15);
  const ComplexMatrix z2 = build_clock(2).matrix;
  CHECK(std::abs(z2(0, 0) - cd{1, 0}) < 1e-15);
  CHECK(std::abs(z2(1, 1) - cd{-1, 0}) < 1e-15);

  // Clock diagonal at d = 4 walks the fourth roots of unity.
  const ComplexMatrix z4 = build_clock(4).matrix;
  const cd want4[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(std::abs(z4(j, j) - want4[j]) < 1e-15);

  CHECK_THROWS_AS(build_shift(1), std::invalid_argument);
  CHECK_THROWS_AS(build_clock(0), std::invalid_argument);
}

TEST_CASE("generalized Bell unitaries: qubit X Z product and d = 3 Gram") {
  const UnitaryMatrix xz = gbs_unitary(GbsLabel{2, 1, 1});
  CHECK(std::abs(xz.matrix(0, 0)) < 1e-15);
  CHECK(std::abs(xz.matrix(0, 1) - cd{-1, 0}) < 1e-15);
  CHECK(std::abs(xz.matrix(1, 0) - cd{1, 0}) < 1e-15);
  CHECK(std::abs(xz.matrix(1, 1)) < 1e-15);

  // X^m Z^n assembled entrywise equals the product of generator powers.
  for (std::size_t d : {2u, 3u, 5u}) {
    const ComplexMatrix x = build_shift(d).matrix;
    const ComplexMatrix z = build_clock(d).matrix;
    for (std::size_t m = 0; m < d; ++m) {
      for (std::size_t n = 0; n < d; ++n) {
        ComplexMatrix want = ComplexMatrix::identity(d);
        for (std::size_t k = 0; k < n; ++k) want = mul(z, want);
        for (std::size_t k = 0; k < m; ++k) want = mul(x, want);
        CHECK(max_abs_diff(gbs_unitary(GbsLabel{d, m, n}).matrix, want) < 1e-13);
      }
    }
  }

  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      const cd g = hs_inner(gbs_unitary(gbs_label_from_index(3, i)).matrix,
                            gbs_unitary(gbs_label_from_index(3, j)).matrix);
      CHECK(std::abs(g - (i == j ? cd{1, 0} : cd{0, 0})) < 1e-14);
    }
  }
}

TEST_CASE("label indexing round-trips") {
  for (std::size_t i = 0; i < 25; ++i) {
    const GbsLabel g = gbs_label_from_index(5, i);
    CHECK(gbs_index_of(g) == i);
  }
  CHECK_THROWS_AS(gbs_label_from_index(3, 9), std::invalid_argument);

  for (std::uint64_t d : {6ull, 12ull}) {
    for (std::size_t i = 0; i < d * d; ++i) {
      const LatticeLabel l = lattice_label_from_index(d, i);
      CHECK(lattice_index_of(l) == i);
    }
  }
}

TEST_CASE("d = 6 lattice enumeration: qubit factor is most significant") {
  // Factors of 6 sort as [2, 3]; the first factor's digits are slowest, so
  // index 18 = (s=1, t=0 | s=0, t=0) is X_2 tensor I_3.
  const UnitaryMatrix u18 = lattice_unitary(lattice_label_from_index(6, 18));
  CHECK(max_abs_diff(u18.matrix,
                     tensor(build_shift(2).matrix, ComplexMatrix::identity(3))) < 1e-14);

  // Index 1 = (0,0 | s=0, t=1) is I_2 tensor Z_3.
  const UnitaryMatrix u1 = lattice_unitary(lattice_label_from_index(6, 1));
  CHECK(max_abs_diff(u1.matrix,
                     tensor(ComplexMatrix::identity(2), build_clock(3).matrix)) < 1e-14);

  // All 36 elements are unitary and pairwise hs-orthogonal.
  std::vector<UnitaryMatrix> basis;
  for (std::size_t i = 0; i < 36; ++i)
    basis.push_back(lattice_unitary(lattice_label_from_index(6, i)));
  for (const auto& u : basis) CHECK(unitarity_error(u.matrix) < 1e-13);
  for (std::size_t i = 0; i < 36; ++i)
    for (std::size_t j = i + 1; j < 36; ++j)
      CHECK(std::abs(hs_inner(basis[i].matrix, basis[j].matrix)) < 1e-12);
}

TEST_CASE("prime-power factor with multiplicity expands the inner tensor") {
  // d = 4 = 2^2 is a single factor with two inner slots; exponents (1,1)
  // with no clock part give X_2 tensor X_2.
  LatticeLabel l;
  l.d = 4;
  l.factors = factorize(4);
  l.s = {{1, 1}};
  l.t = {{0, 0}};
  const ComplexMatrix x2 = build_shift(2).matrix;
  CHECK(max_abs_diff(lattice_unitary(l).matrix, tensor(x2, x2)) < 1e-14);
}

TEST_CASE("at prime dimension the lattice family degenerates to the Bell family") {
  for (std::size_t i = 0; i < 25; ++i) {
    const LatticeLabel l = lattice_label_from_index(5, i);
    const GbsLabel g = gbs_label_from_index(5, i);
    CHECK(max_abs_diff(lattice_unitary(l).matrix, gbs_unitary(g).matrix) < 1e-14);
  }
}

TEST_CASE("slot decomposition shapes") {
  const auto gbs_slots = slots_of_gbs(GbsLabel{6, 1, 2});
  REQUIRE(gbs_slots.size() == 1);
  CHECK(gbs_slots[0].q == 6);
  CHECK_FALSE(gbs_slots[0].prime);

  const auto prime_slots = slots_of_gbs(GbsLabel{5, 2, 3});
  REQUIRE(prime_slots.size() == 1);
  CHECK(prime_slots[0].prime);

  const auto lat12 = slots_of_lattice(lattice_label_from_index(12, 143));
  REQUIRE(lat12.size() == 3);  // 3^1 then 2^2 as two qubit slots
  CHECK(lat12[0].q == 3);
  CHECK(lat12[1].q == 2);
  CHECK(lat12[2].q == 2);
  for (const auto& s : lat12) CHECK(s.prime);
}

TEST_CASE("label grammar round-trips and rejects malformed text") {
  const GbsLabel g{7, 3, 5};
  CHECK(format_gbs_label(g) == "(3,5)");
  const GbsLabel back = parse_gbs_label("(3,5)", 7);
  CHECK(back.m == 3);
  CHECK(back.n == 5);

  for (std::size_t i : {0u, 1u, 17u, 35u}) {
    const LatticeLabel l = lattice_label_from_index(6, i);
    const LatticeLabel round = parse_lattice_label(format_lattice_label(l), 6);
    CHECK(lattice_index_of(round) == i);
  }

  const auto parts = split_label_list("(0,0);(1,2) ; (2,1)");
  REQUIRE(parts.size() == 3);
  CHECK(parts[1] == "(1,2)");

  CHECK_THROWS(parse_gbs_label("3,5", 7));
  CHECK_THROWS(parse_gbs_label("(9,0)", 3));
  CHECK_THROWS(parse_lattice_label("2^1:[1]/[0]", 6));  // missing the 3^1 factor
}

TEST_CASE("twist table on generalized Bell bases matches the closed-form phase") {
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    std::vector<UnitaryMatrix> basis;
    std::vector<GbsLabel> labels;
    for (std::size_t i = 0; i < d * d; ++i) {
      labels.push_back(gbs_label_from_index(d, i));
      basis.push_back(gbs_unitary(labels.back()));
    }
    const TwistPhaseTable table = twist_table(basis);
    CHECK(table.orthogonal);
    CHECK(table.is_twist);
    CHECK(table.note.empty());
    for (std::size_t i = 0; i < d * d; ++i) {
      for (std::size_t j = 0; j < d * d; ++j) {
        const auto& a = labels[i];
        const auto& b = labels[j];
        const cd want = root_of_unity(
            d, -static_cast<std::int64_t>(a.m * b.n + b.m * a.n));
        CHECK(std::abs(table.phase(i, j) - want) < 1e-12);
      }
    }
    // Diagonal scalar is ω^(-2mn): not 1 in general once d >= 3.
    const GbsLabel diag{d, 1, 1};
    const std::size_t k = gbs_index_of(diag);
    CHECK(std::abs(table.phase(k, k) - root_of_unity(d, -2)) < 1e-12);
  }
}

TEST_CASE("twist scalar relation holds entrywise: U_i U_j^T = w U_j^T U_i") {
  std::mt19937_64 rng(31);
  for (std::uint64_t d : {6ull, 12ull}) {
    std::vector<UnitaryMatrix> basis;
    for (std::size_t i = 0; i < d * d; ++i)
      basis.push_back(lattice_unitary(lattice_label_from_index(d, i)));
    const TwistPhaseTable table = twist_table(basis);
    CHECK(table.is_twist);
    for (int t = 0; t < 40; ++t) {
      const std::size_t i = rng() % (d * d);
      const std::size_t j = rng() % (d * d);
      const cd w = table.phase(i, j);
      CHECK(std::abs(std::abs(w) - 1.0) < 1e-12);
      const ComplexMatrix lhs = mul(basis[i].matrix, transpose_of(basis[j].matrix));
      ComplexMatrix rhs = mul(transpose_of(basis[j].matrix), basis[i].matrix);
      for (auto& e : rhs.entries) e *= w;
      CHECK(max_abs_diff(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("twist table flags a non-orthogonal family instead of accepting it") {
  // H Z is unitary but not trace-orthogonal to the identity.
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h(0, 0) = s;
  h(0, 1) = s;
  h(1, 0) = s;
  h(1, 1) = -s;
  const std::vector<UnitaryMatrix> family{
      make_verified_unitary(ComplexMatrix::identity(2)), build_shift(2), build_clock(2),
      make_verified_unitary(mul(h, build_clock(2).matrix))};
  const TwistPhaseTable table = twist_table(family);
  CHECK_FALSE(table.orthogonal);
  CHECK_FALSE(table.is_twist);
  CHECK_FALSE(table.note.empty());
}

TEST_CASE("twist table rejects an orthogonal family that is not twist commutative") {
  // Rotating a twist basis by a generic real rotation keeps orthogonality but
  // breaks the transpose commutation relation.
  const double th = 0.4;
  ComplexMatrix v(2, 2);
  v(0, 0) = std::cos(th);
  v(0, 1) = -std::sin(th);
  v(1, 0) = std::sin(th);
  v(1, 1) = std::cos(th);
  std::vector<UnitaryMatrix> family;
  for (std::size_t i = 0; i < 4; ++i)
    family.push_back(
        make_verified_unitary(mul(v, gbs_unitary(gbs_label_from_index(2, i)).matrix)));
  const TwistPhaseTable table = twist_table(family);
  CHECK(table.orthogonal);
  CHECK_FALSE(table.is_twist);
  CHECK_FALSE(table.note.empty());
}

TEST_CASE("tensor_basis enumerates products lexicographically") {
  std::vector<UnitaryMatrix> qubit;
  for (std::size_t i = 0; i < 4; ++i)
    qubit.push_back(gbs_unitary(gbs_label_from_index(2, i)));
  const auto prod = tensor_basis({qubit, qubit});
  REQUIRE(prod.size() == 16);
  CHECK(prod[0].dim() == 4);
  // First factor slowest: element 1*4+2 is U_1 tensor U_2.
  CHECK(max_abs_diff(prod[6].matrix, tensor(qubit[1].matrix, qubit[2].matrix)) < 1e-14);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = i + 1; j < 16; ++j)
      CHECK(std::abs(hs_inner(prod[i].matrix, prod[j].matrix)) < 1e-13);

  // A single factor passes through unchanged.
  const auto same = tensor_basis({qubit});
  REQUIRE(same.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(max_abs_diff(same[i].matrix, qubit[i].matrix) == 0.0);

  CHECK_THROWS_AS(tensor_basis({}), std::invalid_argument);
}

TEST_CASE("tensor products of twist-commutative factors stay twist commutative") {
  std::vector<UnitaryMatrix> qubit, qutrit;
  for (std::size_t i = 0; i < 4; ++i)
    qubit.push_back(gbs_unitary(gbs_label_from_index(2, i)));
  for (std::size_t i = 0; i < 9; ++i)
    qutrit.push_back(gbs_unitary(gbs_label_from_index(3, i)));
  const auto prod = tensor_basis({qubit, qutrit});
  REQUIRE(prod.size() == 36);
  const TwistPhaseTable table = twist_table(prod);
  CHECK(table.orthogonal);
  CHECK(table.is_twist);
}
