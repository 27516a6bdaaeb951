#include "twistdisc/teleport.hpp"

#include <cmath>
#include <stdexcept>

#include "twistdisc/kernels.hpp"
#include "twistdisc/linalg.hpp"
#include "twistdisc/rng.hpp"

namespace twistdisc {

PureState mes_state(const UnitaryMatrix& u) {
  if (!u.verified) {
    const double err = unitarity_error(u.matrix);
    if (err > tol::unitary)
      throw std::invalid_argument("mes_state: input is not unitary (error " +
                                  std::to_string(err) + ")");
  }
  const std::size_t d = u.dim();
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<cd> amps(d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) amps[a * d + b] = u.matrix(a, b) * inv;
  return make_pure_state(std::move(amps), 1e-10);
}

MesBasis make_gbs_basis(std::size_t d, bool with_twist) {
  if (d < 2) throw std::invalid_argument("make_gbs_basis: d must be at least 2");
  MesBasis basis;
  basis.dim = d;
  basis.family = "gbs";
  basis.unitaries.reserve(d * d);
  for (std::size_t i = 0; i < d * d; ++i) {
    const GbsLabel label = gbs_label_from_index(d, i);
    basis.unitaries.push_back(gbs_unitary(label));
    basis.labels.push_back(format_gbs_label(label));
    basis.slot_labels.push_back(slots_of_gbs(label));
  }
  if (with_twist) basis.twist = twist_table(basis.unitaries);
  return basis;
}

MesBasis make_lattice_basis(std::uint64_t d, bool with_twist) {
  MesBasis basis;
  basis.dim = static_cast<std::size_t>(d);
  basis.family = "lattice";
  const std::size_t count = basis.dim * basis.dim;
  basis.unitaries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const LatticeLabel label = lattice_label_from_index(d, i);
    basis.unitaries.push_back(lattice_unitary(label));
    basis.labels.push_back(format_lattice_label(label));
    basis.slot_labels.push_back(slots_of_lattice(label));
  }
  if (with_twist) basis.twist = twist_table(basis.unitaries);
  return basis;
}

BranchTable expand_teleport(const PureState& psi, const MesBasis& basis,
                            std::size_t resource_index) {
  const std::size_t d = basis.dim;
  if (psi.dim() != d) throw std::invalid_argument("expand_teleport: state dimension mismatch");
  if (resource_index >= basis.unitaries.size())
    throw std::invalid_argument("expand_teleport: resource index out of range");
  if (basis.unitaries.size() != d * d)
    throw std::invalid_argument("expand_teleport: basis must have d^2 elements");
  if (std::abs(state_norm(psi) - 1.0) > 1e-10)
    throw std::invalid_argument("expand_teleport: input state is not normalized");

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const ComplexMatrix& ur = basis.unitaries[resource_index].matrix;

  // T[c,a,b] = psi_c * Ur(a,b)/√d, C slowest.
  std::vector<cd> tri(d * d * d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        tri[(c * d + a) * d + b] = psi.amplitudes[c] * ur(a, b) * inv_sqrt_d;

  BranchTable table;
  table.dim = d;
  table.resource_index = resource_index;
  table.branches.resize(d * d);

  std::vector<cd> reassembled(d * d * d, cd{0.0, 0.0});
  for (std::size_t i = 0; i < d * d; ++i) {
    const ComplexMatrix& ui = basis.unitaries[i].matrix;
    // coefficient onto |Ψ_i>|j>: sum_{c,a} conj(Ui(c,a)/√d) T[c,a,j]
    std::vector<cd> coef(d, cd{0.0, 0.0});
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t a = 0; a < d; ++a) {
        const cd w = std::conj(ui(c, a)) * inv_sqrt_d;
        const cd* slab = tri.data() + (c * d + a) * d;
        for (std::size_t j = 0; j < d; ++j) coef[j] += w * slab[j];
      }
    const double p = kernels::nrm2sq(d, coef.data());
    Branch& branch = table.branches[i];
    branch.outcome = i;
    branch.probability = p;
    if (p < 1e-30) throw std::runtime_error("expand_teleport: degenerate branch probability");
    const double inv_norm = 1.0 / std::sqrt(p);
    branch.bob_state.amplitudes.resize(d);
    for (std::size_t j = 0; j < d; ++j) branch.bob_state.amplitudes[j] = coef[j] * inv_norm;

    // accumulate coef_i ⊗ |Ψ_i>|j> back into the tripartite vector
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t a = 0; a < d; ++a) {
        const cd w = ui(c, a) * inv_sqrt_d;
        cd* slab = reassembled.data() + (c * d + a) * d;
        for (std::size_t j = 0; j < d; ++j) slab[j] += w * coef[j];
      }
  }

  double recon = 0.0;
  for (std::size_t k = 0; k < tri.size(); ++k)
    recon = std::max(recon, std::abs(reassembled[k] - tri[k]));
  if (recon > 1e-10)
    throw std::runtime_error("expand_teleport: branch reassembly error " + std::to_string(recon));
  return table;
}

std::size_t sample_measurement(const BranchTable& table, std::uint64_t seed) {
  if (table.branches.empty()) throw std::invalid_argument("sample_measurement: empty table");
  std::mt19937_64 rng(seed);
  const double u = uniform01(rng);
  double acc = 0.0;
  for (const Branch& b : table.branches) {
    acc += b.probability;
    if (u < acc) return b.outcome;
  }
  return table.branches.back().outcome;
}

}  // namespace twistdisc
