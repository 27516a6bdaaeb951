#include "twistdisc/discrimination.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "twistdisc/json_io.hpp"
#include "twistdisc/kernels.hpp"
#include "twistdisc/linalg.hpp"
#include "twistdisc/rng.hpp"

namespace twistdisc {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "YES";
    case Verdict::no: return "NO";
    case Verdict::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

const char* to_string(ProofTag t) {
  switch (t) {
    case ProofTag::prop1_tensor: return "prop1_tensor";
    case ProofTag::prop2_product: return "prop2_product";
    case ProofTag::appendixA_claim2: return "appendixA_claim2";
    case ProofTag::bloch_qubit: return "bloch_qubit";
    case ProofTag::numeric: return "numeric";
    case ProofTag::exhaustive_small: return "exhaustive_small";
  }
  return "numeric";
}

// ---------------------------------------------------------------------------
// Instance construction and validation
// ---------------------------------------------------------------------------

void validate_instance(const DiscriminationInstance& inst) {
  const std::size_t l = inst.size();
  const std::size_t d = inst.dim;
  if (d < 2) throw std::invalid_argument("instance: dimension must be at least 2");
  if (l < 2) throw std::invalid_argument("instance: need at least two states");
  if (l > d * d) throw std::invalid_argument("instance: more states than basis elements");
  for (const auto& u : inst.unitaries) {
    if (u.dim() != d) throw std::invalid_argument("instance: mixed dimensions");
  }
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      const cd g = hs_inner(inst.unitaries[i].matrix, inst.unitaries[j].matrix);
      if (std::abs(g) > 1e-10) {
        std::ostringstream os;
        os << "instance: states " << i << " and " << j << " are not orthogonal (|<.,.>| = "
           << std::abs(g) << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
  if (!inst.labels.empty() && inst.labels.size() != l)
    throw std::invalid_argument("instance: label count mismatch");
  if (!inst.slot_labels.empty() && inst.slot_labels.size() != l)
    throw std::invalid_argument("instance: slot label count mismatch");
}

DiscriminationInstance make_instance(std::vector<UnitaryMatrix> unitaries,
                                     std::vector<std::string> labels, std::string family,
                                     std::vector<std::vector<SlotLabel>> slot_labels) {
  DiscriminationInstance inst;
  if (unitaries.empty()) throw std::invalid_argument("instance: empty state set");
  inst.dim = unitaries.front().dim();
  inst.unitaries = std::move(unitaries);
  inst.labels = std::move(labels);
  inst.family = std::move(family);
  inst.slot_labels = std::move(slot_labels);
  validate_instance(inst);
  return inst;
}

DiscriminationInstance instance_from_basis(const MesBasis& basis,
                                           const std::vector<std::size_t>& indices) {
  if (indices.size() < 2) throw std::invalid_argument("instance: need at least two indices");
  std::set<std::size_t> seen;
  DiscriminationInstance inst;
  inst.dim = basis.dim;
  inst.family = basis.family;
  for (std::size_t idx : indices) {
    if (idx >= basis.unitaries.size())
      throw std::invalid_argument("instance: basis index out of range");
    if (!seen.insert(idx).second)
      throw std::invalid_argument("instance: repeated basis index");
    inst.unitaries.push_back(basis.unitaries[idx]);
    if (idx < basis.labels.size()) inst.labels.push_back(basis.labels[idx]);
    if (idx < basis.slot_labels.size()) inst.slot_labels.push_back(basis.slot_labels[idx]);
  }
  if (inst.labels.size() != indices.size()) inst.labels.clear();
  if (inst.slot_labels.size() != indices.size()) inst.slot_labels.clear();
  validate_instance(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Difference set, verification, transpose dual
// ---------------------------------------------------------------------------

DifferenceSet difference_set(const DiscriminationInstance& inst) {
  validate_instance(inst);
  const std::size_t d = inst.dim;
  DifferenceSet out;
  out.dim = d;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = 0; j < inst.size(); ++j) {
      if (i == j) continue;
      ComplexMatrix m = mul(adjoint(inst.unitaries[i].matrix), inst.unitaries[j].matrix);
      // locate the largest entry once; used to align phases against candidates
      std::size_t peak = 0;
      double peak_abs = 0.0;
      for (std::size_t k = 0; k < m.entries.size(); ++k) {
        if (std::abs(m.entries[k]) > peak_abs) {
          peak_abs = std::abs(m.entries[k]);
          peak = k;
        }
      }
      bool duplicate = false;
      for (const auto& rep : out.elements) {
        if (std::abs(rep.entries[peak]) < 0.5 * peak_abs) continue;
        const cd phase = m.entries[peak] / rep.entries[peak];
        if (std::abs(std::abs(phase) - 1.0) > 1e-8) continue;
        double diff = 0.0;
        for (std::size_t k = 0; k < m.entries.size(); ++k)
          diff = std::max(diff, std::abs(m.entries[k] - phase * rep.entries[k]));
        if (diff <= 1e-8) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) out.elements.push_back(std::move(m));
    }
  }
  return out;
}

double verify_certificate(const DiscriminationInstance& inst, const PureState& alpha) {
  const std::size_t d = inst.dim;
  if (alpha.dim() != d) throw std::invalid_argument("verify: dimension mismatch");
  if (std::abs(state_norm(alpha) - 1.0) > 1e-9)
    throw std::invalid_argument("verify: certificate vector is not unit norm");
  // Plain-loop evaluation, independent of the solver's kernel path.
  std::vector<std::vector<cd>> images(inst.size(), std::vector<cd>(d));
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const ComplexMatrix& u = inst.unitaries[k].matrix;
    for (std::size_t r = 0; r < d; ++r) {
      cd acc{0.0, 0.0};
      for (std::size_t c = 0; c < d; ++c) acc += u(r, c) * alpha.amplitudes[c];
      images[k][r] = acc;
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = i + 1; j < inst.size(); ++j) {
      cd overlap{0.0, 0.0};
      for (std::size_t r = 0; r < d; ++r) overlap += std::conj(images[i][r]) * images[j][r];
      worst = std::max(worst, std::abs(overlap));
    }
  }
  return worst;
}

DiscriminationInstance transpose_dual(const DiscriminationInstance& inst) {
  DiscriminationInstance out;
  out.dim = inst.dim;
  out.family = inst.family;
  for (const auto& u : inst.unitaries)
    out.unitaries.push_back(UnitaryMatrix{transpose_of(u.matrix), u.verified});
  for (const auto& slots : inst.slot_labels) {
    std::vector<SlotLabel> t;
    for (const auto& s : slots)
      t.push_back(SlotLabel{s.q, static_cast<unsigned>((s.q - s.a) % s.q), s.b, s.prime});
    out.slot_labels.push_back(std::move(t));
  }
  for (const auto& label : inst.labels) {
    if (inst.family == "gbs") {
      GbsLabel g = parse_gbs_label(label, inst.dim);
      g.m = (inst.dim - g.m) % inst.dim;
      out.labels.push_back(format_gbs_label(g));
    } else if (inst.family == "lattice") {
      LatticeLabel g = parse_lattice_label(label, inst.dim);
      for (std::size_t f = 0; f < g.factors.size(); ++f)
        for (auto& s : g.s[f]) s = (g.factors[f].p - s) % g.factors[f].p;
      out.labels.push_back(format_lattice_label(g));
    } else {
      out.labels.push_back(label + "^T");
    }
  }
  validate_instance(out);
  return out;
}

// ---------------------------------------------------------------------------
// Certificate helpers
// ---------------------------------------------------------------------------

nlohmann::json certificate_to_json(const Certificate& cert) {
  nlohmann::json j;
  j["verdict"] = to_string(cert.verdict);
  if (cert.proof_tag) j["proof_tag"] = to_string(*cert.proof_tag);
  if (cert.verdict == Verdict::yes) {
    if (!cert.alpha || !cert.residual)
      throw std::logic_error("certificate: YES without witness data");
    j["alpha"] = state_to_json(*cert.alpha);
    j["residual"] = *cert.residual;
  }
  if (cert.restarts_used > 0) {
    j["diagnostics"] = {{"restarts_used", cert.restarts_used},
                        {"best_objective", cert.best_objective}};
  }
  return j;
}

namespace {

Certificate finalize_yes(const DiscriminationInstance& inst, PureState alpha, ProofTag tag,
                         int restarts_used = 0, double best_objective = 0.0) {
  Certificate cert;
  cert.verdict = Verdict::yes;
  cert.proof_tag = tag;
  const double residual = verify_certificate(inst, alpha);
  if (residual > tol::cert) {
    std::ostringstream os;
    os << "internal: " << to_string(tag) << " certificate failed re-verification (residual "
       << residual << ")";
    throw std::runtime_error(os.str());
  }
  cert.alpha = std::move(alpha);
  cert.residual = residual;
  cert.restarts_used = restarts_used;
  cert.best_objective = best_objective;
  return cert;
}

std::vector<cd> kron_vec(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor-side constructions (public)
// ---------------------------------------------------------------------------

Certificate construct_prop1(const std::vector<UnitaryMatrix>& factor_basis,
                            const UnitaryMatrix& v) {
  if (factor_basis.size() < 2)
    throw std::invalid_argument("prop1: need at least two factor states");
  const std::size_t d1 = factor_basis.front().dim();
  const std::size_t d2 = v.dim();
  if (d1 < 2) throw std::invalid_argument("prop1: factor dimension must be at least 2");
  if (d1 > d2)
    throw std::invalid_argument("prop1: fixed factor dimension must be at least the varying one");
  DiscriminationInstance inst;
  inst.dim = d1 * d2;
  inst.family = "tensor";
  for (const auto& u : factor_basis) {
    if (u.dim() != d1) throw std::invalid_argument("prop1: mixed factor dimensions");
    inst.unitaries.push_back(tensor_u(u, v));
  }
  validate_instance(inst);  // also checks pairwise orthogonality of the products
  std::vector<cd> amps(inst.dim, cd{0.0, 0.0});
  const double w = 1.0 / std::sqrt(static_cast<double>(d1));
  for (std::size_t i = 0; i < d1; ++i) amps[i * d2 + i] = cd{w, 0.0};
  return finalize_yes(inst, make_pure_state(std::move(amps), 1e-12), ProofTag::prop1_tensor);
}

DiscriminationInstance product_instance(const std::vector<DiscriminationInstance>& factors) {
  if (factors.empty()) throw std::invalid_argument("product: empty factor list");
  for (const auto& f : factors) validate_instance(f);
  DiscriminationInstance out = factors.front();
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const DiscriminationInstance& nxt = factors[f];
    DiscriminationInstance acc;
    acc.dim = out.dim * nxt.dim;
    acc.family = "tensor";
    const bool with_labels = !out.labels.empty() && !nxt.labels.empty();
    const bool with_slots = !out.slot_labels.empty() && !nxt.slot_labels.empty();
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < nxt.size(); ++j) {
        acc.unitaries.push_back(tensor_u(out.unitaries[i], nxt.unitaries[j]));
        if (with_labels) acc.labels.push_back(out.labels[i] + "*" + nxt.labels[j]);
        if (with_slots) {
          std::vector<SlotLabel> s = out.slot_labels[i];
          s.insert(s.end(), nxt.slot_labels[j].begin(), nxt.slot_labels[j].end());
          acc.slot_labels.push_back(std::move(s));
        }
      }
    }
    out = std::move(acc);
  }
  validate_instance(out);
  return out;
}

Certificate construct_prop2(
    const std::vector<std::pair<DiscriminationInstance, Certificate>>& factors) {
  if (factors.empty()) throw std::invalid_argument("prop2: empty factor list");
  std::vector<DiscriminationInstance> insts;
  std::vector<cd> amps{cd{1.0, 0.0}};
  for (const auto& [inst, cert] : factors) {
    insts.push_back(inst);
    if (cert.verdict != Verdict::yes || !cert.alpha)
      throw std::invalid_argument("prop2: every factor needs a YES certificate");
    if (cert.alpha->dim() != inst.dim)
      throw std::invalid_argument("prop2: certificate dimension mismatch");
    if (verify_certificate(inst, *cert.alpha) > tol::cert)
      throw std::invalid_argument("prop2: factor certificate does not verify");
    amps = kron_vec(amps, cert.alpha->amplitudes);
  }
  DiscriminationInstance inst = product_instance(insts);
  return finalize_yes(inst, make_pure_state(std::move(amps), 1e-9), ProofTag::prop2_product);
}

// ---------------------------------------------------------------------------
// Dimension-2p entangled construction
// ---------------------------------------------------------------------------

namespace {

// Unit vector in C^{2p} (qubit slot slowest) with vanishing expectation on
// every operator P ⊗ W^k, P any qubit displacement, k in {0, ±1},
// (P, k) != (I, I), where W = X^a Z^b on C^p, (a, b) != (0, 0).
std::vector<cd> claim2_vector(std::uint64_t p, std::uint64_t a, std::uint64_t b) {
  a %= p;
  b %= p;
  if (a == 0 && b == 0) throw std::logic_error("claim2: trivial target operator");
  std::vector<cd> amps(2 * p, cd{0.0, 0.0});
  if (a != 0) {
    std::uint64_t v = 0;
    for (std::uint64_t c = 1; c < p; ++c) {
      if (c != a && c + a != p) {
        v = c;
        break;
      }
    }
    if (v == 0) throw std::logic_error("claim2: no admissible column index");
    amps[0] = cd{0.5, 0.0};
    amps[v] = cd{0.5, 0.0};
    amps[p] = cd{0.5, 0.0};
    amps[p + v] = cd{-0.5, 0.0};
  } else {
    std::uint64_t k = 0;
    for (std::uint64_t c = 1; c < p; ++c) {
      if (c != b && c + b != p) {
        k = c;
        break;
      }
    }
    if (k == 0) throw std::logic_error("claim2: no admissible frequency");
    const double w = 1.0 / std::sqrt(2.0 * static_cast<double>(p));
    for (std::uint64_t j = 0; j < p; ++j) {
      amps[j] = cd{w, 0.0};
      amps[p + j] = w * root_of_unity(p, static_cast<std::int64_t>(k * j));
    }
  }
  return amps;
}

}  // namespace

PureState construct_appendixA_claim2(std::uint64_t p, std::uint64_t l) {
  if (p < 7) throw std::invalid_argument("claim2: requires p >= 7");
  if (!is_prime(p)) throw std::invalid_argument("claim2: p must be prime");
  if (l < 1 || l >= p) throw std::invalid_argument("claim2: shift exponent must lie in [1, p)");
  return make_pure_state(claim2_vector(p, l, 0), 1e-12);
}

// ---------------------------------------------------------------------------
// Qubit Bloch analysis
// ---------------------------------------------------------------------------

namespace {

// M traceless 2x2 unitary => M = phase * (n . sigma); extract the real unit
// direction n, with XZ mapping to the y axis.
std::optional<std::array<double, 3>> qubit_direction(const ComplexMatrix& m) {
  if (m.rows != 2 || m.cols != 2) return std::nullopt;
  if (std::abs(m(0, 0) + m(1, 1)) > 1e-8) return std::nullopt;
  const std::array<cd, 3> c = {
      (m(0, 1) + m(1, 0)) * 0.5,                 // sigma_x
      (m(1, 0) - m(0, 1)) * cd{0.0, -0.5},       // sigma_y
      (m(0, 0) - m(1, 1)) * 0.5,                 // sigma_z
  };
  double s2 = 0.0;
  for (const cd& v : c) s2 += std::norm(v);
  const double s = std::sqrt(s2);
  if (s < 1e-8) return std::nullopt;
  std::size_t peak = 0;
  for (std::size_t k = 1; k < 3; ++k)
    if (std::abs(c[k]) > std::abs(c[peak])) peak = k;
  const cd phase = c[peak] / std::abs(c[peak]);
  std::array<double, 3> n{};
  for (std::size_t k = 0; k < 3; ++k) {
    const cd aligned = c[k] / (phase * s);
    if (std::abs(aligned.imag()) > 1e-8) return std::nullopt;
    n[k] = aligned.real();
  }
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(len - 1.0) > 1e-8) return std::nullopt;
  return n;
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Orthonormal basis of the span of the given directions (Gram-Schmidt).
std::vector<std::array<double, 3>> direction_span(const std::vector<std::array<double, 3>>& dirs) {
  std::vector<std::array<double, 3>> basis;
  for (auto n : dirs) {
    for (const auto& b : basis) {
      const double pr = dot3(n, b);
      for (std::size_t k = 0; k < 3; ++k) n[k] -= pr * b[k];
    }
    const double len = std::sqrt(dot3(n, n));
    if (len > 1e-8) {
      for (auto& x : n) x /= len;
      basis.push_back(n);
    }
    if (basis.size() == 3) break;
  }
  return basis;
}

std::optional<std::vector<std::array<double, 3>>> instance_directions(
    const DiscriminationInstance& inst) {
  std::vector<std::array<double, 3>> dirs;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = i + 1; j < inst.size(); ++j) {
      const ComplexMatrix m = mul(adjoint(inst.unitaries[i].matrix), inst.unitaries[j].matrix);
      const auto n = qubit_direction(m);
      if (!n) return std::nullopt;
      dirs.push_back(*n);
    }
  }
  return dirs;
}

// Bloch vector (unit) -> qubit state with that expectation triple.
std::vector<cd> bloch_state(const std::array<double, 3>& r) {
  const double z = std::clamp(r[2], -1.0, 1.0);
  const double theta = std::acos(z);
  const double phi = std::atan2(r[1], r[0]);
  return {cd{std::cos(theta / 2.0), 0.0},
          std::sin(theta / 2.0) * cd{std::cos(phi), std::sin(phi)}};
}

// Any unit vector orthogonal to the (rank <= 2) span.
std::array<double, 3> orthogonal_direction(const std::vector<std::array<double, 3>>& basis) {
  if (basis.size() >= 2) {
    auto r = cross3(basis[0], basis[1]);
    const double len = std::sqrt(dot3(r, r));
    for (auto& x : r) x /= len;
    return r;
  }
  if (basis.size() == 1) {
    const auto& b = basis[0];
    std::array<double, 3> seed{1.0, 0.0, 0.0};
    if (std::abs(b[0]) > 0.9) seed = {0.0, 1.0, 0.0};
    const double pr = dot3(seed, b);
    for (std::size_t k = 0; k < 3; ++k) seed[k] -= pr * b[k];
    const double len = std::sqrt(dot3(seed, seed));
    for (auto& x : seed) x /= len;
    return seed;
  }
  return {0.0, 0.0, 1.0};
}

std::optional<Certificate> bloch_feasible(const DiscriminationInstance& inst) {
  if (inst.dim != 2) return std::nullopt;
  const auto dirs = instance_directions(inst);
  if (!dirs) return std::nullopt;
  const auto basis = direction_span(*dirs);
  if (basis.size() >= 3) return std::nullopt;
  const auto r = orthogonal_direction(basis);
  return finalize_yes(inst, make_pure_state(bloch_state(r), 1e-12), ProofTag::bloch_qubit);
}

}  // namespace

std::optional<Certificate> bloch_infeasible(const DiscriminationInstance& inst) {
  if (inst.dim != 2) return std::nullopt;
  const auto dirs = instance_directions(inst);
  if (!dirs) return std::nullopt;
  if (direction_span(*dirs).size() < 3) return std::nullopt;
  Certificate cert;
  cert.verdict = Verdict::no;
  cert.proof_tag = ProofTag::bloch_qubit;
  return cert;
}

// ---------------------------------------------------------------------------
// Sub-certificate cache
// ---------------------------------------------------------------------------

struct SolveCache {
  std::mutex mu;
  std::map<std::string, Certificate> memo;
};

std::shared_ptr<SolveCache> make_solve_cache() { return std::make_shared<SolveCache>(); }

namespace {

std::optional<Certificate> cache_lookup(SolveCache& cache, const std::string& key) {
  std::lock_guard<std::mutex> lock(cache.mu);
  const auto it = cache.memo.find(key);
  if (it == cache.memo.end()) return std::nullopt;
  return it->second;
}

void cache_store(SolveCache& cache, const std::string& key, const Certificate& cert) {
  std::lock_guard<std::mutex> lock(cache.mu);
  cache.memo.emplace(key, cert);
}

}  // namespace

// ---------------------------------------------------------------------------
// Slot-structured engine
// ---------------------------------------------------------------------------

namespace {

using SlotDigit = std::pair<std::uint64_t, std::uint64_t>;  // (shift, clock) exponents

struct SlotView {
  std::vector<std::uint64_t> q;
  std::vector<bool> prime;
  std::vector<std::vector<SlotDigit>> digits;  // [element][slot]
  std::size_t slots() const { return q.size(); }
};

std::optional<SlotView> slot_view(const DiscriminationInstance& inst) {
  if (inst.slot_labels.size() != inst.size()) return std::nullopt;
  const std::size_t f = inst.slot_labels.front().size();
  if (f == 0) return std::nullopt;
  SlotView view;
  for (const auto& s : inst.slot_labels.front()) {
    view.q.push_back(s.q);
    view.prime.push_back(s.prime);
  }
  std::uint64_t prod = 1;
  for (std::uint64_t q : view.q) prod *= q;
  if (prod != inst.dim) return std::nullopt;
  for (const auto& slots : inst.slot_labels) {
    if (slots.size() != f) return std::nullopt;
    std::vector<SlotDigit> row;
    for (std::size_t s = 0; s < f; ++s) {
      if (slots[s].q != view.q[s]) return std::nullopt;
      if (slots[s].a >= slots[s].q || slots[s].b >= slots[s].q) return std::nullopt;
      row.emplace_back(slots[s].a, slots[s].b);
    }
    view.digits.push_back(std::move(row));
  }
  return view;
}

SlotDigit slot_diff(const SlotView& view, std::size_t i, std::size_t j, std::size_t s) {
  const std::uint64_t q = view.q[s];
  const auto& [ai, bi] = view.digits[i][s];
  const auto& [aj, bj] = view.digits[j][s];
  return {(aj + q - ai) % q, (bj + q - bi) % q};
}

// Mixed-radix strides over the slot dimensions, slot 0 slowest.
std::vector<std::uint64_t> slot_strides(const std::vector<std::uint64_t>& dims) {
  std::vector<std::uint64_t> strides(dims.size(), 1);
  for (std::size_t s = dims.size(); s-- > 1;) strides[s - 1] = strides[s] * dims[s];
  return strides;
}

// Lift a vector over the kept slots to the full space, placing digit 0 on
// every dropped slot.
PureState embed_keep(const std::vector<cd>& reduced, const SlotView& view,
                     const std::vector<std::size_t>& keep) {
  std::vector<std::uint64_t> keep_dims;
  for (std::size_t s : keep) keep_dims.push_back(view.q[s]);
  const auto keep_strides = slot_strides(keep_dims);
  const auto full_strides = slot_strides(view.q);
  std::uint64_t full_dim = 1;
  for (std::uint64_t q : view.q) full_dim *= q;
  std::vector<cd> amps(full_dim, cd{0.0, 0.0});
  for (std::size_t r = 0; r < reduced.size(); ++r) {
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const std::uint64_t digit = (r / keep_strides[k]) % keep_dims[k];
      idx += digit * full_strides[keep[k]];
    }
    amps[idx] = reduced[r];
  }
  return make_pure_state(std::move(amps), 1e-9);
}

// --- per-slot zeroing toolkit ---

std::array<double, 3> qubit_axis(const SlotDigit& t) {
  if (t == SlotDigit{1, 0}) return {1.0, 0.0, 0.0};
  if (t == SlotDigit{0, 1}) return {0.0, 0.0, 1.0};
  return {0.0, 1.0, 0.0};  // XZ
}

bool slot_set_zeroable(std::uint64_t q, const std::set<SlotDigit>& targets) {
  if (targets.empty()) return true;
  bool all_shift = true;
  bool all_clock = true;
  for (const auto& [a, b] : targets) {
    if (a == 0) all_shift = false;
    if (b == 0) all_clock = false;
  }
  if (all_shift || all_clock) return true;
  if (q == 2) return targets.size() <= 2;
  return false;
}

// Unit vector in C^q with zero expectation on X^a Z^b for every target;
// caller must have checked slot_set_zeroable.
std::vector<cd> slot_null_vector(std::uint64_t q, const std::set<SlotDigit>& targets) {
  std::vector<cd> v(q, cd{0.0, 0.0});
  if (targets.empty()) {
    v[0] = cd{1.0, 0.0};
    return v;
  }
  bool all_shift = true;
  bool all_clock = true;
  for (const auto& [a, b] : targets) {
    if (a == 0) all_shift = false;
    if (b == 0) all_clock = false;
  }
  if (all_shift) {
    v[0] = cd{1.0, 0.0};  // <e0| X^a Z^b |e0> = 0 whenever a != 0
    return v;
  }
  if (all_clock) {
    const double w = 1.0 / std::sqrt(static_cast<double>(q));
    for (auto& x : v) x = cd{w, 0.0};  // uniform vector kills any clock component
    return v;
  }
  if (q == 2 && targets.size() <= 2) {
    std::vector<std::array<double, 3>> dirs;
    for (const auto& t : targets) dirs.push_back(qubit_axis(t));
    return bloch_state(orthogonal_direction(direction_span(dirs)));
  }
  throw std::logic_error("slot toolkit: unsatisfiable target set");
}

// --- greedy pair-to-slot assignment ---

struct PairConstraint {
  std::size_t i = 0, j = 0;
  std::vector<SlotDigit> diff;            // per kept slot
  std::vector<std::size_t> candidates;    // kept-slot positions usable for this pair
};

bool greedy_assign(std::vector<PairConstraint> pairs, const std::vector<std::uint64_t>& dims,
                   std::vector<std::set<SlotDigit>>& targets) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const PairConstraint& a, const PairConstraint& b) {
    if (a.candidates.size() != b.candidates.size())
      return a.candidates.size() < b.candidates.size();
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  for (const auto& pc : pairs) {
    if (pc.candidates.empty()) return false;
    bool done = false;
    for (std::size_t k : pc.candidates) {
      if (targets[k].count(pc.diff[k])) {
        done = true;
        break;
      }
    }
    if (done) continue;
    for (std::size_t k : pc.candidates) {
      auto [it, inserted] = targets[k].insert(pc.diff[k]);
      if (slot_set_zeroable(dims[k], targets[k])) {
        done = true;
        break;
      }
      if (inserted) targets[k].erase(it);
    }
    if (!done) return false;
  }
  return true;
}

std::vector<PairConstraint> kept_pair_constraints(const SlotView& view,
                                                  const std::vector<std::size_t>& keep,
                                                  std::size_t l) {
  std::vector<PairConstraint> pairs;
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      PairConstraint pc;
      pc.i = i;
      pc.j = j;
      for (std::size_t k = 0; k < keep.size(); ++k) {
        const SlotDigit d = slot_diff(view, i, j, keep[k]);
        pc.diff.push_back(d);
        if (d != SlotDigit{0, 0}) pc.candidates.push_back(k);
      }
      pairs.push_back(std::move(pc));
    }
  }
  return pairs;
}

// --- engine context, memoized single-slot sub-solves ---

struct EngineCtx {
  int budget = 64;
  std::uint64_t seed = 1;
  SolveCache* cache = nullptr;
};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Certificate solve_impl(const DiscriminationInstance& inst, EngineCtx& ctx, int depth);

DiscriminationInstance single_slot_instance(std::uint64_t q, const std::set<SlotDigit>& labels) {
  DiscriminationInstance inst;
  inst.dim = q;
  inst.family = "gbs";
  const bool prime = is_prime(q);
  for (const auto& [a, b] : labels) {
    const GbsLabel g{static_cast<std::size_t>(q), static_cast<std::size_t>(a),
                     static_cast<std::size_t>(b)};
    inst.unitaries.push_back(gbs_unitary(g));
    inst.labels.push_back(format_gbs_label(g));
    inst.slot_labels.push_back(
        {SlotLabel{q, static_cast<unsigned>(a), static_cast<unsigned>(b), prime}});
  }
  validate_instance(inst);
  return inst;
}

Certificate sub_solve(std::uint64_t q, const std::set<SlotDigit>& labels, EngineCtx& ctx,
                      int depth) {
  std::ostringstream key;
  key << "q" << q;
  for (const auto& [a, b] : labels) key << ":" << a << "," << b;
  if (ctx.cache != nullptr) {
    if (auto hit = cache_lookup(*ctx.cache, key.str())) return *hit;
  }
  EngineCtx sub{ctx.budget, fnv1a64(key.str()), ctx.cache};
  Certificate cert = solve_impl(single_slot_instance(q, labels), sub, depth + 1);
  if (ctx.cache != nullptr) cache_store(*ctx.cache, key.str(), cert);
  return cert;
}

// --- route: constant tensor factor with a maximally entangled vector ---

std::optional<Certificate> route_constant_factor(const DiscriminationInstance& inst,
                                                 const SlotView& view,
                                                 const std::vector<std::size_t>& keep,
                                                 const std::vector<std::size_t>& dropped) {
  if (dropped.empty()) return std::nullopt;
  std::uint64_t dg = 1, dr = 1;
  for (std::size_t s : keep) dg *= view.q[s];
  for (std::size_t s : dropped) dr *= view.q[s];
  if (dg > dr) return std::nullopt;
  std::vector<std::uint64_t> keep_dims, drop_dims;
  for (std::size_t s : keep) keep_dims.push_back(view.q[s]);
  for (std::size_t s : dropped) drop_dims.push_back(view.q[s]);
  const auto keep_strides = slot_strides(keep_dims);
  const auto drop_strides = slot_strides(drop_dims);
  const auto full_strides = slot_strides(view.q);
  std::vector<cd> amps(inst.dim, cd{0.0, 0.0});
  const double w = 1.0 / std::sqrt(static_cast<double>(dg));
  for (std::uint64_t k = 0; k < dg; ++k) {
    std::uint64_t idx = 0;
    for (std::size_t s = 0; s < keep.size(); ++s)
      idx += ((k / keep_strides[s]) % keep_dims[s]) * full_strides[keep[s]];
    for (std::size_t s = 0; s < dropped.size(); ++s)
      idx += ((k / drop_strides[s]) % drop_dims[s]) * full_strides[dropped[s]];
    amps[idx] = cd{w, 0.0};
  }
  return finalize_yes(inst, make_pure_state(std::move(amps), 1e-9), ProofTag::prop1_tensor);
}

// --- route: product of per-slot null-expectation vectors ---

std::optional<Certificate> route_singles(const DiscriminationInstance& inst, const SlotView& view,
                                         const std::vector<std::size_t>& keep) {
  auto pairs = kept_pair_constraints(view, keep, inst.size());
  std::vector<std::uint64_t> dims;
  for (std::size_t s : keep) dims.push_back(view.q[s]);
  std::vector<std::set<SlotDigit>> targets(keep.size());
  if (!greedy_assign(pairs, dims, targets)) return std::nullopt;
  std::vector<cd> reduced{cd{1.0, 0.0}};
  for (std::size_t k = 0; k < keep.size(); ++k)
    reduced = kron_vec(reduced, slot_null_vector(dims[k], targets[k]));
  return finalize_yes(inst, embed_keep(reduced, view, keep), ProofTag::prop2_product);
}

// --- route: one slot carries a full sub-certificate, the rest use singles ---

std::optional<Certificate> route_covering(const DiscriminationInstance& inst, const SlotView& view,
                                          const std::vector<std::size_t>& keep, EngineCtx& ctx,
                                          int depth) {
  if (keep.size() < 2 || depth > 2) return std::nullopt;
  const auto all_pairs = kept_pair_constraints(view, keep, inst.size());
  std::vector<std::uint64_t> dims;
  for (std::size_t s : keep) dims.push_back(view.q[s]);
  for (std::size_t cover = 0; cover < keep.size(); ++cover) {
    std::set<SlotDigit> values;
    for (std::size_t e = 0; e < inst.size(); ++e) values.insert(view.digits[e][keep[cover]]);
    if (values.size() < 2) continue;
    Certificate sub = sub_solve(dims[cover], values, ctx, depth);
    if (sub.verdict != Verdict::yes || !sub.alpha) continue;
    // pairs agreeing on the covering slot still need a zeroed slot elsewhere
    std::vector<PairConstraint> uncovered;
    for (const auto& pc : all_pairs) {
      if (pc.diff[cover] != SlotDigit{0, 0}) continue;
      PairConstraint rest = pc;
      rest.candidates.clear();
      for (std::size_t k : pc.candidates)
        if (k != cover) rest.candidates.push_back(k);
      uncovered.push_back(std::move(rest));
    }
    std::vector<std::set<SlotDigit>> targets(keep.size());
    if (!greedy_assign(uncovered, dims, targets)) continue;
    std::vector<cd> reduced{cd{1.0, 0.0}};
    for (std::size_t k = 0; k < keep.size(); ++k) {
      if (k == cover)
        reduced = kron_vec(reduced, sub.alpha->amplitudes);
      else
        reduced = kron_vec(reduced, slot_null_vector(dims[k], targets[k]));
    }
    return finalize_yes(inst, embed_keep(reduced, view, keep), ProofTag::prop2_product);
  }
  return std::nullopt;
}

// --- route: dimension-2p entangled vector ---

std::optional<Certificate> route_two_slot_entangled(const DiscriminationInstance& inst,
                                                    const SlotView& view,
                                                    const std::vector<std::size_t>& keep) {
  if (keep.size() != 2) return std::nullopt;
  const std::uint64_t q0 = view.q[keep[0]];
  const std::uint64_t q1 = view.q[keep[1]];
  if (q0 != 2 || q1 < 7 || !view.prime[keep[1]]) return std::nullopt;
  std::set<SlotDigit> values;
  for (std::size_t e = 0; e < inst.size(); ++e) values.insert(view.digits[e][keep[1]]);
  if (values.size() != 2) return std::nullopt;
  const auto it0 = values.begin();
  const auto it1 = std::next(it0);
  const std::uint64_t a = (it1->first + q1 - it0->first) % q1;
  const std::uint64_t b = (it1->second + q1 - it0->second) % q1;
  return finalize_yes(inst, embed_keep(claim2_vector(q1, a, b), view, keep),
                      ProofTag::appendixA_claim2);
}

// --- numeric fallback ---

std::vector<ComplexMatrix> pairwise_constraints(const DiscriminationInstance& inst) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < inst.size(); ++i)
    for (std::size_t j = i + 1; j < inst.size(); ++j)
      out.push_back(mul(adjoint(inst.unitaries[i].matrix), inst.unitaries[j].matrix));
  return out;
}

std::vector<ComplexMatrix> reduced_constraints(const SlotView& view,
                                               const std::vector<std::size_t>& keep,
                                               std::size_t l) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      ComplexMatrix m = ComplexMatrix::identity(1);
      for (std::size_t s : keep) {
        const SlotDigit d = slot_diff(view, i, j, s);
        m = tensor(m, gbs_unitary(GbsLabel{view.q[s], d.first, d.second}).matrix);
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

Certificate numeric_stage(const DiscriminationInstance& inst,
                          const std::optional<SlotView>& view,
                          const std::vector<std::size_t>& keep, EngineCtx& ctx) {
  NumericOptions opt;
  opt.restarts = ctx.budget;
  int restarts_total = 0;
  double best = -1.0;
  std::uint64_t reduced_dim = 1;
  if (view) {
    for (std::size_t s : keep) reduced_dim *= view->q[s];
  }
  if (view && reduced_dim < inst.dim) {
    const auto cs = reduced_constraints(*view, keep, inst.size());
    const NumericResult res =
        numeric_minimize(cs, reduced_dim, derive_seed(ctx.seed, 101), opt);
    restarts_total += res.restarts_used;
    best = res.best_objective;
    if (res.success) {
      return finalize_yes(inst, embed_keep(res.alpha.amplitudes, *view, keep), ProofTag::numeric,
                          restarts_total, res.objective);
    }
  }
  const auto cs = pairwise_constraints(inst);
  const NumericResult res = numeric_minimize(cs, inst.dim, derive_seed(ctx.seed, 102), opt);
  restarts_total += res.restarts_used;
  best = (best < 0.0) ? res.best_objective : std::min(best, res.best_objective);
  if (res.success)
    return finalize_yes(inst, res.alpha, ProofTag::numeric, restarts_total, res.objective);
  Certificate cert;
  cert.verdict = Verdict::unknown;
  cert.restarts_used = restarts_total;
  cert.best_objective = best;
  return cert;
}

Certificate solve_impl(const DiscriminationInstance& inst, EngineCtx& ctx, int depth) {
  std::optional<SlotView> view = slot_view(inst);
  std::vector<std::size_t> keep, dropped;
  if (view) {
    for (std::size_t s = 0; s < view->slots(); ++s) {
      bool constant = true;
      for (std::size_t e = 1; e < inst.size() && constant; ++e)
        constant = view->digits[e][s] == view->digits[0][s];
      (constant ? dropped : keep).push_back(s);
    }
    if (keep.empty()) throw std::logic_error("engine: identical slot labels on distinct states");
    if (auto c = route_constant_factor(inst, *view, keep, dropped)) return *c;
    if (auto c = route_singles(inst, *view, keep)) return *c;
    if (auto c = route_covering(inst, *view, keep, ctx, depth)) return *c;
    if (auto c = route_two_slot_entangled(inst, *view, keep)) return *c;
  }
  if (inst.dim == 2) {
    if (auto c = bloch_infeasible(inst)) return *c;
    if (auto c = bloch_feasible(inst)) return *c;
  }
  return numeric_stage(inst, view, keep, ctx);
}

}  // namespace

// ---------------------------------------------------------------------------
// Public solve
// ---------------------------------------------------------------------------

Certificate solve(const DiscriminationInstance& inst, int budget, std::uint64_t seed,
                  const std::shared_ptr<SolveCache>& cache) {
  validate_instance(inst);
  if (budget <= 0) throw std::invalid_argument("solve: restart budget must be positive");
  EngineCtx ctx{budget, seed, cache.get()};
  return solve_impl(inst, ctx, 0);
}

}  // namespace twistdisc
