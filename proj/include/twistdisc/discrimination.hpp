#pragma once
/*
 * Decision engine for one-way distinguishability of maximally entangled
 * states, phrased on their defining unitaries: an instance {U_1..U_l} is YES
 * when some unit vector α makes {U_i α} pairwise orthogonal, witnessed by an
 * explicit α whose residual max_{i<j} |<α|U_i†U_j|α>| is reported.
 *
 * solve() dispatches structural constructions first (tensor-side maximally
 * entangled vectors; per-slot product certificates; the dimension-2p
 * entangled construction; the qubit Bloch obstruction) and falls back to a
 * seeded multi-restart numeric search.  The numeric stage never claims NO:
 * an exhausted budget yields UNKNOWN with diagnostics.  YES certificates are
 * re-verified through verify_certificate before being returned.
 */

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twistdisc/operators.hpp"
#include "twistdisc/teleport.hpp"
#include "twistdisc/types.hpp"

namespace twistdisc {

enum class Verdict { yes, no, unknown };

enum class ProofTag {
  prop1_tensor,      // maximally entangled vector across a constant tensor factor
  prop2_product,     // product of per-slot certificates / null-expectation vectors
  appendixA_claim2,  // explicit entangled vector at d = 2p
  bloch_qubit,       // qubit Bloch-sphere obstruction (NO)
  numeric,           // multi-restart minimization found a certificate
  exhaustive_small,  // reserved: certified global bound on a small instance
};

const char* to_string(Verdict v);
const char* to_string(ProofTag t);

struct DiscriminationInstance {
  std::size_t dim = 0;
  std::vector<UnitaryMatrix> unitaries;
  std::vector<std::string> labels;                  // optional, for reports
  std::string family = "generic";                   // gbs | lattice | tensor | generic
  std::vector<std::vector<SlotLabel>> slot_labels;  // per element; empty for generic

  std::size_t size() const { return unitaries.size(); }
};

// Validates 2 <= l <= d^2, equal dimensions, and pairwise hs_inner
// orthogonality within 1e-10; throws std::invalid_argument otherwise.
void validate_instance(const DiscriminationInstance& inst);

DiscriminationInstance make_instance(std::vector<UnitaryMatrix> unitaries,
                                     std::vector<std::string> labels = {},
                                     std::string family = "generic",
                                     std::vector<std::vector<SlotLabel>> slot_labels = {});

DiscriminationInstance instance_from_basis(const MesBasis& basis,
                                           const std::vector<std::size_t>& indices);

struct DifferenceSet {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> elements;  // ordered products U_i†U_j, i != j,
                                        // deduplicated up to a unimodular scalar
};

DifferenceSet difference_set(const DiscriminationInstance& inst);

// max over i<j of |<α|U_i†U_j|α>|; requires unit-norm α of matching dimension.
double verify_certificate(const DiscriminationInstance& inst, const PureState& alpha);

// Element-wise transpose; slot labels map (a, b) -> (-a mod q, b).
DiscriminationInstance transpose_dual(const DiscriminationInstance& inst);

struct Certificate {
  Verdict verdict = Verdict::unknown;
  std::optional<ProofTag> proof_tag;
  std::optional<PureState> alpha;    // present iff YES
  std::optional<double> residual;    // present iff YES
  // diagnostics, populated when the numeric stage ran
  int restarts_used = 0;
  double best_objective = 0.0;
};

nlohmann::json certificate_to_json(const Certificate& cert);

// {U_j ⊗ v} for a mutually orthogonal unitary set on C^{d1} and v on C^{d2},
// 2 <= d1 <= d2: α = (1/√d1) Σ |i>|i> always works.
Certificate construct_prop1(const std::vector<UnitaryMatrix>& factor_basis,
                            const UnitaryMatrix& v);

// Tensor-product lift: given YES certificates for each factor instance, the
// product vector certifies the full combination instance.  A single factor
// passes through.  Throws if any factor certificate is not YES within 1e-9.
Certificate construct_prop2(
    const std::vector<std::pair<DiscriminationInstance, Certificate>>& factors);

// All f-fold combinations of the factor instances' unitaries (used with
// construct_prop2).
DiscriminationInstance product_instance(const std::vector<DiscriminationInstance>& factors);

// Explicit vector in C^{2p} for the d = 2p four-state analysis: blocks
// (e_0 + e_{j0})/2 and (e_0 - e_{j0})/2 with the smallest j0 in [1, p)
// satisfying j0 != l and j0 + l != p.  Requires prime p >= 7, 1 <= l < p.
PureState construct_appendixA_claim2(std::uint64_t p, std::uint64_t l);

// Qubit obstruction: at d = 2, if the difference set spans three independent
// traceless directions, every unit Bloch vector leaves a residual >= 1/√3.
// Returns the NO certificate, or nullopt when not applicable.
std::optional<Certificate> bloch_infeasible(const DiscriminationInstance& inst);

struct NumericOptions {
  int restarts = 64;
  int max_gradient_iters = 150;
  int max_polish_iters = 30;
  double accept = tol::objective_accept;
};

struct NumericResult {
  bool success = false;
  PureState alpha;
  double objective = 0.0;
  int restarts_used = 0;
  double best_objective = 0.0;
};

// f(α) = Σ_k |<α|M_k|α>|² and its gradient in stacked real coordinates
// (x_0..x_{d-1}, y_0..y_{d-1}) of the unconstrained extension.
double objective_value(const std::vector<ComplexMatrix>& constraints, const PureState& alpha);
std::vector<double> objective_gradient(const std::vector<ComplexMatrix>& constraints,
                                       const PureState& alpha);

// Seeded multi-restart projected gradient descent with a Gauss-Newton polish.
NumericResult numeric_minimize(const std::vector<ComplexMatrix>& constraints, std::size_t dim,
                               std::uint64_t seed, const NumericOptions& options);

// Shared memo of sub-certificates; pass one cache across a campaign so
// repeated projected sub-instances are solved once.  Thread-safe.
struct SolveCache;
std::shared_ptr<SolveCache> make_solve_cache();

Certificate solve(const DiscriminationInstance& inst, int budget = 64, std::uint64_t seed = 1,
                  const std::shared_ptr<SolveCache>& cache = nullptr);

}  // namespace twistdisc
