#pragma once
/*
 * One-way LOCC discrimination protocol on a twist-commutative basis, and
 * seeded verification campaigns over subsets of the lattice basis.
 *
 * Protocol shape: the hidden state is a maximally entangled resource from the
 * basis; Alice teleports a certificate vector α through it and announces her
 * measurement outcome i; Bob projects onto {Uᵀ U_i† α}_{U in subset}, which
 * twist commutativity keeps orthonormal.  The certificate must be a YES
 * witness for the *transposed* subset — run_protocol re-verifies that before
 * simulating.
 *
 * Campaign reports are deterministic functions of their configuration
 * (modulo the wall_ms field) and can be cached on disk keyed by a content
 * hash of the configuration.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistdisc/discrimination.hpp"
#include "twistdisc/teleport.hpp"

namespace twistdisc {

struct ProtocolRun {
  DiscriminationInstance instance;  // states Bob must tell apart (untransposed)
  Certificate certificate;          // YES witness for the transposed subset
  std::size_t hidden_index = 0;     // position inside the subset
  std::size_t alice_outcome = 0;    // index into the measurement basis
  std::size_t bob_guess = 0;        // position inside the subset
  bool correct = false;
  double bob_gram_error = 0.0;      // orthonormality defect of Bob's projectors
};

ProtocolRun run_protocol(const MesBasis& basis, const DiscriminationInstance& subset,
                         const Certificate& cert, std::size_t hidden_index, std::uint64_t seed);

struct ProtocolAudit {
  std::size_t cases = 0;
  std::size_t correct_cases = 0;
  double max_gram_error = 0.0;
  bool all_correct = false;
};

// Every hidden state x every Alice outcome, no sampling.
ProtocolAudit enumerate_protocol(const MesBasis& basis, const DiscriminationInstance& subset,
                                 const Certificate& cert);

// ---------------------------------------------------------------------------
// Verification campaigns
// ---------------------------------------------------------------------------

struct CampaignOptions {
  std::size_t samples = 300;          // used when the subset space is too large
  std::size_t exhaustive_limit = 10000;  // enumerate fully at or below this count
  int budget = 64;                    // numeric restart budget per instance
  std::uint64_t seed = 1;
  bool full_records = false;          // embed per-instance records in the report
  bool use_cache = true;
  std::string cache_dir;              // empty: $TWISTDISC_CACHE or ./.twistdisc
};

struct CampaignOutcome {
  nlohmann::json report;
  bool from_cache = false;
  bool all_yes = false;
};

// l-subset campaign under the l(l-1) <= 2 * (smallest prime-power factor) bound.
CampaignOutcome verify_theorem3(std::size_t dim, std::size_t l, const CampaignOptions& opt);

// All 3-subsets (exhaustive up to the limit, sampled beyond); requires dim >= 3.
CampaignOutcome verify_three_states(std::size_t dim, const CampaignOptions& opt);

// 4-subset campaign; reports whether the all-YES guarantee is asserted for
// this dimension or merely recorded (see four_state_exception_dims).
CampaignOutcome verify_four_states(std::size_t dim, const CampaignOptions& opt);

// Evidence table over dimensions for a fixed subset size; never asserts.
CampaignOutcome scan_pl(std::size_t l, const std::vector<std::size_t>& dims,
                        const CampaignOptions& opt);

// Dimensions where the four-state guarantee is recorded without assertion.
const std::vector<std::size_t>& four_state_exception_dims();

}  // namespace twistdisc
