#include "twistdisc/protocol.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "twistdisc/linalg.hpp"
#include "twistdisc/rng.hpp"
#include "twistdisc/version.hpp"

namespace twistdisc {

namespace {

// ---------------------------------------------------------------------------
// Protocol internals
// ---------------------------------------------------------------------------

std::size_t locate_in_basis(const MesBasis& basis, const ComplexMatrix& u) {
  for (std::size_t i = 0; i < basis.unitaries.size(); ++i) {
    if (max_abs_diff(basis.unitaries[i].matrix, u) <= 1e-9) return i;
  }
  throw std::invalid_argument("protocol: subset state is not an element of the basis");
}

void require_twist_basis(const MesBasis& basis) {
  if (!basis.twist || !basis.twist->is_twist)
    throw std::invalid_argument(
        "protocol: refusing to run on a basis without verified twist commutativity");
}

void require_transposed_certificate(const DiscriminationInstance& subset,
                                    const Certificate& cert) {
  if (cert.verdict != Verdict::yes || !cert.alpha)
    throw std::invalid_argument("protocol: certificate must be YES with a witness vector");
  const double residual = verify_certificate(transpose_dual(subset), *cert.alpha);
  if (residual > tol::cert) {
    std::ostringstream os;
    os << "protocol: certificate does not verify on the transposed subset (residual " << residual
       << ")";
    throw std::invalid_argument(os.str());
  }
}

// Bob's projective set for Alice outcome i: {Uᵀ U_i† α}_{U in subset}.
std::vector<std::vector<cd>> bob_vectors(const MesBasis& basis,
                                         const DiscriminationInstance& subset,
                                         const PureState& alpha, std::size_t outcome) {
  const std::size_t d = basis.dim;
  const ComplexMatrix mi = adjoint(basis.unitaries[outcome].matrix);
  std::vector<cd> gamma(d);
  for (std::size_t r = 0; r < d; ++r) {
    cd acc{0.0, 0.0};
    for (std::size_t c = 0; c < d; ++c) acc += mi(r, c) * alpha.amplitudes[c];
    gamma[r] = acc;
  }
  std::vector<std::vector<cd>> out;
  for (const auto& u : subset.unitaries) {
    std::vector<cd> m(d, cd{0.0, 0.0});
    // (Uᵀ γ)_r = Σ_c U(c, r) γ_c
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t r = 0; r < d; ++r) m[r] += u.matrix(c, r) * gamma[c];
    out.push_back(std::move(m));
  }
  return out;
}

double gram_defect(const std::vector<std::vector<cd>>& vecs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i; j < vecs.size(); ++j) {
      cd g{0.0, 0.0};
      for (std::size_t r = 0; r < vecs[i].size(); ++r) g += std::conj(vecs[i][r]) * vecs[j][r];
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - cd{target, 0.0}));
    }
  }
  return worst;
}

std::size_t best_overlap(const std::vector<std::vector<cd>>& vecs, const PureState& state) {
  std::size_t guess = 0;
  double best = -1.0;
  for (std::size_t h = 0; h < vecs.size(); ++h) {
    cd g{0.0, 0.0};
    for (std::size_t r = 0; r < vecs[h].size(); ++r)
      g += std::conj(vecs[h][r]) * state.amplitudes[r];
    const double overlap = std::norm(g);
    if (overlap > best + 1e-15) {  // ties resolve to the lowest index
      best = overlap;
      guess = h;
    }
  }
  return guess;
}

// ---------------------------------------------------------------------------
// Campaign plumbing
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64_str(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

std::uint64_t subsets_count_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  std::uint64_t c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    // c * (n - i) / (i + 1), watching the cap to avoid overflow
    if (c > (cap + 1) * (i + 1) / (n - i) + 1) return cap + 1;
    c = c * (n - i) / (i + 1);
    if (c > cap) return cap + 1;
  }
  return c;
}

struct PlannedInstance {
  std::vector<std::size_t> indices;
  std::string stratum;
};

struct CampaignPlan {
  nlohmann::json meta;
  std::vector<PlannedInstance> instances;
};

void enumerate_subsets(std::size_t n, std::size_t k, std::vector<PlannedInstance>& out) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back({idx, "exhaustive"});
    std::size_t pos = k;
    while (pos-- > 0) {
      if (idx[pos] != pos + n - k) break;
      if (pos == 0) return;
    }
    if (idx[pos] == pos + n - k) return;
    ++idx[pos];
    for (std::size_t t = pos + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

std::vector<std::size_t> draw_distinct(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::set<std::size_t> chosen;
  while (chosen.size() < k) chosen.insert(static_cast<std::size_t>(rand_below(rng, n)));
  return {chosen.begin(), chosen.end()};
}

void sample_uniform(std::size_t n, std::size_t k, std::size_t count, std::uint64_t seed,
                    std::vector<PlannedInstance>& out) {
  std::mt19937_64 rng(seed);
  std::set<std::vector<std::size_t>> seen;
  std::size_t attempts = 0;
  const std::size_t cap = 1000 * count + 1000;
  while (seen.size() < count) {
    if (++attempts > cap)
      throw std::runtime_error("campaign: sampling could not reach the requested count");
    auto pick = draw_distinct(rng, n, k);
    if (seen.insert(pick).second) out.push_back({pick, "uniform"});
  }
}

// Stratified plan for 4-subsets of the d = 2p lattice basis (p >= 7 prime).
// Elements index as a * p^2 + v with a the qubit digit pair and v the prime
// digit pair; strata are defined by the multiset of v-values, which is what
// decides the proof route (constant factor / entangled 2p vector / products).
struct FourStateStratum {
  std::string name;
  std::size_t quota;
};

constexpr std::array<std::array<std::size_t, 2>, 6> kQubitPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::vector<PlannedInstance> sample_stratified_2p(std::uint64_t p, std::size_t total,
                                                  std::uint64_t seed,
                                                  std::vector<FourStateStratum>& strata_out) {
  const std::size_t v_count = static_cast<std::size_t>(p) * p;
  std::vector<FourStateStratum> strata = {
      {"v_classes_1", total * 10 / 100},
      {"v_classes_2_split_3_1", total * 27 / 100},
      {"v_classes_2_split_2_2", total * 13 / 100},
      {"v_classes_3", total * 20 / 100},
      {"v_classes_4", 0},
  };
  std::size_t assigned = 0;
  if (strata[0].quota > v_count) strata[0].quota = v_count;  // only p^2 such subsets exist
  for (std::size_t s = 0; s + 1 < strata.size(); ++s) assigned += strata[s].quota;
  strata[4].quota = (total > assigned) ? total - assigned : 0;

  std::vector<PlannedInstance> plan;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    std::mt19937_64 rng(derive_seed(seed, 0xA000 + s));
    std::set<std::vector<std::size_t>> seen;
    std::size_t attempts = 0;
    const std::size_t cap = 2000 * strata[s].quota + 2000;
    while (seen.size() < strata[s].quota) {
      if (++attempts > cap)
        throw std::runtime_error("campaign: stratified sampling exhausted its attempt budget");
      std::vector<std::size_t> indices;
      switch (s) {
        case 0: {  // one v-class: all four qubit digits on a common v
          const std::size_t v = rand_below(rng, v_count);
          for (std::size_t a = 0; a < 4; ++a) indices.push_back(a * v_count + v);
          break;
        }
        case 1: {  // two v-classes split 3 + 1
          const std::size_t v1 = rand_below(rng, v_count);
          std::size_t v2 = rand_below(rng, v_count - 1);
          if (v2 >= v1) ++v2;
          const std::size_t skip = rand_below(rng, 4);
          for (std::size_t a = 0; a < 4; ++a)
            if (a != skip) indices.push_back(a * v_count + v1);
          indices.push_back(rand_below(rng, 4) * v_count + v2);
          break;
        }
        case 2: {  // two v-classes split 2 + 2
          const std::size_t v1 = rand_below(rng, v_count);
          std::size_t v2 = rand_below(rng, v_count - 1);
          if (v2 >= v1) ++v2;
          const auto& p1 = kQubitPairs[rand_below(rng, 6)];
          const auto& p2 = kQubitPairs[rand_below(rng, 6)];
          indices = {p1[0] * v_count + v1, p1[1] * v_count + v1, p2[0] * v_count + v2,
                     p2[1] * v_count + v2};
          break;
        }
        case 3: {  // three v-classes (one doubled)
          auto vs = draw_distinct(rng, v_count, 3);
          const std::size_t doubled = rand_below(rng, 3);
          const auto& pr = kQubitPairs[rand_below(rng, 6)];
          indices = {pr[0] * v_count + vs[doubled], pr[1] * v_count + vs[doubled]};
          for (std::size_t t = 0; t < 3; ++t)
            if (t != doubled) indices.push_back(rand_below(rng, 4) * v_count + vs[t]);
          break;
        }
        default: {  // four distinct v-classes
          auto vs = draw_distinct(rng, v_count, 4);
          for (std::size_t v : vs) indices.push_back(rand_below(rng, 4) * v_count + v);
          break;
        }
      }
      std::sort(indices.begin(), indices.end());
      if (seen.insert(indices).second) plan.push_back({indices, strata[s].name});
    }
  }
  strata_out = strata;
  return plan;
}

// d = 2p with p >= 7 prime: the only shape with a dedicated stratified plan.
std::optional<std::uint64_t> two_p_shape(std::size_t dim) {
  if (dim % 2 != 0) return std::nullopt;
  const std::uint64_t p = dim / 2;
  if (p >= 7 && is_prime(p)) return p;
  return std::nullopt;
}

CampaignPlan build_plan(std::size_t dim, std::size_t l, const CampaignOptions& opt,
                        bool allow_stratified) {
  CampaignPlan plan;
  const std::size_t n = dim * dim;
  const std::uint64_t count = subsets_count_capped(n, l, opt.exhaustive_limit);
  if (count <= opt.exhaustive_limit) {
    enumerate_subsets(n, l, plan.instances);
    plan.meta = {{"mode", "exhaustive"}, {"samples", plan.instances.size()}};
    return plan;
  }
  const auto p = allow_stratified && l == 4 ? two_p_shape(dim) : std::nullopt;
  if (p) {
    std::vector<FourStateStratum> strata;
    plan.instances = sample_stratified_2p(*p, opt.samples, opt.seed, strata);
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : strata) sj.push_back({{"name", s.name}, {"quota", s.quota}});
    plan.meta = {{"mode", "sample"},
                 {"samples", plan.instances.size()},
                 {"stratified", true},
                 {"strata", sj}};
    return plan;
  }
  sample_uniform(n, l, opt.samples, derive_seed(opt.seed, 0xA00A), plan.instances);
  plan.meta = {{"mode", "sample"}, {"samples", plan.instances.size()}, {"stratified", false}};
  return plan;
}

// ---------------------------------------------------------------------------
// Report cache
// ---------------------------------------------------------------------------

std::filesystem::path cache_directory(const CampaignOptions& opt) {
  if (!opt.cache_dir.empty()) return opt.cache_dir;
  if (const char* env = std::getenv("TWISTDISC_CACHE"); env != nullptr && *env != '\0')
    return env;
  return ".twistdisc";
}

std::string config_key(const nlohmann::json& config) {
  std::ostringstream os;
  os << std::hex << fnv1a64_str(config.dump());
  return os.str();
}

std::optional<nlohmann::json> cache_load(const std::filesystem::path& dir,
                                         const std::string& key) {
  const auto path = dir / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // corrupt entry: recompute and overwrite
  }
}

void cache_store_report(const std::filesystem::path& dir, const std::string& key,
                        const nlohmann::json& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return;  // cache is best-effort
  const auto tmp = dir / (key + ".json.tmp");
  const auto final_path = dir / (key + ".json");
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << report.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, final_path, ec);
}

// ---------------------------------------------------------------------------
// Campaign core
// ---------------------------------------------------------------------------

struct TagStats {
  std::size_t count = 0;
  double max_residual = 0.0;
};

CampaignOutcome run_campaign(const std::string& kind, std::size_t dim, std::size_t l,
                             const CampaignOptions& opt, nlohmann::json extra,
                             bool allow_stratified) {
  CampaignPlan plan = build_plan(dim, l, opt, allow_stratified);

  nlohmann::json config = {{"kind", kind},       {"dim", dim},
                           {"l", l},             {"budget", opt.budget},
                           {"seed", opt.seed},   {"full_records", opt.full_records},
                           {"plan", plan.meta},  {"basis_family", "lattice"}};
  for (auto& [k, v] : extra.items()) config[k] = v;
  const std::string key = config_key(config);
  const auto dir = cache_directory(opt);

  if (opt.use_cache) {
    if (auto cached = cache_load(dir, key)) {
      CampaignOutcome out;
      out.report = std::move(*cached);
      out.from_cache = true;
      out.all_yes = out.report.value("counts", nlohmann::json::object()).value("yes", 0ULL) ==
                    out.report.value("counts", nlohmann::json::object()).value("total", 1ULL);
      return out;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const MesBasis basis = make_lattice_basis(dim, /*with_twist=*/false);
  auto solve_cache = make_solve_cache();

  std::size_t yes = 0, no = 0, unknown = 0;
  double max_residual = 0.0;
  std::map<std::string, TagStats> tags;
  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json records = nlohmann::json::array();

  for (std::size_t idx = 0; idx < plan.instances.size(); ++idx) {
    const auto& pi = plan.instances[idx];
    const DiscriminationInstance inst = instance_from_basis(basis, pi.indices);
    const Certificate cert = solve(inst, opt.budget, derive_seed(opt.seed, idx), solve_cache);

    const char* verdict = to_string(cert.verdict);
    std::string tag = cert.proof_tag ? to_string(*cert.proof_tag) : "";
    if (cert.verdict == Verdict::yes) {
      ++yes;
      max_residual = std::max(max_residual, *cert.residual);
      auto& ts = tags[tag];
      ++ts.count;
      ts.max_residual = std::max(ts.max_residual, *cert.residual);
    } else if (cert.verdict == Verdict::no) {
      ++no;
    } else {
      ++unknown;
    }

    if (cert.verdict != Verdict::yes) {
      failures.push_back({{"indices", pi.indices},
                          {"labels", inst.labels},
                          {"stratum", pi.stratum},
                          {"verdict", verdict},
                          {"restarts_used", cert.restarts_used},
                          {"best_objective", cert.best_objective}});
    }
    if (opt.full_records) {
      nlohmann::json rec = {{"indices", pi.indices},
                            {"labels", inst.labels},
                            {"stratum", pi.stratum},
                            {"verdict", verdict}};
      if (cert.verdict == Verdict::yes) {
        rec["proof_tag"] = tag;
        rec["residual"] = *cert.residual;
      }
      records.push_back(std::move(rec));
    }
  }
  const auto t1 = std::chrono::steady_clock::now();

  nlohmann::json tag_counts = nlohmann::json::object();
  for (const auto& [name, ts] : tags)
    tag_counts[name] = {{"count", ts.count}, {"max_residual", ts.max_residual}};

  std::ostringstream id;
  id << kind << "-d" << dim << "-l" << l;

  nlohmann::json report = {
      {"schema_version", kSchemaVersion},
      {"version", kVersion},
      {"campaign", id.str()},
      {"kind", kind},
      {"config", config},
      {"plan", plan.meta},
      {"counts",
       {{"total", plan.instances.size()}, {"yes", yes}, {"no", no}, {"unknown", unknown}}},
      {"tag_counts", tag_counts},
      {"max_residual", max_residual},
      {"failures", failures},
      {"wall_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
  };
  for (auto& [k, v] : extra.items()) report[k] = v;
  if (opt.full_records) report["instances"] = records;

  if (opt.use_cache) cache_store_report(dir, key, report);

  CampaignOutcome out;
  out.report = std::move(report);
  out.all_yes = (yes == plan.instances.size());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Protocol (public)
// ---------------------------------------------------------------------------

ProtocolRun run_protocol(const MesBasis& basis, const DiscriminationInstance& subset,
                         const Certificate& cert, std::size_t hidden_index, std::uint64_t seed) {
  require_twist_basis(basis);
  validate_instance(subset);
  if (subset.dim != basis.dim) throw std::invalid_argument("protocol: dimension mismatch");
  if (hidden_index >= subset.size())
    throw std::invalid_argument("protocol: hidden index out of range");
  require_transposed_certificate(subset, cert);

  const std::size_t resource = locate_in_basis(basis, subset.unitaries[hidden_index].matrix);
  const BranchTable table = expand_teleport(*cert.alpha, basis, resource);
  const std::size_t outcome = sample_measurement(table, seed);

  const auto projectors = bob_vectors(basis, subset, *cert.alpha, outcome);
  const double gram = gram_defect(projectors);
  if (gram > 1e-8)
    throw std::runtime_error("protocol: Bob's measurement failed its orthonormality check");

  ProtocolRun run;
  run.instance = subset;
  run.certificate = cert;
  run.hidden_index = hidden_index;
  run.alice_outcome = outcome;
  run.bob_guess = best_overlap(projectors, table.branches[outcome].bob_state);
  run.correct = (run.bob_guess == hidden_index);
  run.bob_gram_error = gram;
  return run;
}

ProtocolAudit enumerate_protocol(const MesBasis& basis, const DiscriminationInstance& subset,
                                 const Certificate& cert) {
  require_twist_basis(basis);
  validate_instance(subset);
  if (subset.dim != basis.dim) throw std::invalid_argument("protocol: dimension mismatch");
  require_transposed_certificate(subset, cert);

  ProtocolAudit audit;
  const std::size_t d2 = basis.dim * basis.dim;
  // Bob's measurement depends only on Alice's outcome; compute each set once.
  std::vector<std::vector<std::vector<cd>>> projectors(d2);
  for (std::size_t i = 0; i < d2; ++i) {
    projectors[i] = bob_vectors(basis, subset, *cert.alpha, i);
    audit.max_gram_error = std::max(audit.max_gram_error, gram_defect(projectors[i]));
  }
  if (audit.max_gram_error > 1e-8)
    throw std::runtime_error("protocol: Bob's measurement failed its orthonormality check");

  for (std::size_t hidden = 0; hidden < subset.size(); ++hidden) {
    const std::size_t resource = locate_in_basis(basis, subset.unitaries[hidden].matrix);
    const BranchTable table = expand_teleport(*cert.alpha, basis, resource);
    for (std::size_t i = 0; i < d2; ++i) {
      const std::size_t guess = best_overlap(projectors[i], table.branches[i].bob_state);
      ++audit.cases;
      if (guess == hidden) ++audit.correct_cases;
    }
  }
  audit.all_correct = (audit.correct_cases == audit.cases);
  return audit;
}

// ---------------------------------------------------------------------------
// Campaigns (public)
// ---------------------------------------------------------------------------

const std::vector<std::size_t>& four_state_exception_dims() {
  static const std::vector<std::size_t> dims = {2,  3,  4,  5,  6,  10, 12,
                                                15, 18, 20, 30, 50, 60, 90};
  return dims;
}

CampaignOutcome verify_theorem3(std::size_t dim, std::size_t l, const CampaignOptions& opt) {
  if (dim < 2) throw std::invalid_argument("theorem3: dimension must be at least 2");
  if (l < 2) throw std::invalid_argument("theorem3: subset size must be at least 2");
  const auto factors = factorize(dim);
  const std::uint64_t smallest = factors.front().value;
  if (l * (l - 1) > 2 * smallest) {
    std::ostringstream os;
    os << "theorem3: bound violated: l(l-1) = " << l * (l - 1) << " exceeds 2*" << smallest;
    throw std::invalid_argument(os.str());
  }
  return run_campaign("theorem3", dim, l, opt,
                      {{"theorem", 3}, {"smallest_prime_power", smallest}},
                      /*allow_stratified=*/false);
}

CampaignOutcome verify_three_states(std::size_t dim, const CampaignOptions& opt) {
  if (dim < 3) throw std::invalid_argument("three-states: dimension must be at least 3");
  return run_campaign("three_states", dim, 3, opt, {{"theorem", 4}},
                      /*allow_stratified=*/false);
}

CampaignOutcome verify_four_states(std::size_t dim, const CampaignOptions& opt) {
  if (dim < 2) throw std::invalid_argument("four-states: dimension must be at least 2");
  const auto& exceptions = four_state_exception_dims();
  const bool exceptional =
      std::find(exceptions.begin(), exceptions.end(), dim) != exceptions.end();
  return run_campaign("four_states", dim, 4, opt,
                      {{"theorem", 5},
                       {"exception_dim", exceptional},
                       {"guarantee_asserted", !exceptional}},
                      /*allow_stratified=*/true);
}

CampaignOutcome scan_pl(std::size_t l, const std::vector<std::size_t>& dims,
                        const CampaignOptions& opt) {
  if (l < 2) throw std::invalid_argument("scan-pl: subset size must be at least 2");
  if (dims.empty()) throw std::invalid_argument("scan-pl: empty dimension list");
  for (std::size_t d : dims) {
    if (d < 2) throw std::invalid_argument("scan-pl: dimensions must be at least 2");
  }

  nlohmann::json config = {{"kind", "scan_pl"}, {"l", l},
                           {"dims", dims},      {"samples", opt.samples},
                           {"budget", opt.budget}, {"seed", opt.seed}};
  const std::string key = config_key(config);
  const auto dir = cache_directory(opt);
  if (opt.use_cache) {
    if (auto cached = cache_load(dir, key)) {
      CampaignOutcome out;
      out.report = std::move(*cached);
      out.from_cache = true;
      out.all_yes = true;
      for (const auto& row : out.report.value("rows", nlohmann::json::array()))
        if (!row.value("all_yes", false)) out.all_yes = false;
      return out;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json rows = nlohmann::json::array();
  bool all_yes = true;
  for (std::size_t d : dims) {
    CampaignOptions inner = opt;
    inner.use_cache = false;       // rows are aggregated; cache only the scan itself
    inner.full_records = false;
    CampaignOutcome sub = run_campaign("scan_pl_row", d, l, inner, {{"scan_l", l}},
                                       /*allow_stratified=*/false);
    const auto& counts = sub.report["counts"];
    rows.push_back({{"dim", d},
                    {"total", counts["total"]},
                    {"yes", counts["yes"]},
                    {"no", counts["no"]},
                    {"unknown", counts["unknown"]},
                    {"all_yes", sub.all_yes},
                    {"plan", sub.report["plan"]}});
    all_yes = all_yes && sub.all_yes;
  }
  const auto t1 = std::chrono::steady_clock::now();

  nlohmann::json report = {
      {"schema_version", kSchemaVersion},
      {"version", kVersion},
      {"campaign", "scan_pl-l" + std::to_string(l)},
      {"kind", "scan_pl"},
      {"config", config},
      {"rows", rows},
      {"wall_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
  };
  if (opt.use_cache) cache_store_report(dir, key, report);

  CampaignOutcome out;
  out.report = std::move(report);
  out.all_yes = all_yes;
  return out;
}

}  // namespace twistdisc
