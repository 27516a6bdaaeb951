#include "twistdisc/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistdisc/discrimination.hpp"
#include "twistdisc/json_io.hpp"
#include "twistdisc/operators.hpp"
#include "twistdisc/protocol.hpp"
#include "twistdisc/teleport.hpp"
#include "twistdisc/version.hpp"

namespace twistdisc {

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << j.dump(2) << '\n';
}

void note(bool json_only, const std::string& line) {
  if (!json_only) std::cerr << line << '\n';
}

MesBasis basis_for(const std::string& family, std::size_t dim, bool with_twist) {
  if (family == "gbs") return make_gbs_basis(dim, with_twist);
  if (family == "lattice") return make_lattice_basis(dim, with_twist);
  throw std::invalid_argument("unknown basis family: " + family + " (expected gbs or lattice)");
}

std::vector<std::size_t> indices_from_labels(const std::string& family, std::size_t dim,
                                             const std::string& labels) {
  std::vector<std::size_t> out;
  for (const auto& item : split_label_list(labels)) {
    if (family == "gbs")
      out.push_back(gbs_index_of(parse_gbs_label(item, dim)));
    else if (family == "lattice")
      out.push_back(lattice_index_of(parse_lattice_label(item, dim)));
    else
      throw std::invalid_argument("unknown basis family: " + family);
  }
  return out;
}

nlohmann::json basis_to_json(const MesBasis& basis) {
  nlohmann::json matrices = nlohmann::json::array();
  for (const auto& u : basis.unitaries) matrices.push_back(matrix_to_json(u.matrix));
  return {{"family", basis.family},
          {"dim", basis.dim},
          {"labels", basis.labels},
          {"matrices", matrices}};
}

// Accepts the gen-basis schema: dim + matrices required, rest optional.
struct ParsedBasis {
  std::size_t dim = 0;
  std::string family = "generic";
  std::vector<std::string> labels;
  std::vector<UnitaryMatrix> unitaries;
};

ParsedBasis basis_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("matrices") || !j["matrices"].is_array())
    throw std::runtime_error("basis JSON must be an object with a 'matrices' array");
  ParsedBasis b;
  b.family = j.value("family", std::string{"generic"});
  for (const auto& m : j["matrices"]) b.unitaries.push_back(make_verified_unitary(matrix_from_json(m)));
  if (b.unitaries.empty()) throw std::runtime_error("basis JSON contains no matrices");
  b.dim = b.unitaries.front().dim();
  for (const auto& u : b.unitaries)
    if (u.dim() != b.dim) throw std::runtime_error("basis JSON mixes matrix dimensions");
  if (j.contains("labels")) {
    for (const auto& s : j["labels"]) b.labels.push_back(s.get<std::string>());
    if (b.labels.size() != b.unitaries.size())
      throw std::runtime_error("basis JSON label count does not match matrix count");
  }
  if (j.contains("dim") && j["dim"].get<std::size_t>() != b.dim)
    throw std::runtime_error("basis JSON 'dim' does not match the matrices");
  return b;
}

// --state accepts inline JSON (leading '{') or a file path; "-" reads stdin.
nlohmann::json load_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return nlohmann::json::parse(arg);
  if (arg == "-") return nlohmann::json::parse(std::cin);
  std::ifstream f(arg);
  if (!f) throw std::runtime_error("cannot open input file: " + arg);
  return nlohmann::json::parse(f);
}

int exit_code_for(const Certificate& cert) {
  switch (cert.verdict) {
    case Verdict::yes: return kExitYes;
    case Verdict::no: return kExitNo;
    case Verdict::unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"twistdisc: twist-teleportation and entangled-state discrimination toolkit"};
  app.require_subcommand(1);
  bool json_only = false;
  app.add_flag("--json-only", json_only, "suppress the human-readable summary on stderr");

  // ---- gen-basis ----
  auto* gen = app.add_subcommand("gen-basis", "emit a maximally-entangled unitary basis as JSON");
  std::string gen_family = "gbs";
  std::size_t gen_dim = 0;
  std::string gen_out;
  gen->add_option("--family", gen_family, "gbs | lattice")->capture_default_str();
  gen->add_option("--dim", gen_dim, "local dimension d (basis has d^2 elements)")->required();
  gen->add_option("--out", gen_out, "write JSON here instead of stdout");

  // ---- check-twist ----
  auto* chk = app.add_subcommand("check-twist", "verify twist commutativity of a basis JSON");
  std::string chk_in = "-";
  std::string chk_out;
  double chk_tol = tol::ortho;
  chk->add_option("--in", chk_in, "basis JSON file ('-' for stdin)")->capture_default_str();
  chk->add_option("--pair-tolerance", chk_tol, "per-pair phase tolerance")->capture_default_str();
  chk->add_option("--out", chk_out, "write JSON here instead of stdout");

  // ---- teleport ----
  auto* tel = app.add_subcommand("teleport", "expand all branches of one teleportation");
  std::string tel_family = "gbs";
  std::size_t tel_dim = 0;
  std::size_t tel_resource = 0;
  std::string tel_state;
  std::string tel_out;
  std::uint64_t tel_seed = 0;
  tel->add_option("--family", tel_family, "gbs | lattice")->capture_default_str();
  tel->add_option("--dim", tel_dim, "local dimension d")->required();
  tel->add_option("--resource", tel_resource, "basis index of the shared entangled state")
      ->required();
  tel->add_option("--state", tel_state, "state to teleport: inline JSON, file path, or '-'")
      ->required();
  auto* tel_seed_opt = tel->add_option("--seed", tel_seed, "also sample one outcome");
  tel->add_option("--out", tel_out, "write JSON here instead of stdout");

  // ---- discriminate ----
  auto* dis = app.add_subcommand("discriminate",
                                 "decide one-way distinguishability of basis states");
  std::string dis_family = "gbs";
  std::size_t dis_dim = 0;
  std::string dis_labels;
  std::string dis_out;
  int dis_budget = 64;
  std::uint64_t dis_seed = 1;
  bool dis_transpose = false;
  dis->add_option("--family", dis_family, "gbs | lattice")->capture_default_str();
  dis->add_option("--dim", dis_dim, "local dimension d")->required();
  dis->add_option("--labels", dis_labels,
                  "semicolon-separated state labels, e.g. \"(0,0);(1,0);(0,1)\"")
      ->required();
  dis->add_option("--budget", dis_budget, "numeric restart budget")->capture_default_str();
  dis->add_option("--seed", dis_seed, "solver seed")->capture_default_str();
  dis->add_flag("--transpose", dis_transpose,
                "solve the transposed subset (protocol convention)");
  dis->add_option("--out", dis_out, "write JSON here instead of stdout");

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "run a theorem verification campaign");
  int ver_theorem = 0;
  std::size_t ver_dim = 0;
  std::size_t ver_l = 0;
  std::size_t ver_samples = 300;
  int ver_budget = 64;
  std::uint64_t ver_seed = 1;
  bool ver_full = false;
  bool ver_no_cache = false;
  std::string ver_cache_dir;
  std::string ver_out;
  ver->add_option("--theorem", ver_theorem, "3 (bounded l), 4 (three states), 5 (four states)")
      ->required();
  ver->add_option("--dim", ver_dim, "local dimension d")->required();
  ver->add_option("--l", ver_l, "subset size (theorem 3 only)");
  ver->add_option("--samples", ver_samples, "sample count when not exhaustive")
      ->capture_default_str();
  ver->add_option("--budget", ver_budget, "numeric restart budget")->capture_default_str();
  ver->add_option("--seed", ver_seed, "campaign seed")->capture_default_str();
  ver->add_flag("--full", ver_full, "embed per-instance records in the report");
  ver->add_flag("--no-cache", ver_no_cache, "bypass the report cache");
  ver->add_option("--cache-dir", ver_cache_dir, "report cache directory");
  ver->add_option("--out", ver_out, "write JSON here instead of stdout");

  // ---- scan-pl ----
  auto* scan = app.add_subcommand("scan-pl", "evidence table for l-subset distinguishability");
  std::size_t scan_l = 0;
  std::string scan_dims;
  std::size_t scan_samples = 200;
  int scan_budget = 64;
  std::uint64_t scan_seed = 1;
  bool scan_no_cache = false;
  std::string scan_cache_dir;
  std::string scan_out;
  scan->add_option("--l", scan_l, "subset size")->required();
  scan->add_option("--dims", scan_dims, "dimension range 'a..b' or list 'a;b;c'")->required();
  scan->add_option("--samples", scan_samples, "sample count when not exhaustive")
      ->capture_default_str();
  scan->add_option("--budget", scan_budget, "numeric restart budget")->capture_default_str();
  scan->add_option("--seed", scan_seed, "campaign seed")->capture_default_str();
  scan->add_flag("--no-cache", scan_no_cache, "bypass the report cache");
  scan->add_option("--cache-dir", scan_cache_dir, "report cache directory");
  scan->add_option("--out", scan_out, "write JSON here instead of stdout");

  for (CLI::App* sc : {gen, chk, tel, dis, ver, scan}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(gen)) {
      const MesBasis basis = basis_for(gen_family, gen_dim, /*with_twist=*/false);
      nlohmann::json j = basis_to_json(basis);
      j["schema_version"] = kSchemaVersion;
      j["version"] = kVersion;
      j["config"] = {{"subcommand", "gen-basis"}, {"family", gen_family}, {"dim", gen_dim}};
      emit_json(j, gen_out);
      note(json_only, "gen-basis: " + std::to_string(basis.unitaries.size()) + " matrices at d=" +
                          std::to_string(gen_dim));
      return kExitYes;
    }

    if (app.got_subcommand(chk)) {
      const nlohmann::json input = load_json_arg(chk_in);
      const ParsedBasis basis = basis_from_json(input);
      std::vector<UnitaryMatrix> us = basis.unitaries;
      const TwistPhaseTable table = twist_table(us, chk_tol);
      ComplexMatrix phase_matrix(table.size, table.size);
      phase_matrix.entries = table.phases;
      nlohmann::json pair_ok = nlohmann::json::array();
      for (std::size_t i = 0; i < table.size; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < table.size; ++j) row.push_back(table.pair_ok[i * table.size + j]);
        pair_ok.push_back(std::move(row));
      }
      nlohmann::json j = {
          {"schema_version", kSchemaVersion},
          {"version", kVersion},
          {"config",
           {{"subcommand", "check-twist"}, {"pair_tolerance", chk_tol}, {"family", basis.family}}},
          {"dim", basis.dim},
          {"size", table.size},
          {"orthogonal", table.orthogonal},
          {"is_twist", table.is_twist},
          {"note", table.note},
          {"phases", matrix_to_json(phase_matrix)},
          {"pair_ok", pair_ok},
      };
      emit_json(j, chk_out);
      note(json_only, std::string("check-twist: is_twist=") + (table.is_twist ? "true" : "false"));
      return table.is_twist ? kExitYes : kExitNo;
    }

    if (app.got_subcommand(tel)) {
      const MesBasis basis = basis_for(tel_family, tel_dim, /*with_twist=*/false);
      const PureState psi = state_from_json(load_json_arg(tel_state));
      const BranchTable table = expand_teleport(psi, basis, tel_resource);
      nlohmann::json branches = nlohmann::json::array();
      for (const auto& b : table.branches) {
        branches.push_back({{"outcome", b.outcome},
                            {"label", basis.labels[b.outcome]},
                            {"probability", b.probability},
                            {"bob_state", state_to_json(b.bob_state)}});
      }
      nlohmann::json j = {
          {"schema_version", kSchemaVersion},
          {"version", kVersion},
          {"config",
           {{"subcommand", "teleport"},
            {"family", tel_family},
            {"dim", tel_dim},
            {"resource", tel_resource}}},
          {"resource_label", basis.labels[table.resource_index]},
          {"branches", branches},
      };
      if (tel_seed_opt->count() > 0) {
        j["config"]["seed"] = tel_seed;
        j["sampled_outcome"] = sample_measurement(table, tel_seed);
      }
      emit_json(j, tel_out);
      note(json_only,
           "teleport: " + std::to_string(table.branches.size()) + " branches over resource " +
               basis.labels[table.resource_index]);
      return kExitYes;
    }

    if (app.got_subcommand(dis)) {
      const MesBasis basis = basis_for(dis_family, dis_dim, /*with_twist=*/false);
      const auto indices = indices_from_labels(dis_family, dis_dim, dis_labels);
      DiscriminationInstance inst = instance_from_basis(basis, indices);
      if (dis_transpose) inst = transpose_dual(inst);
      const Certificate cert = solve(inst, dis_budget, dis_seed);
      nlohmann::json j = {
          {"schema_version", kSchemaVersion},
          {"version", kVersion},
          {"config",
           {{"subcommand", "discriminate"},
            {"family", dis_family},
            {"dim", dis_dim},
            {"labels", dis_labels},
            {"transpose", dis_transpose},
            {"budget", dis_budget},
            {"seed", dis_seed}}},
          {"resolved_labels", inst.labels},
          {"indices", indices},
          {"certificate", certificate_to_json(cert)},
      };
      emit_json(j, dis_out);
      std::ostringstream line;
      line << "discriminate: " << to_string(cert.verdict);
      if (cert.proof_tag) line << " (proof: " << to_string(*cert.proof_tag);
      if (cert.residual) line << ", residual " << *cert.residual;
      if (cert.proof_tag) line << ")";
      note(json_only, line.str());
      return exit_code_for(cert);
    }

    if (app.got_subcommand(ver)) {
      CampaignOptions opt;
      opt.samples = ver_samples;
      opt.budget = ver_budget;
      opt.seed = ver_seed;
      opt.full_records = ver_full;
      opt.use_cache = !ver_no_cache;
      opt.cache_dir = ver_cache_dir;
      CampaignOutcome outcome;
      if (ver_theorem == 3) {
        if (ver->count("--l") == 0) {
          std::cerr << "verify --theorem 3 requires --l" << '\n';
          return kExitUsage;
        }
        const auto factors = factorize(ver_dim);
        if (ver_l < 2 || ver_l * (ver_l - 1) > 2 * factors.front().value) {
          std::cerr << "verify: l(l-1) must not exceed twice the smallest prime-power factor"
                    << '\n';
          return kExitUsage;
        }
        outcome = verify_theorem3(ver_dim, ver_l, opt);
      } else if (ver_theorem == 4) {
        if (ver->count("--l") > 0 && ver_l != 3) {
          std::cerr << "verify --theorem 4 fixes l = 3" << '\n';
          return kExitUsage;
        }
        outcome = verify_three_states(ver_dim, opt);
      } else if (ver_theorem == 5) {
        if (ver->count("--l") > 0 && ver_l != 4) {
          std::cerr << "verify --theorem 5 fixes l = 4" << '\n';
          return kExitUsage;
        }
        outcome = verify_four_states(ver_dim, opt);
      } else {
        std::cerr << "verify: --theorem must be 3, 4, or 5" << '\n';
        return kExitUsage;
      }
      emit_json(outcome.report, ver_out);
      const auto& counts = outcome.report["counts"];
      std::ostringstream line;
      line << outcome.report["campaign"].get<std::string>() << ": "
           << counts["yes"].get<std::size_t>() << "/" << counts["total"].get<std::size_t>()
           << " YES" << (outcome.from_cache ? " (cached)" : "");
      note(json_only, line.str());
      const bool asserted = outcome.report.value("guarantee_asserted", true);
      if (asserted && !outcome.all_yes)
        return counts["no"].get<std::size_t>() > 0 ? kExitNo : kExitUnknown;
      return kExitYes;
    }

    if (app.got_subcommand(scan)) {
      std::vector<std::size_t> dims;
      const auto range_pos = scan_dims.find("..");
      if (range_pos != std::string::npos) {
        const std::size_t lo = std::stoul(scan_dims.substr(0, range_pos));
        const std::size_t hi = std::stoul(scan_dims.substr(range_pos + 2));
        if (hi < lo) throw std::invalid_argument("scan-pl: empty dimension range");
        for (std::size_t d = lo; d <= hi; ++d) dims.push_back(d);
      } else {
        std::string item;
        std::istringstream ss(scan_dims);
        while (std::getline(ss, item, ';'))
          if (!item.empty()) dims.push_back(std::stoul(item));
      }
      CampaignOptions opt;
      opt.samples = scan_samples;
      opt.budget = scan_budget;
      opt.seed = scan_seed;
      opt.use_cache = !scan_no_cache;
      opt.cache_dir = scan_cache_dir;
      const CampaignOutcome outcome = scan_pl(scan_l, dims, opt);
      emit_json(outcome.report, scan_out);
      note(json_only, "scan-pl: " + std::to_string(dims.size()) + " dimensions scanned" +
                          (outcome.from_cache ? " (cached)" : ""));
      return kExitYes;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace twistdisc
