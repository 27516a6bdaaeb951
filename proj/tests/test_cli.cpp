// End-to-end command-line tests, run against the installed binary as a
// subprocess.  TWISTDISC_BIN is injected by the build system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "twistdisc/linalg.hpp"
#include "twistdisc/operators.hpp"

#ifndef TWISTDISC_BIN
#error "TWISTDISC_BIN must point at the CLI binary"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI through the shell with stderr discarded and stdout captured.
CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("TWISTDISC_CACHE=cli_test_cache ") + TWISTDISC_BIN + " " +
                          args + " 2>/dev/null";
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

nlohmann::json parse(const CliResult& res) { return nlohmann::json::parse(res.output); }

}  // namespace

TEST_CASE("gen-basis emits a parseable, deterministic basis document") {
  const CliResult a = run_cli("gen-basis --family gbs --dim 3 --json-only");
  REQUIRE(a.exit_code == 0);
  const nlohmann::json j = parse(a);
  CHECK(j.at("family") == "gbs");
  CHECK(j.at("dim") == 3);
  CHECK(j.at("labels").size() == 9);
  CHECK(j.at("matrices").size() == 9);
  CHECK(j.at("labels")[0] == "(0,0)");

  const CliResult b = run_cli("gen-basis --family gbs --dim 3 --json-only");
  CHECK(a.output == b.output);

  const CliResult lat = run_cli("gen-basis --family lattice --dim 6 --json-only");
  REQUIRE(lat.exit_code == 0);
  CHECK(parse(lat).at("labels").size() == 36);
}

TEST_CASE("gen-basis matrix entries survive the JSON round trip bit for bit") {
  const CliResult res = run_cli("gen-basis --family gbs --dim 3 --json-only");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json j = parse(res);
  // Element 1 is the clock operator; its entries are cube roots of unity,
  // which have no finite decimal representation.
  const nlohmann::json& clock = j.at("matrices")[1];
  const twistdisc::ComplexMatrix want = twistdisc::build_clock(3).matrix;
  REQUIRE(clock.at("rows") == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double re = clock.at("re")[r * 3 + c].get<double>();
      const double im = clock.at("im")[r * 3 + c].get<double>();
      CHECK(re == want(r, c).real());
      CHECK(im == want(r, c).imag());
    }
  }
}

TEST_CASE("gen-basis output round-trips through check-twist") {
  namespace fs = std::filesystem;
  fs::remove("cli_basis.json");
  const CliResult gen = run_cli("gen-basis --family gbs --dim 3 --out cli_basis.json --json-only");
  REQUIRE(gen.exit_code == 0);
  REQUIRE(fs::exists("cli_basis.json"));

  const CliResult chk = run_cli("check-twist --in cli_basis.json --json-only");
  CHECK(chk.exit_code == 0);
  const nlohmann::json j = parse(chk);
  CHECK(j.at("is_twist") == true);
  CHECK(j.at("orthogonal") == true);
  CHECK(j.at("phases").at("rows") == 9);
  fs::remove("cli_basis.json");
}

TEST_CASE("check-twist rejects malformed input with the data exit code") {
  const CliResult res = run_cli("check-twist --in '{\"family\": 3}' --json-only");
  CHECK(res.exit_code == 65);
}

TEST_CASE("teleport reports the branch table and an optional sampled outcome") {
  const std::string state = "'{\"rows\":2,\"cols\":1,\"re\":[1,0],\"im\":[0,0]}'";
  const CliResult res =
      run_cli("teleport --family gbs --dim 2 --resource 0 --state " + state + " --json-only");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json j = parse(res);
  REQUIRE(j.at("branches").size() == 4);
  double total = 0.0;
  for (const auto& br : j.at("branches")) total += br.at("probability").get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(j.contains("sampled_outcome"));

  const CliResult sampled = run_cli("teleport --family gbs --dim 2 --resource 0 --state " +
                                    state + " --seed 5 --json-only");
  REQUIRE(sampled.exit_code == 0);
  CHECK(parse(sampled).contains("sampled_outcome"));

  // A second run with the same seed draws the same outcome.
  const CliResult again = run_cli("teleport --family gbs --dim 2 --resource 0 --state " + state +
                                  " --seed 5 --json-only");
  CHECK(parse(sampled).at("sampled_outcome") == parse(again).at("sampled_outcome"));
}

TEST_CASE("discriminate exit codes mirror the verdict") {
  const CliResult yes =
      run_cli("discriminate --family gbs --dim 3 --labels '(0,0);(1,0);(2,0)' --json-only");
  CHECK(yes.exit_code == 0);
  CHECK(parse(yes).at("certificate").at("verdict") == "YES");

  const CliResult no =
      run_cli("discriminate --family gbs --dim 2 --labels '(0,0);(1,0);(0,1)' --json-only");
  CHECK(no.exit_code == 1);
  const nlohmann::json jno = parse(no);
  CHECK(jno.at("certificate").at("verdict") == "NO");
  CHECK(jno.at("certificate").at("proof_tag") == "bloch_qubit");

  // Over-packed qutrit set exhausts a small budget: UNKNOWN.
  const CliResult unk = run_cli(
      "discriminate --family gbs --dim 3 --labels '(0,0);(0,1);(1,0);(1,1);(2,2)' "
      "--budget 4 --json-only");
  CHECK(unk.exit_code == 2);
  CHECK(parse(unk).at("certificate").at("verdict") == "UNKNOWN");

  const CliResult dual =
      run_cli("discriminate --family gbs --dim 3 --labels '(0,0);(1,0)' --transpose --json-only");
  CHECK(dual.exit_code == 0);
  CHECK(parse(dual).at("config").at("transpose") == true);

  // Lattice labels use the factored grammar.
  const CliResult lat = run_cli(
      "discriminate --family lattice --dim 6 "
      "--labels '2^1:[1]/[0]*3^1:[0]/[0];2^1:[0]/[0]*3^1:[0]/[1]' --json-only");
  CHECK(lat.exit_code == 0);
  CHECK(parse(lat).at("certificate").at("verdict") == "YES");
}

TEST_CASE("usage and data errors are distinguished") {
  CHECK(run_cli("discriminate --family gbs --dim 3 --labels '(9,9);(0,0)' --json-only")
            .exit_code == 65);
  CHECK(run_cli("discriminate --family gbs --dim 3 --labels 'garbage' --json-only").exit_code ==
        65);
  CHECK(run_cli("discriminate --family gbs --labels '(0,0);(1,0)'").exit_code == 64);  // no dim
  CHECK(run_cli("--definitely-not-a-flag").exit_code == 64);
  CHECK(run_cli("bogus-subcommand").exit_code == 64);
  CHECK(run_cli("verify --theorem 9 --dim 3").exit_code == 64);
  CHECK(run_cli("verify --theorem 3 --dim 7").exit_code == 64);        // missing --l
  CHECK(run_cli("verify --theorem 3 --dim 7 --l 5").exit_code == 64);  // bound violated
  CHECK(run_cli("verify --theorem 4 --dim 3 --l 4").exit_code == 64);  // l fixed at 3
}

TEST_CASE("verify emits a campaign report and an assertion-aware exit code") {
  const CliResult res = run_cli("verify --theorem 4 --dim 3 --no-cache --json-only");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json j = parse(res);
  CHECK(j.at("campaign") == "three_states-d3-l3");
  CHECK(j.at("counts").at("total") == 84);
  CHECK(j.at("counts").at("yes") == 84);
  CHECK(j.contains("tag_counts"));
  CHECK(j.contains("wall_ms"));
  CHECK(j.at("config").at("seed") == 1);

  // Same run through the cache gives an identical report modulo wall time.
  const CliResult c1 = run_cli("verify --theorem 4 --dim 3 --json-only");
  const CliResult c2 = run_cli("verify --theorem 4 --dim 3 --json-only");
  nlohmann::json a = parse(c1);
  nlohmann::json b = parse(c2);
  a["wall_ms"] = 0;
  b["wall_ms"] = 0;
  CHECK(a.dump() == b.dump());
}

TEST_CASE("scan-pl accepts both range and list dimension syntax") {
  const CliResult range = run_cli("scan-pl --l 3 --dims 2..3 --no-cache --json-only");
  REQUIRE(range.exit_code == 0);
  CHECK(parse(range).at("rows").size() == 2);

  const CliResult list = run_cli("scan-pl --l 2 --dims '2;4' --no-cache --json-only");
  REQUIRE(list.exit_code == 0);
  const nlohmann::json j = parse(list);
  REQUIRE(j.at("rows").size() == 2);
  CHECK(j.at("rows")[1].at("dim") == 4);
  CHECK(j.at("rows")[1].at("yes") == j.at("rows")[1].at("total"));
}

TEST_CASE("--out writes the JSON document to a file") {
  namespace fs = std::filesystem;
  fs::remove("cli_cert.json");
  const CliResult res = run_cli(
      "discriminate --family gbs --dim 3 --labels '(0,0);(1,0)' --out cli_cert.json --json-only");
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists("cli_cert.json"));
  std::ifstream in("cli_cert.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("certificate").at("verdict") == "YES");
  fs::remove("cli_cert.json");
}
