// Copyright 2026 The tiqs authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiqs/builtins.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tiqs-cli-test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_scratch(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  REQUIRE(out.good());
  return p;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_path = scratch_dir() / ("out" + std::to_string(++counter));
  const fs::path err_path = scratch_dir() / ("err" + std::to_string(counter));
  const std::string cmd = std::string(TIQS_CLI_PATH) + " " + args + " >" +
                          out_path.string() + " 2>" + err_path.string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  CliResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  return res;
}

size_t count_row_lines(const std::string& out) {
  size_t n = 0;
  std::istringstream ss(out);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] == '(') ++n;
  }
  return n;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// ti, born, delta, overflow from a text table row (the trailing four
// whitespace-separated tokens).
std::vector<double> row_numbers(const std::string& out, const std::string& key) {
  std::istringstream ss(out);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind(key, 0) != 0) continue;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    REQUIRE(toks.size() >= 4);
    std::vector<double> vals;
    for (size_t i = toks.size() - 4; i < toks.size(); ++i) {
      vals.push_back(std::stod(toks[i]));
    }
    return vals;
  }
  FAIL("no table row starting with " << key);
  return {};
}

const std::string kScenarioDir = std::string(TIQS_SOURCE_DIR) + "/scenarios/";
const std::string kMalformedDir =
    std::string(TIQS_SOURCE_DIR) + "/tests/fixtures/malformed/";

}  // namespace

TEST_CASE("run on the single-atom-pair builtin") {
  CliResult r = run_cli("run --builtin qle-single");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.err.empty());
  REQUIRE(contains(r.out, "scenario qle-single"));
  REQUIRE(contains(r.out, "mode outcomes"));
  REQUIRE(count_row_lines(r.out) == 11);
  REQUIRE(contains(r.out, "ti sum   1.000000000000"));
  REQUIRE(contains(r.out, "born sum 1.000000000000"));
  REQUIRE(contains(r.out, "full-wave residuals: emitter 0.000000000000"));
  REQUIRE(contains(r.out, "component-sum residual: 0.000000000000"));
  REQUIRE(contains(r.out, "result: PASS"));

  const std::vector<double> dark = row_numbers(r.out, "(D, z1+, z2+)");
  REQUIRE(dark[0] == 0.0625);
  REQUIRE(dark[1] == 0.0625);
  REQUIRE(dark[2] == 0.0);
  REQUIRE(dark[3] == 0.03125);
}

TEST_CASE("run with an outcome filter") {
  CliResult r = run_cli("run --builtin qle-single --outcome D,z1+,z2+");
  REQUIRE(r.exit_code == 0);
  REQUIRE(count_row_lines(r.out) == 1);
  REQUIRE(contains(r.out, "(D, z1+, z2+)"));

  SECTION("an outcome nothing produces is an error") {
    CliResult miss = run_cli("run --builtin qle-single --outcome NOPE,z1+,z2+");
    REQUIRE(miss.exit_code == 2);
    REQUIRE(contains(miss.err, "unknown outcome"));
  }
  SECTION("full-check mode ignores the filter") {
    CliResult fc =
        run_cli("run --builtin qle-single --mode full-check --outcome NOPE");
    REQUIRE(fc.exit_code == 0);
  }
}

TEST_CASE("run modes") {
  SECTION("full-check prints residuals only") {
    CliResult r = run_cli("run --builtin qle-single --mode full-check");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "full-wave residuals"));
    REQUIRE(count_row_lines(r.out) == 0);
    REQUIRE(contains(r.out, "result: PASS"));
  }
  SECTION("components prints per-outcome residual and overflow") {
    CliResult r = run_cli("run --builtin qle-single --mode components");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "emitter-residual"));
    REQUIRE(contains(r.out, "component-sum residual: 0.000000000000"));
    REQUIRE(count_row_lines(r.out) == 11);
  }
  SECTION("trace walks both waves region by region") {
    CliResult r = run_cli("run --builtin qle-single --mode trace");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "offer wave, region s:"));
    REQUIRE(contains(r.out, "offer wave, region u'v':"));
    REQUIRE(contains(r.out, "offer wave, region cd:"));
    REQUIRE(contains(r.out, "confirmation wave, region cd:"));
    REQUIRE(contains(r.out, "confirmation wave, region emitter:"));
    REQUIRE(contains(r.out, "result: PASS"));
  }
}

TEST_CASE("structured output carries the same numbers as the text table") {
  CliResult r = run_cli("run --builtin qle-single --format structured");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.at("format_version").get<int>() == 1);
  REQUIRE(j.at("tool").at("name").get<std::string>() == "tiqs");
  REQUIRE(j.at("tool").at("version").get<std::string>() == "0.1.0");
  REQUIRE(j.at("scenario").get<std::string>() == "qle-single");
  REQUIRE(j.at("mode").get<std::string>() == "outcomes");
  REQUIRE(j.at("contingent").get<bool>() == false);
  REQUIRE(j.at("ok").get<bool>() == true);
  REQUIRE(j.at("rows").size() == 11);
  REQUIRE(j.at("failures").empty());
  REQUIRE(std::abs(j.at("ti_sum").get<double>() - 1.0) <= 1e-12);
  REQUIRE(j.at("residuals").at("full_emitter").get<double>() <= 1e-12);

  CliResult text = run_cli("run --builtin qle-single");
  for (const auto& row : j.at("rows")) {
    const std::vector<double> cols =
        row_numbers(text.out, row.at("outcome").get<std::string>());
    REQUIRE(std::abs(cols[0] - row.at("ti").get<double>()) <= 5e-13);
    REQUIRE(std::abs(cols[1] - row.at("born").get<double>()) <= 5e-13);
    REQUIRE(std::abs(cols[3] - row.at("overflow_weight").get<double>()) <= 5e-13);
  }

  const json& dark = *std::find_if(
      j.at("rows").begin(), j.at("rows").end(),
      [](const json& row) { return row.at("key") == "D,z1+,z2+"; });
  REQUIRE(std::abs(dark.at("ti").get<double>() - 0.0625) <= 5e-13);
  REQUIRE(dark.at("absorber").get<std::string>() == "D");
  REQUIRE(dark.at("spins") == json::array({"z1+", "z2+"}));

  SECTION("filter also applies to structured rows") {
    CliResult one =
        run_cli("run --builtin qle-single --format structured --outcome UA,z1-,z2+");
    REQUIRE(one.exit_code == 0);
    const json jj = json::parse(one.out);
    REQUIRE(jj.at("rows").size() == 1);
    REQUIRE(std::abs(jj.at("rows")[0].at("ti").get<double>() - 0.25) <= 5e-13);
  }
}

TEST_CASE("contingent run reports both branches and the trigger check") {
  CliResult r = run_cli("run --builtin maudlin-contingent");
  REQUIRE(r.exit_code == 0);
  REQUIRE(contains(r.out, "trigger detector C"));
  REQUIRE(contains(r.out, "branch base"));
  REQUIRE(contains(r.out, "branch moved"));
  REQUIRE(contains(r.out, "trigger fires with probability 0.500000000000"));
  REQUIRE(contains(r.out, "trigger consistency |delta| = 0.000000000000"));
  REQUIRE(contains(r.out, "result: PASS"));

  SECTION("structured form") {
    CliResult s = run_cli("run --builtin maudlin-contingent --format structured");
    REQUIRE(s.exit_code == 0);
    const json j = json::parse(s.out);
    REQUIRE(j.at("contingent").get<bool>() == true);
    REQUIRE(j.at("trigger").get<std::string>() == "C");
    REQUIRE(j.at("branches").size() == 2);
    REQUIRE(j.at("branches")[0].at("label") == "base");
    REQUIRE(j.at("branches")[1].at("label") == "moved");
    for (const auto& br : j.at("branches")) {
      REQUIRE(std::abs(br.at("trigger_fire_probability").get<double>() - 0.5) <=
              1e-12);
    }
    REQUIRE(j.at("trigger_consistency").get<double>() <= 1e-12);
  }
}

TEST_CASE("a genuine check failure exits with status 1") {
  // The silent block moves trigger C onto sector b, where it fires with
  // probability 1/2 instead of the base 1/4. Both branches are valid
  // scenarios, so this is a failed physics check, not a usage error.
  const fs::path file = write_scratch("moved-trigger.tis",
                                      "scenario moved-trigger\n"
                                      "source S emits s\n"
                                      "beamsplitter BS in s r out a b\n"
                                      "beamsplitter BS2 in a x out c e\n"
                                      "detector C absorbs c\n"
                                      "detector E absorbs e\n"
                                      "detector B absorbs b\n"
                                      "universal-absorber\n"
                                      "stage g1 : BS\n"
                                      "stage g2 : BS2\n"
                                      "contingent on C silent : moved\n"
                                      "detector C absorbs b\n");
  CliResult r = run_cli("run " + file.string());
  REQUIRE(r.exit_code == 1);
  REQUIRE(contains(r.out, "trigger fires with probability 0.250000000000"));
  REQUIRE(contains(r.out, "trigger fires with probability 0.500000000000"));
  REQUIRE(contains(r.out, "trigger consistency |delta| = 0.250000000000"));
  REQUIRE(contains(r.out, "FAIL: branches assign different probabilities"));
  REQUIRE(contains(r.out, "result: FAIL"));

  SECTION("check reports the same failure") {
    CliResult c = run_cli("check " + file.string());
    REQUIRE(c.exit_code == 1);
    REQUIRE(contains(c.out, "result: FAIL"));
  }
}

TEST_CASE("check subcommand") {
  CliResult ok = run_cli("check " + kScenarioDir + "qle-single.tis");
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.out == "all checks pass\n");

  CliResult bad = run_cli("check " + kMalformedDir + "02-unknown-directive.tis");
  REQUIRE(bad.exit_code == 2);
  REQUIRE(contains(bad.err, "02-unknown-directive.tis: line 3"));
  REQUIRE(contains(bad.err, "unknown directive"));

  CliResult missing = run_cli("check " + kScenarioDir + "no-such-file.tis");
  REQUIRE(missing.exit_code == 2);
  REQUIRE(contains(missing.err, "cannot open scenario file"));
}

TEST_CASE("every malformed fixture is a usage error for the tool") {
  const std::vector<std::string> files = {
      "01-missing-header.tis",     "02-unknown-directive.tis",
      "03-beamsplitter-arity.tis", "04-atom-id-range.tis",
      "05-duplicate-element.tis",  "06-dangling-detector.tis",
      "07-stage-unknown-element.tis", "08-bad-phase.tis",
      "09-contingent-block.tis",   "10-bad-axis.tis",
  };
  for (const auto& f : files) {
    INFO(f);
    CliResult r = run_cli("run " + kMalformedDir + f);
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.out.empty());
    REQUIRE(contains(r.err, "line "));
  }
}

TEST_CASE("list-builtin names every shipped scenario") {
  CliResult r = run_cli("list-builtin");
  REQUIRE(r.exit_code == 0);
  for (const auto& b : tiqs::builtins()) {
    REQUIRE(contains(r.out, b.name));
    REQUIRE(contains(r.out, b.description));
  }
}

TEST_CASE("shipped scenario files stay in sync with the builtins") {
  for (const auto& b : tiqs::builtins()) {
    INFO(b.name);
    REQUIRE(slurp(kScenarioDir + std::string(b.name) + ".tis") == b.text);
  }
}

TEST_CASE("running a scenario file matches the builtin") {
  CliResult file = run_cli("run " + kScenarioDir + "qle-single.tis");
  CliResult builtin = run_cli("run --builtin qle-single");
  REQUIRE(file.exit_code == 0);
  REQUIRE(file.out == builtin.out);

  SECTION("CRLF line endings are accepted") {
    std::string crlf;
    for (char c : slurp(kScenarioDir + "qle-single.tis")) {
      if (c == '\n') crlf += '\r';
      crlf += c;
    }
    const fs::path p = write_scratch("crlf.tis", crlf);
    CliResult r = run_cli("run " + p.string());
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == builtin.out);
  }
}

TEST_CASE("usage errors") {
  SECTION("file and builtin together") {
    CliResult r = run_cli("run " + kScenarioDir +
                          "qle-single.tis --builtin qle-single");
    REQUIRE(r.exit_code == 2);
    REQUIRE(contains(r.err, "exactly one of"));
  }
  SECTION("neither file nor builtin") {
    CliResult r = run_cli("run");
    REQUIRE(r.exit_code == 2);
    REQUIRE(contains(r.err, "exactly one of"));
  }
  SECTION("unknown builtin") {
    CliResult r = run_cli("run --builtin nope");
    REQUIRE(r.exit_code == 2);
    REQUIRE(contains(r.err, "unknown built-in scenario 'nope'"));
  }
  SECTION("tolerance outside the supported band") {
    CliResult r = run_cli("run --builtin qle-single --tolerance 1e-3");
    REQUIRE(r.exit_code == 2);
    REQUIRE(contains(r.err, "tolerance must lie in (0, 1e-6]"));
  }
  SECTION("empty scenario file") {
    const fs::path p = write_scratch("empty.tis", "");
    CliResult r = run_cli("run " + p.string());
    REQUIRE(r.exit_code == 2);
    REQUIRE(contains(r.err, "missing 'scenario NAME' header"));
  }
  SECTION("unknown subcommand") {
    CliResult r = run_cli("frobnicate");
    REQUIRE(r.exit_code != 0);
  }
}

TEST_CASE("version flag") {
  CliResult r = run_cli("--version");
  REQUIRE(r.exit_code == 0);
  REQUIRE(contains(r.out, "tiqs 0.1.0"));
}
