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

#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tiqs/runner.hpp"
#include "tiqs/version.hpp"

namespace {

int emit(const tiqs::RunOutput& ro) {
  if (!ro.out.empty()) std::fputs(ro.out.c_str(), stdout);
  if (!ro.err.empty()) std::fputs(ro.err.c_str(), stderr);
  return ro.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transactional-interpretation simulator for single-photon networks"};
  app.set_version_flag("--version", std::string("tiqs ") + tiqs::kVersion);
  app.require_subcommand(1);

  tiqs::RunRequest req;
  std::string mode = "outcomes";
  std::string format = "text";
  std::string check_path;
  double check_tolerance = tiqs::kDefaultTolerance;

  CLI::App* run = app.add_subcommand("run", "evaluate a scenario");
  run->add_option("file", req.file, "scenario file");
  run->add_option("--builtin", req.builtin, "built-in scenario name");
  run->add_option("--mode", mode, "outcomes | full-check | components | trace")
      ->check(CLI::IsMember({"outcomes", "full-check", "components", "trace"}));
  run->add_option("--outcome", req.outcome_filter,
                  "restrict the table to one outcome, e.g. D,z1+,z2+");
  run->add_option("--tolerance", req.tolerance, "check tolerance, in (0, 1e-6]");
  run->add_option("--format", format, "text | structured")
      ->check(CLI::IsMember({"text", "structured"}));

  CLI::App* check = app.add_subcommand("check", "validate a scenario file and run all checks");
  check->add_option("file", check_path, "scenario file")->required();
  check->add_option("--tolerance", check_tolerance, "check tolerance, in (0, 1e-6]");

  CLI::App* list = app.add_subcommand("list-builtin", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return 2;
  }

  if (run->parsed()) {
    static const std::map<std::string, tiqs::RunMode> modes = {
        {"outcomes", tiqs::RunMode::outcomes},
        {"full-check", tiqs::RunMode::full_check},
        {"components", tiqs::RunMode::components},
        {"trace", tiqs::RunMode::trace}};
    req.mode = modes.at(mode);
    req.format = format == "text" ? tiqs::OutputFormat::text
                                  : tiqs::OutputFormat::structured;
    return emit(tiqs::run_request(req));
  }
  if (check->parsed()) {
    return emit(tiqs::check_file(check_path, check_tolerance));
  }
  if (list->parsed()) {
    std::fputs(tiqs::list_builtins_text().c_str(), stdout);
    return 0;
  }
  return 2;
}
