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

#ifndef TIQS_RUNNER_HPP
#define TIQS_RUNNER_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiqs/builtins.hpp"
#include "tiqs/parser.hpp"
#include "tiqs/transaction.hpp"
#include "tiqs/version.hpp"

// Request-level driver shared by the command-line tool and the tests.
// Exit codes: 0 all checks pass, 1 a check failed (residual or probability
// mismatch above tolerance), 2 usage, parse, or validation problems.

namespace tiqs {

enum class RunMode { outcomes, full_check, components, trace };
enum class OutputFormat { text, structured };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::outcomes:
      return "outcomes";
    case RunMode::full_check:
      return "full-check";
    case RunMode::components:
      return "components";
    case RunMode::trace:
      return "trace";
  }
  return "?";
}

struct RunRequest {
  std::string file;     // scenario file path (exclusive with builtin)
  std::string builtin;  // built-in scenario name
  RunMode mode = RunMode::outcomes;
  std::string outcome_filter;  // e.g. "D,z1+,z2+"; empty selects all
  double tolerance = kDefaultTolerance;
  OutputFormat format = OutputFormat::text;
};

struct RunOutput {
  int exit_code = 0;
  std::string out;
  std::string err;
};

namespace detail {

struct LoadedText {
  std::string origin;  // path or "builtin:<name>"
  std::string text;
};

inline bool load_request_text(const RunRequest& req, LoadedText& lt,
                              RunOutput& ro) {
  if (req.file.empty() == req.builtin.empty()) {
    ro.err = "exactly one of a scenario file or --builtin NAME is required\n";
    ro.exit_code = 2;
    return false;
  }
  if (!req.builtin.empty()) {
    const Builtin* b = find_builtin(req.builtin);
    if (b == nullptr) {
      ro.err = "unknown built-in scenario '" + req.builtin + "'\n";
      ro.exit_code = 2;
      return false;
    }
    lt = {"builtin:" + req.builtin, b->text};
    return true;
  }
  std::ifstream in(req.file, std::ios::binary);
  if (!in) {
    ro.err = "cannot open scenario file '" + req.file + "'\n";
    ro.exit_code = 2;
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  lt = {req.file, ss.str()};
  return true;
}

inline bool parse_and_validate(const LoadedText& lt, Scenario& scn,
                               RunOutput& ro) {
  ParseResult pr = parse_scenario(lt.text);
  if (!pr.ok()) {
    std::string e;
    for (const auto& d : pr.diagnostics) {
      e += lt.origin + ": " + d.render() + "\n";
    }
    ro.err = e;
    ro.exit_code = 2;
    return false;
  }
  scn = to_scenario(*pr.doc);
  ValidationReport vr = validate(scn);
  if (!vr.ok()) {
    std::string e;
    for (const auto& i : vr.issues) {
      e += lt.origin + ": " + i.rule + ": " +
           (i.where.empty() ? "" : i.where + ": ") + i.message + "\n";
    }
    ro.err = e;
    ro.exit_code = 2;
    return false;
  }
  return true;
}

// ---- text rendering -------------------------------------------------------

inline std::string pad(const std::string& s, size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

inline std::string render_rows_text(const TransactionReport& rep,
                                    const std::vector<OutcomeRow>& rows) {
  size_t w = 8;
  for (const auto& r : rows) w = std::max(w, r.outcome.display().size());
  std::string out;
  out += pad("outcome", w + 2) + pad("ti", 16) + pad("born", 16) +
         pad("|delta|", 16) + "overflow\n";
  for (const auto& r : rows) {
    out += pad(r.outcome.display(), w + 2) + pad(render_real(r.ti), 16) +
           pad(render_real(r.born), 16) + pad(render_real(r.delta), 16) +
           render_real(r.overflow_weight) + "\n";
  }
  out += "ti sum   " + render_real(rep.ti_sum) + "\n";
  out += "born sum " + render_real(rep.born_sum) + "\n";
  return out;
}

inline std::string render_residuals_text(const TransactionReport& rep) {
  std::string out;
  out += "full-wave residuals: emitter " + render_real(rep.full_emitter_residual) +
         ", non-source " + render_real(rep.full_r_residual) + ", overflow " +
         render_real(rep.full_overflow_residual) + "\n";
  out += "component-sum residual: " + render_real(rep.component_sum_residual) +
         "\n";
  return out;
}

inline std::string render_failures_text(const std::vector<std::string>& fails) {
  std::string out;
  for (const auto& f : fails) out += "FAIL: " + f + "\n";
  return out;
}

// ---- structured rendering -------------------------------------------------

inline nlohmann::json spins_json(const Outcome& o) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [id, r] : o.spins) arr.push_back(to_token(r, id));
  return arr;
}

inline nlohmann::json rows_json(const std::vector<OutcomeRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"key", r.outcome.key()},
                   {"outcome", r.outcome.display()},
                   {"absorber", r.outcome.absorber},
                   {"spins", spins_json(r.outcome)},
                   {"ti", r.ti},
                   {"born", r.born},
                   {"delta", r.delta},
                   {"overflow_weight", r.overflow_weight},
                   {"emitter_residual", r.emitter_residual}});
  }
  return arr;
}

inline nlohmann::json report_json(const TransactionReport& rep,
                                  const std::vector<OutcomeRow>& rows) {
  return {{"rows", rows_json(rows)},
          {"ti_sum", rep.ti_sum},
          {"born_sum", rep.born_sum},
          {"residuals",
           {{"full_emitter", rep.full_emitter_residual},
            {"full_r_sector", rep.full_r_residual},
            {"full_overflow", rep.full_overflow_residual},
            {"component_sum", rep.component_sum_residual}}},
          {"failures", rep.failures},
          {"ok", rep.ok()}};
}

inline nlohmann::json doc_header(const std::string& scenario, RunMode mode,
                                 double tolerance) {
  return {{"format_version", kFormatVersion},
          {"tool", {{"name", "tiqs"}, {"version", kVersion}}},
          {"scenario", scenario},
          {"mode", to_string(mode)},
          {"tolerance", tolerance}};
}

// ---- trace rendering ------------------------------------------------------

inline nlohmann::json state_json(const StateVector& st) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [l, a] : st.amplitudes()) {
    arr.push_back({{"label", to_string(l)}, {"re", a.real()}, {"im", a.imag()}});
  }
  return arr;
}

inline void trace_scenario(const Scenario& scn, OutputFormat format,
                           std::string& text, nlohmann::json& rows_out) {
  const auto offer = propagate_offer(scn);
  const StateVector fin = offer.back().state;

  StateVector seed(WaveDirection::bra, fin.mask());
  for (const auto& [l, a] : fin.amplitudes()) {
    bool confirmed;
    if (l.photon->is_vacuum()) {
      confirmed = scn.absorbers.universal_absorber;
    } else if (scn.absorbers.detector_for(*l.photon) != nullptr) {
      confirmed = true;
    } else {
      confirmed = scn.absorbers.universal_absorber;
    }
    if (confirmed) seed.add_amplitude(l, std::conj(a));
  }
  const auto confirmation = propagate_confirmation(scn, seed);

  if (format == OutputFormat::text) {
    for (const auto& r : offer) {
      text += "offer wave, region " + r.region + ":\n";
      text += render_state(r.state);
      text += "\n";
    }
    for (const auto& r : confirmation) {
      text += "confirmation wave, region " + r.region + ":\n";
      text += render_state(r.state);
      if (r.state.overflow_weight() > 0.0) {
        text += "overflow weight " + render_real(r.state.overflow_weight()) +
                "\n";
      }
      text += "\n";
    }
  } else {
    for (const auto& r : offer) {
      rows_out.push_back({{"wave", "offer"},
                          {"region", r.region},
                          {"state", state_json(r.state)}});
    }
    for (const auto& r : confirmation) {
      rows_out.push_back({{"wave", "confirmation"},
                          {"region", r.region},
                          {"state", state_json(r.state)},
                          {"overflow_weight", r.state.overflow_weight()}});
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry points

inline RunOutput run_request(const RunRequest& req) {
  RunOutput ro;
  if (!(req.tolerance > 0.0) || req.tolerance > 1e-6) {
    ro.err = "tolerance must lie in (0, 1e-6]\n";
    ro.exit_code = 2;
    return ro;
  }

  detail::LoadedText lt;
  if (!detail::load_request_text(req, lt, ro)) return ro;

  Scenario scn;
  if (!detail::parse_and_validate(lt, scn, ro)) return ro;

  try {
    const bool contingent = scn.contingency.has_value();
    nlohmann::json j = detail::doc_header(scn.name, req.mode, req.tolerance);
    j["contingent"] = contingent;
    std::string text;
    text += "scenario " + scn.name + "\n";
    text += "mode " + std::string(to_string(req.mode)) + "\n";

    bool ok = true;

    size_t filter_hits = 0;
    auto filter_rows = [&](const TransactionReport& rep) {
      if (req.outcome_filter.empty()) return rep.rows;
      const Outcome want = parse_outcome_spec(req.outcome_filter);
      std::vector<OutcomeRow> out;
      for (const auto& r : rep.rows) {
        if (r.outcome.key() == want.key()) out.push_back(r);
      }
      filter_hits += out.size();
      return out;
    };

    auto emit_report = [&](const TransactionReport& rep, const std::string& tag) {
      if (!tag.empty()) text += "branch " + tag + "\n";
      switch (req.mode) {
        case RunMode::outcomes: {
          auto rows = filter_rows(rep);
          text += detail::render_rows_text(rep, rows);
          text += detail::render_residuals_text(rep);
          break;
        }
        case RunMode::full_check:
          text += detail::render_residuals_text(rep);
          break;
        case RunMode::components: {
          auto rows = filter_rows(rep);
          size_t w = 8;
          for (const auto& r : rows) {
            w = std::max(w, r.outcome.display().size());
          }
          text += detail::pad("outcome", w + 2) + detail::pad("ti", 16) +
                  detail::pad("emitter-residual", 18) + "overflow\n";
          for (const auto& r : rows) {
            text += detail::pad(r.outcome.display(), w + 2) +
                    detail::pad(render_real(r.ti), 16) +
                    detail::pad(render_real(r.emitter_residual), 18) +
                    render_real(r.overflow_weight) + "\n";
          }
          text += "component-sum residual: " +
                  render_real(rep.component_sum_residual) + "\n";
          break;
        }
        case RunMode::trace:
          break;  // handled separately
      }
      text += detail::render_failures_text(rep.failures);
      ok = ok && rep.ok();
    };

    if (req.mode == RunMode::trace) {
      nlohmann::json trace_rows = nlohmann::json::array();
      if (contingent) {
        ContingentScenario cs = make_contingent(scn);
        text += "branch base\n";
        detail::trace_scenario(cs.base, req.format, text, trace_rows);
        text += "branch " + cs.silent_label + "\n";
        detail::trace_scenario(cs.silent, req.format, text, trace_rows);
      } else {
        detail::trace_scenario(scn, req.format, text, trace_rows);
      }
      j["trace"] = trace_rows;
    } else if (contingent) {
      ContingentScenario cs = make_contingent(scn);
      ContingentReport rep = run_contingent(cs, req.tolerance);
      text += "trigger detector " + rep.trigger_detector + "\n\n";
      emit_report(rep.base.report, rep.base.label);
      text += "trigger fires with probability " +
              render_real(rep.base.trigger_fire_probability) + "\n\n";
      emit_report(rep.silent.report, rep.silent.label);
      text += "trigger fires with probability " +
              render_real(rep.silent.trigger_fire_probability) + "\n\n";
      text += "trigger consistency |delta| = " +
              render_real(rep.trigger_consistency) + "\n";
      text += detail::render_failures_text(rep.failures);
      ok = ok && rep.ok();

      j["trigger"] = rep.trigger_detector;
      j["trigger_consistency"] = rep.trigger_consistency;
      j["branches"] = nlohmann::json::array();
      for (const BranchReport* br : {&rep.base, &rep.silent}) {
        nlohmann::json bj = detail::report_json(br->report,
                                                req.mode == RunMode::outcomes ||
                                                        req.mode == RunMode::components
                                                    ? filter_rows(br->report)
                                                    : br->report.rows);
        bj["label"] = br->label;
        bj["trigger_fire_probability"] = br->trigger_fire_probability;
        j["branches"].push_back(std::move(bj));
      }
      if (!rep.failures.empty()) {
        j["failures"] = rep.failures;
      }
    } else {
      TransactionReport rep = analyze(scn, req.tolerance);
      emit_report(rep, "");
      j.update(detail::report_json(
          rep, req.mode == RunMode::outcomes || req.mode == RunMode::components
                   ? filter_rows(rep)
                   : rep.rows));
    }

    if (!req.outcome_filter.empty() && filter_hits == 0 &&
        req.mode != RunMode::trace && req.mode != RunMode::full_check) {
      throw Error("unknown outcome " +
                  parse_outcome_spec(req.outcome_filter).display());
    }

    text += ok ? "result: PASS\n" : "result: FAIL\n";
    j["ok"] = ok;
    ro.exit_code = ok ? 0 : 1;
    ro.out = req.format == OutputFormat::text ? text : j.dump(2) + "\n";
    return ro;
  } catch (const Error& e) {
    ro.err = std::string(e.what()) + "\n";
    ro.exit_code = 2;
    return ro;
  }
}

// Parses, validates, and runs every check; `run` with mode outcomes minus
// the table.
inline RunOutput check_file(const std::string& path,
                            double tolerance = kDefaultTolerance) {
  RunRequest req;
  req.file = path;
  req.tolerance = tolerance;
  RunOutput ro = run_request(req);
  if (ro.exit_code == 2) return ro;
  RunOutput out;
  out.exit_code = ro.exit_code;
  out.out = ro.exit_code == 0 ? "all checks pass\n" : ro.out;
  return out;
}

inline std::string list_builtins_text() {
  size_t w = 0;
  for (const auto& b : builtins()) w = std::max(w, std::string(b.name).size());
  std::string out;
  for (const auto& b : builtins()) {
    out += detail::pad(b.name, w + 2) + b.description + "\n";
  }
  return out;
}

}  // namespace tiqs

#endif  // TIQS_RUNNER_HPP
