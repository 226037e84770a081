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

#ifndef TIQS_PARSER_HPP
#define TIQS_PARSER_HPP

#include <cstdlib>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tiqs/network.hpp"

// Line-oriented scenario description language.
//
//   scenario NAME
//   source NAME emits SECTOR
//   dual-source NAME emits SECTOR SECTOR phase FLOAT
//   beamsplitter NAME in SECTOR SECTOR out SECTOR SECTOR
//   mirror NAME SECTOR -> SECTOR
//   atom NAME id INT prep yminus blocks (z+|z-) in SECTOR out SECTOR
//   detector NAME absorbs SECTOR
//   spin-detector atom INT axis (z|y)
//   universal-absorber
//   stage NAME : NAME (NAME)*
//   contingent on NAME silent : BLOCK-NAME
//
// Tokens are whitespace separated; `#` starts a comment. Everything after
// the contingent line forms the named silent-branch block and may only
// rebind absorbers (detector / spin-detector / universal-absorber).

namespace tiqs {

struct SourceDirective {
  std::string name, sector;
  bool operator==(const SourceDirective&) const = default;
};
struct DualSourceDirective {
  std::string name, out1, out2;
  double phase = 0.0;
  bool operator==(const DualSourceDirective&) const = default;
};
struct BeamsplitterDirective {
  std::string name, in1, in2, out1, out2;
  bool operator==(const BeamsplitterDirective&) const = default;
};
struct MirrorDirective {
  std::string name, from, to;
  bool operator==(const MirrorDirective&) const = default;
};
struct AtomDirective {
  std::string name;
  int id = 1;
  std::string blocks, in, out;
  bool operator==(const AtomDirective&) const = default;
};
struct DetectorDirective {
  std::string name, sector;
  bool operator==(const DetectorDirective&) const = default;
};
struct SpinDetectorDirective {
  int atom = 1;
  char axis = 'z';
  bool operator==(const SpinDetectorDirective&) const = default;
};
struct UniversalAbsorberDirective {
  bool operator==(const UniversalAbsorberDirective&) const = default;
};
struct StageDirective {
  std::string name;
  std::vector<std::string> elements;
  bool operator==(const StageDirective&) const = default;
};
struct ContingentDirective {
  std::string detector, block;
  bool operator==(const ContingentDirective&) const = default;
};

using Directive =
    std::variant<SourceDirective, DualSourceDirective, BeamsplitterDirective,
                 MirrorDirective, AtomDirective, DetectorDirective,
                 SpinDetectorDirective, UniversalAbsorberDirective,
                 StageDirective, ContingentDirective>;

struct SpannedDirective {
  Directive value;
  int line = 0;
};

struct ScenarioDoc {
  std::string name;
  std::vector<SpannedDirective> directives;
};

inline bool same_directives(const ScenarioDoc& a, const ScenarioDoc& b) {
  if (a.name != b.name || a.directives.size() != b.directives.size()) {
    return false;
  }
  for (size_t i = 0; i < a.directives.size(); ++i) {
    if (!(a.directives[i].value == b.directives[i].value)) return false;
  }
  return true;
}

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
  std::vector<std::string> expected;

  std::string render() const {
    std::string s = "line " + std::to_string(line) + ", col " +
                    std::to_string(column) + ": " + message;
    if (!expected.empty()) {
      s += " (expected: ";
      for (size_t i = 0; i < expected.size(); ++i) {
        if (i != 0) s += ", ";
        s += expected[i];
      }
      s += ")";
    }
    return s;
  }
};

struct ParseResult {
  std::optional<ScenarioDoc> doc;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return doc.has_value() && diagnostics.empty(); }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Token {
  std::string text;
  int column;
};

inline std::vector<Token> tokenize_line(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (is_space(line[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !is_space(line[j]) && line[j] != '#') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

// Cursor over one directive line; reports at most one diagnostic per line
// to avoid cascades.
class Args {
 public:
  Args(const std::vector<Token>& toks, int line, std::vector<Diagnostic>& diags)
      : toks_(toks), line_(line), diags_(diags) {}

  bool ok() const { return !failed_; }

  std::string name(const char* what) { return next(what, {}); }

  std::string sector(const char* what) {
    std::string t = next(what, {});
    if (!failed_ && t == "0") {
      fail(toks_[idx_ - 1].column,
           std::string("'0' is the reserved vacuum sector and cannot be ") +
               "used as a " + what,
           {});
    }
    return t;
  }

  void literal(const char* lit) {
    std::string t = next(lit, {lit});
    if (!failed_ && t != lit) {
      fail(toks_[idx_ - 1].column, "expected '" + std::string(lit) + "'",
           {lit});
    }
  }

  std::string one_of(std::initializer_list<const char*> options,
                     const char* what) {
    std::vector<std::string> exp(options.begin(), options.end());
    std::string t = next(what, exp);
    if (!failed_) {
      for (const char* o : options) {
        if (t == o) return t;
      }
      fail(toks_[idx_ - 1].column, std::string("bad ") + what + " '" + t + "'",
           exp);
    }
    return t;
  }

  int integer(const char* what, int lo, int hi) {
    std::string t = next(what, {});
    if (failed_) return lo;
    char* end = nullptr;
    long v = std::strtol(t.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || end == t.c_str()) {
      fail(toks_[idx_ - 1].column,
           std::string("expected an integer ") + what + ", got '" + t + "'",
           {});
      return lo;
    }
    if (v < lo || v > hi) {
      fail(toks_[idx_ - 1].column,
           std::string(what) + " must be between " + std::to_string(lo) +
               " and " + std::to_string(hi),
           {});
      return lo;
    }
    return static_cast<int>(v);
  }

  double number(const char* what) {
    std::string t = next(what, {});
    if (failed_) return 0.0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end == nullptr || *end != '\0' || end == t.c_str()) {
      fail(toks_[idx_ - 1].column,
           std::string("expected a number for ") + what + ", got '" + t + "'",
           {});
      return 0.0;
    }
    return v;
  }

  // Remaining tokens as names; at least min_count of them.
  std::vector<std::string> rest_names(const char* what, size_t min_count) {
    std::vector<std::string> out;
    while (idx_ < toks_.size()) out.push_back(toks_[idx_++].text);
    if (out.size() < min_count && !failed_) {
      fail(end_column(), std::string("missing ") + what, {});
    }
    return out;
  }

  void finish() {
    if (!failed_ && idx_ < toks_.size()) {
      fail(toks_[idx_].column,
           "unexpected trailing token '" + toks_[idx_].text + "'", {});
    }
  }

 private:
  std::string next(const char* what, std::vector<std::string> expected) {
    if (failed_) return "";
    if (idx_ >= toks_.size()) {
      fail(end_column(), std::string("missing ") + what, std::move(expected));
      return "";
    }
    return toks_[idx_++].text;
  }

  int end_column() const {
    const Token& t = toks_.back();
    return t.column + static_cast<int>(t.text.size());
  }

  void fail(int column, std::string msg, std::vector<std::string> expected) {
    if (failed_) return;
    failed_ = true;
    diags_.push_back({line_, column, std::move(msg), std::move(expected)});
  }

  const std::vector<Token>& toks_;
  int line_;
  std::vector<Diagnostic>& diags_;
  size_t idx_ = 1;  // token 0 is the directive keyword
  bool failed_ = false;
};

inline const std::vector<std::string>& directive_keywords() {
  static const std::vector<std::string> kws = {
      "source",        "dual-source",        "beamsplitter", "mirror",
      "atom",          "detector",           "spin-detector",
      "universal-absorber", "stage",         "contingent"};
  return kws;
}

inline const std::vector<std::string>& absorber_keywords() {
  static const std::vector<std::string> kws = {"detector", "spin-detector",
                                               "universal-absorber"};
  return kws;
}

}  // namespace detail

inline ParseResult parse_scenario(std::string_view text) {
  ParseResult result;
  auto& diags = result.diagnostics;
  ScenarioDoc doc;
  bool have_header = false;
  bool after_contingent = false;

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    lines.push_back(cur);
  }

  for (size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto toks = detail::tokenize_line(lines[li]);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;

    if (!have_header) {
      if (kw != "scenario") {
        diags.push_back({line_no, toks[0].column,
                         "expected the 'scenario NAME' header first",
                         {"scenario"}});
        return result;
      }
      detail::Args a(toks, line_no, diags);
      doc.name = a.name("scenario name");
      a.finish();
      have_header = true;
      continue;
    }

    if (kw == "scenario") {
      diags.push_back(
          {line_no, toks[0].column, "duplicate 'scenario' header", {}});
      continue;
    }

    if (after_contingent && kw != "detector" && kw != "spin-detector" &&
        kw != "universal-absorber") {
      diags.push_back({line_no, toks[0].column,
                       "only absorber directives may follow 'contingent'",
                       detail::absorber_keywords()});
      continue;
    }

    detail::Args a(toks, line_no, diags);
    std::optional<Directive> d;

    if (kw == "source") {
      SourceDirective v;
      v.name = a.name("source name");
      a.literal("emits");
      v.sector = a.sector("sector");
      a.finish();
      d = v;
    } else if (kw == "dual-source") {
      DualSourceDirective v;
      v.name = a.name("source name");
      a.literal("emits");
      v.out1 = a.sector("sector");
      v.out2 = a.sector("sector");
      a.literal("phase");
      v.phase = a.number("phase");
      a.finish();
      d = v;
    } else if (kw == "beamsplitter") {
      BeamsplitterDirective v;
      v.name = a.name("beamsplitter name");
      a.literal("in");
      v.in1 = a.sector("input sector");
      v.in2 = a.sector("input sector");
      a.literal("out");
      v.out1 = a.sector("output sector");
      v.out2 = a.sector("output sector");
      a.finish();
      d = v;
    } else if (kw == "mirror") {
      MirrorDirective v;
      v.name = a.name("mirror name");
      v.from = a.sector("input sector");
      a.literal("->");
      v.to = a.sector("output sector");
      a.finish();
      d = v;
    } else if (kw == "atom") {
      AtomDirective v;
      v.name = a.name("atom name");
      a.literal("id");
      v.id = a.integer("atom id", 1, 2);
      a.literal("prep");
      a.literal("yminus");
      a.literal("blocks");
      v.blocks = a.one_of({"z+", "z-"}, "blocking spin");
      a.literal("in");
      v.in = a.sector("input sector");
      a.literal("out");
      v.out = a.sector("output sector");
      a.finish();
      d = v;
    } else if (kw == "detector") {
      DetectorDirective v;
      v.name = a.name("detector name");
      a.literal("absorbs");
      v.sector = a.sector("sector");
      a.finish();
      d = v;
    } else if (kw == "spin-detector") {
      SpinDetectorDirective v;
      a.literal("atom");
      v.atom = a.integer("atom id", 1, 2);
      a.literal("axis");
      v.axis = a.one_of({"z", "y"}, "axis")[0];
      a.finish();
      d = v;
    } else if (kw == "universal-absorber") {
      a.finish();
      d = UniversalAbsorberDirective{};
    } else if (kw == "stage") {
      StageDirective v;
      v.name = a.name("stage name");
      a.literal(":");
      v.elements = a.rest_names("element name", 1);
      a.finish();
      d = v;
    } else if (kw == "contingent") {
      ContingentDirective v;
      a.literal("on");
      v.detector = a.name("detector name");
      a.literal("silent");
      a.literal(":");
      v.block = a.name("block name");
      a.finish();
      d = v;
      if (a.ok()) after_contingent = true;
    } else {
      diags.push_back({line_no, toks[0].column,
                       "unknown directive '" + kw + "'",
                       detail::directive_keywords()});
      continue;
    }

    if (a.ok() && d) doc.directives.push_back({std::move(*d), line_no});
  }

  if (!have_header) {
    diags.push_back({1, 1, "missing 'scenario NAME' header", {"scenario"}});
    return result;
  }

  // Document-level structure checks.
  {
    std::set<std::string> element_names;
    // A contingent block may re-bind a base detector name, so duplicate
    // detectors are tracked per region.
    std::set<std::string> detector_names_base;
    std::set<std::string> detector_names_block;
    std::set<std::string> stage_names;
    std::set<int> atom_ids;
    std::set<std::string> produced;
    int sources = 0;
    bool saw_contingent = false;

    auto dup = [&](std::set<std::string>& seen, const std::string& n,
                   int line, const char* what) {
      if (!seen.insert(n).second) {
        diags.push_back({line, 1,
                         std::string("duplicate ") + what + " name '" + n + "'",
                         {}});
      }
    };

    for (const auto& sd : doc.directives) {
      const int line = sd.line;
      if (const auto* v = std::get_if<SourceDirective>(&sd.value)) {
        ++sources;
        dup(element_names, v->name, line, "element");
        produced.insert(v->sector);
      } else if (const auto* v = std::get_if<DualSourceDirective>(&sd.value)) {
        ++sources;
        dup(element_names, v->name, line, "element");
        produced.insert(v->out1);
        produced.insert(v->out2);
      } else if (const auto* v = std::get_if<BeamsplitterDirective>(&sd.value)) {
        dup(element_names, v->name, line, "element");
        produced.insert(v->out1);
        produced.insert(v->out2);
      } else if (const auto* v = std::get_if<MirrorDirective>(&sd.value)) {
        dup(element_names, v->name, line, "element");
        produced.insert(v->to);
      } else if (const auto* v = std::get_if<AtomDirective>(&sd.value)) {
        dup(element_names, v->name, line, "element");
        produced.insert(v->out);
        if (!atom_ids.insert(v->id).second) {
          diags.push_back({line, 1,
                           "atom id " + std::to_string(v->id) +
                               " is declared by more than one atom",
                           {}});
        }
      } else if (const auto* v = std::get_if<DetectorDirective>(&sd.value)) {
        dup(saw_contingent ? detector_names_block : detector_names_base,
            v->name, line, "detector");
      } else if (const auto* v = std::get_if<StageDirective>(&sd.value)) {
        dup(stage_names, v->name, line, "stage");
      } else if (std::holds_alternative<ContingentDirective>(sd.value)) {
        if (saw_contingent) {
          diags.push_back({line, 1, "only one contingent clause is allowed", {}});
        }
        saw_contingent = true;
      }
    }

    if (sources == 0) {
      diags.push_back({1, 1, "scenario has no source directive", {}});
    } else if (sources > 1) {
      for (const auto& sd : doc.directives) {
        bool is_src = std::holds_alternative<SourceDirective>(sd.value) ||
                      std::holds_alternative<DualSourceDirective>(sd.value);
        if (is_src && --sources == 0) {
          // Point at the last extra source.
          diags.push_back({sd.line, 1, "more than one source directive", {}});
          break;
        }
      }
    }

    // Reference checks.
    bool in_block = false;
    std::set<std::string> base_detectors;
    for (const auto& sd : doc.directives) {
      if (std::holds_alternative<ContingentDirective>(sd.value)) in_block = true;
      if (!in_block) {
        if (const auto* v = std::get_if<DetectorDirective>(&sd.value)) {
          base_detectors.insert(v->name);
        }
      }
    }
    for (const auto& sd : doc.directives) {
      const int line = sd.line;
      if (const auto* v = std::get_if<DetectorDirective>(&sd.value)) {
        if (produced.count(v->sector) == 0) {
          diags.push_back({line, 1,
                           "detector '" + v->name + "' absorbs sector '" +
                               v->sector + "', which nothing produces",
                           {}});
        }
      } else if (const auto* v = std::get_if<StageDirective>(&sd.value)) {
        for (const auto& en : v->elements) {
          if (element_names.count(en) == 0) {
            diags.push_back(
                {line, 1, "stage references unknown element '" + en + "'", {}});
          }
        }
      } else if (const auto* v = std::get_if<SpinDetectorDirective>(&sd.value)) {
        if (atom_ids.count(v->atom) == 0) {
          diags.push_back({line, 1,
                           "spin-detector references atom " +
                               std::to_string(v->atom) +
                               ", but no such atom is declared",
                           {}});
        }
      } else if (const auto* v = std::get_if<ContingentDirective>(&sd.value)) {
        if (base_detectors.count(v->detector) == 0) {
          diags.push_back({line, 1,
                           "contingent trigger '" + v->detector +
                               "' is not a detector of the base configuration",
                           {}});
        }
      }
    }
  }

  if (diags.empty()) result.doc = std::move(doc);
  return result;
}

// ---------------------------------------------------------------------------
// Serialization (canonical form; LF line endings)

namespace detail {

inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string serialize_scenario(const ScenarioDoc& doc) {
  std::string out = "scenario " + doc.name + "\n";
  for (const auto& sd : doc.directives) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, SourceDirective>) {
            out += "source " + v.name + " emits " + v.sector;
          } else if constexpr (std::is_same_v<T, DualSourceDirective>) {
            out += "dual-source " + v.name + " emits " + v.out1 + " " + v.out2 +
                   " phase " + detail::format_float(v.phase);
          } else if constexpr (std::is_same_v<T, BeamsplitterDirective>) {
            out += "beamsplitter " + v.name + " in " + v.in1 + " " + v.in2 +
                   " out " + v.out1 + " " + v.out2;
          } else if constexpr (std::is_same_v<T, MirrorDirective>) {
            out += "mirror " + v.name + " " + v.from + " -> " + v.to;
          } else if constexpr (std::is_same_v<T, AtomDirective>) {
            out += "atom " + v.name + " id " + std::to_string(v.id) +
                   " prep yminus blocks " + v.blocks + " in " + v.in + " out " +
                   v.out;
          } else if constexpr (std::is_same_v<T, DetectorDirective>) {
            out += "detector " + v.name + " absorbs " + v.sector;
          } else if constexpr (std::is_same_v<T, SpinDetectorDirective>) {
            out += "spin-detector atom " + std::to_string(v.atom) + " axis " +
                   std::string(1, v.axis);
          } else if constexpr (std::is_same_v<T, UniversalAbsorberDirective>) {
            out += "universal-absorber";
          } else if constexpr (std::is_same_v<T, StageDirective>) {
            out += "stage " + v.name + " :";
            for (const auto& e : v.elements) out += " " + e;
          } else if constexpr (std::is_same_v<T, ContingentDirective>) {
            out += "contingent on " + v.detector + " silent : " + v.block;
          }
        },
        sd.value);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Doc -> network structures

// Precondition: the doc parsed without diagnostics.
inline Scenario to_scenario(const ScenarioDoc& doc) {
  Scenario s;
  s.name = doc.name;

  std::optional<StateVector> photon;
  std::vector<int> atom_ids;
  bool in_block = false;
  std::optional<ContingencyClause> clause;

  auto& base = s.absorbers;
  auto apply_detector = [](AbsorberConfig& cfg, const DetectorDirective& v) {
    PhotonSector sec(v.sector);
    for (auto it = cfg.detectors.begin(); it != cfg.detectors.end();) {
      if (it->name == v.name || it->sector == sec) {
        it = cfg.detectors.erase(it);
      } else {
        ++it;
      }
    }
    cfg.detectors.push_back({v.name, sec});
  };

  for (const auto& sd : doc.directives) {
    if (const auto* v = std::get_if<SourceDirective>(&sd.value)) {
      StateVector k(WaveDirection::ket, kPhotonBit);
      k.add_amplitude(BasisLabel::photon_only(PhotonSector(v->sector)),
                      Complex(1.0, 0.0));
      photon = k;
      s.initial_region = v->sector;
    } else if (const auto* v = std::get_if<DualSourceDirective>(&sd.value)) {
      ElementMap e = make_dual_source(v->name, PhotonSector(v->out1),
                                      PhotonSector(v->out2), v->phase);
      photon = dual_source_prepare(e);
      s.initial_region = v->out1 + v->out2;
      s.elements.push_back(std::move(e));
    } else if (const auto* v = std::get_if<BeamsplitterDirective>(&sd.value)) {
      s.elements.push_back(make_beamsplitter(
          v->name, PhotonSector(v->in1), PhotonSector(v->in2),
          PhotonSector(v->out1), PhotonSector(v->out2)));
    } else if (const auto* v = std::get_if<MirrorDirective>(&sd.value)) {
      s.elements.push_back(
          make_mirror(v->name, PhotonSector(v->from), PhotonSector(v->to)));
    } else if (const auto* v = std::get_if<AtomDirective>(&sd.value)) {
      s.elements.push_back(make_atom_interaction(
          v->name, v->id,
          v->blocks == "z+" ? SpinLabel::z_plus : SpinLabel::z_minus,
          PhotonSector(v->in), PhotonSector(v->out)));
      atom_ids.push_back(v->id);
    } else if (const auto* v = std::get_if<DetectorDirective>(&sd.value)) {
      apply_detector(in_block ? clause->silent_config : base, *v);
    } else if (const auto* v = std::get_if<SpinDetectorDirective>(&sd.value)) {
      auto& cfg = in_block ? clause->silent_config : base;
      cfg.spin_axes[v->atom] = v->axis == 'z' ? SpinAxis::z : SpinAxis::y;
    } else if (std::get_if<UniversalAbsorberDirective>(&sd.value)) {
      (in_block ? clause->silent_config : base).universal_absorber = true;
    } else if (const auto* v = std::get_if<StageDirective>(&sd.value)) {
      s.stages.push_back({v->name, v->elements});
    } else if (const auto* v = std::get_if<ContingentDirective>(&sd.value)) {
      clause = ContingencyClause{v->detector, v->block, base};
      in_block = true;
    }
  }

  if (!photon) throw Error("scenario '" + doc.name + "' has no source");
  StateVector init = *photon;
  for (int id : atom_ids) {
    StateVector av(WaveDirection::ket, atom_bit(id));
    av.add_amplitude(BasisLabel::atom_only(id, AtomState::ground(SpinLabel::y_minus)),
                     Complex(1.0, 0.0));
    init = tensor(init, av);
  }
  s.initial = std::move(init);
  s.contingency = std::move(clause);
  return s;
}

}  // namespace tiqs

#endif  // TIQS_PARSER_HPP
