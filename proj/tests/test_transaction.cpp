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

#include <random>

#include "property.hpp"
#include "tiqs/builtins.hpp"
#include "tiqs/parser.hpp"
#include "tiqs/transaction.hpp"

using namespace tiqs;

namespace {

const double kR2 = std::sqrt(2.0);

Scenario load_builtin(const std::string& name) {
  const Builtin* b = find_builtin(name);
  REQUIRE(b != nullptr);
  ParseResult pr = parse_scenario(b->text);
  REQUIRE(pr.ok());
  return to_scenario(*pr.doc);
}

const OutcomeRow& row_of(const TransactionReport& rep, const std::string& key) {
  for (const auto& r : rep.rows) {
    if (r.outcome.key() == key) return r;
  }
  FAIL("no outcome row " << key);
  return rep.rows.front();
}

BasisLabel qle(const std::string& p, SpinLabel a1, SpinLabel a2) {
  return BasisLabel::full(PhotonSector(p), AtomState::ground(a1),
                          AtomState::ground(a2));
}

constexpr SpinLabel zp = SpinLabel::z_plus;
constexpr SpinLabel zm = SpinLabel::z_minus;
constexpr SpinLabel yp = SpinLabel::y_plus;
constexpr SpinLabel ym = SpinLabel::y_minus;

}  // namespace

TEST_CASE("the outcome table covers every absorber reading once") {
  Scenario s = load_builtin("qle-single");
  const auto table = outcome_table(s);
  REQUIRE(table.size() == 11);

  std::vector<std::string> keys;
  for (const auto& slot : table) keys.push_back(slot.outcome.key());
  REQUIRE(keys == std::vector<std::string>{
                      "C,z1+,z2+", "C,z1+,z2-", "C,z1-,z2+", "C,z1-,z2-",
                      "D,z1+,z2+", "D,z1+,z2-", "D,z1-,z2+", "D,z1-,z2-",
                      "UA,z1+,z2+", "UA,z1-,z2+", "UA,z1-,z2-"});

  SECTION("a universal-absorber reading may cover two terminal labels") {
    for (const auto& slot : table) {
      if (slot.outcome.key() == "UA,z1-,z2+") {
        // Either atom may be the excited one and both readings collapse to
        // the same spin record.
        REQUIRE(slot.labels.size() == 2);
      } else {
        REQUIRE(slot.labels.size() == 1);
      }
    }
  }
  SECTION("outcome display form") {
    REQUIRE(table[4].outcome.display() == "(D, z1+, z2+)");
  }
}

TEST_CASE("qle probabilities match the hand-derived table on both routes") {
  Scenario s = load_builtin("qle-single");
  TransactionReport rep = analyze(s);
  std::string failure_log;
  for (const auto& f : rep.failures) failure_log += f + "\n";
  INFO(failure_log);
  REQUIRE(rep.ok());

  struct Want {
    const char* key;
    double p;
    double overflow;
  };
  const std::vector<Want> want = {
      {"C,z1+,z2+", 0.0625, 0.03125}, {"C,z1+,z2-", 0.25, 0.0},
      {"C,z1-,z2+", 0.0, 0.0},        {"C,z1-,z2-", 0.0625, 0.03125},
      {"D,z1+,z2+", 0.0625, 0.03125}, {"D,z1+,z2-", 0.0, 0.0},
      {"D,z1-,z2+", 0.0, 0.0},        {"D,z1-,z2-", 0.0625, 0.03125},
      {"UA,z1+,z2+", 0.125, 0.0},     {"UA,z1-,z2+", 0.25, 0.0},
      {"UA,z1-,z2-", 0.125, 0.0},
  };
  for (const auto& w : want) {
    const OutcomeRow& r = row_of(rep, w.key);
    INFO(w.key);
    REQUIRE(std::abs(r.ti - w.p) <= 1e-12);
    REQUIRE(std::abs(r.born - w.p) <= 1e-12);
    REQUIRE(r.delta <= 1e-12);
    REQUIRE(std::abs(r.overflow_weight - w.overflow) <= 1e-12);
  }
  REQUIRE(std::abs(rep.ti_sum - 1.0) <= 1e-12);
  REQUIRE(std::abs(rep.born_sum - 1.0) <= 1e-12);

  SECTION("the dark detector fires in an eighth of all runs") {
    double pd = 0.0;
    for (const auto& r : rep.rows) {
      if (r.outcome.absorber == "D") pd += r.ti;
    }
    REQUIRE(std::abs(pd - 0.125) <= 1e-12);
  }
}

TEST_CASE("dual-source preparation leaves the whole table unchanged") {
  TransactionReport a = analyze(load_builtin("qle-single"));
  TransactionReport b = analyze(load_builtin("qle-dual-source"));
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].outcome.key() == b.rows[i].outcome.key());
    REQUIRE(std::abs(a.rows[i].ti - b.rows[i].ti) <= 1e-12);
    REQUIRE(std::abs(a.rows[i].born - b.rows[i].born) <= 1e-12);
  }
}

TEST_CASE("single outcome probabilities via the public entry points") {
  Scenario s = load_builtin("qle-single");
  Outcome o = parse_outcome_spec("D,z1+,z2+");
  REQUIRE(std::abs(ti_probability(s, o) - 0.0625) <= 1e-12);
  REQUIRE(std::abs(born_probability(s, o) - 0.0625) <= 1e-12);

  Outcome zero = parse_outcome_spec("D,z1+,z2-");
  REQUIRE(ti_probability(s, zero) == 0.0);
  REQUIRE(born_probability(s, zero) == 0.0);

  REQUIRE_THROWS_AS(ti_probability(s, parse_outcome_spec("NOPE")), Error);
}

TEST_CASE("one component's backward pass in full detail") {
  Scenario s = load_builtin("qle-single");
  const auto table = outcome_table(s);
  const StateVector readout = readout_final_ket(s);

  for (const auto& slot : table) {
    if (slot.outcome.key() != "D,z1+,z2+") continue;
    ComponentResult c = detail::compute_component(s, slot, readout);

    REQUIRE(std::abs(c.ti - 0.0625) <= 1e-12);
    REQUIRE(std::abs(c.born - 0.0625) <= 1e-12);

    // The piece that would need a second photon is parked, label and all.
    REQUIRE(std::abs(c.overflow_weight - 0.03125) <= 1e-12);
    const BasisLabel two_photon = qle("v'", zp, zp);
    REQUIRE(c.emitter_bra.overflow().count(two_photon) == 1);
    REQUIRE(std::abs(c.emitter_bra.overflow().at(two_photon) -
                     Complex(1.0 / (4.0 * kR2), 0.0)) <= 1e-15);

    // Emitter-region coefficients in the preparation basis.
    REQUIRE(std::abs(c.emitter_bra.amplitude(qle("s", ym, ym)) -
                     Complex(0.0625, 0.0)) <= 1e-15);
    REQUIRE(std::abs(c.emitter_bra.amplitude(qle("s", yp, yp)) -
                     Complex(-0.0625, 0.0)) <= 1e-15);
    REQUIRE(std::abs(c.emitter_bra.amplitude(qle("r", ym, ym)) -
                     Complex(0.0, -0.0625)) <= 1e-15);

    // One component alone leaves plenty on non-source directions; only the
    // sum over all outcomes cancels it.
    REQUIRE(std::abs(c.emitter_residual - std::sqrt(7.0) / 16.0) <= 1e-12);
  }
}

TEST_CASE("full-wave cancellation holds for every built-in") {
  for (const auto& b : builtins()) {
    Scenario s = load_builtin(b.name);
    if (s.contingency) continue;  // branch scenarios are covered below
    FullCheckResult res = full_confirmation_check(s);
    INFO(b.name);
    REQUIRE(res.emitter_residual <= 1e-12);
    REQUIRE(res.r_residual <= 1e-12);
    REQUIRE(res.overflow_residual <= 1e-12);
    REQUIRE(res.unconfirmed_weight == 0.0);
    REQUIRE(distance(res.emitter_bra, dagger(s.initial)) <= 1e-12);
  }
}

TEST_CASE("component sums reproduce the full confirmation wave") {
  for (const auto& b : builtins()) {
    Scenario s = load_builtin(b.name);
    if (s.contingency) continue;
    ComponentSumResult res = component_sum_check(s);
    INFO(b.name);
    REQUIRE(res.live_residual <= 1e-12);
    REQUIRE(res.overflow_residual <= 1e-12);
    REQUIRE(res.residual <= 1e-12);
  }
}

TEST_CASE("deleting an absorber shows up as exactly its forward weight") {
  // The seed skips unconfirmed labels, so backward norm conservation turns
  // the missing absorber's weight w into residual^2 = w, split across the
  // emitter, non-source, and overflow contributions.
  Scenario s = load_builtin("ifm-with-object");
  auto& dets = s.absorbers.detectors;
  for (auto it = dets.begin(); it != dets.end(); ++it) {
    if (it->name == "O") {
      dets.erase(it);
      break;
    }
  }
  FullCheckResult res = full_confirmation_check(s);
  REQUIRE(std::abs(res.unconfirmed_weight - 0.5) <= 1e-12);
  const double residual2 = res.emitter_residual * res.emitter_residual +
                           res.r_residual * res.r_residual +
                           res.overflow_residual * res.overflow_residual;
  REQUIRE(std::abs(residual2 - 0.5) <= 1e-12);
}

TEST_CASE("a bare splitter's components sum to the dagger of the source ket") {
  ParseResult pr = parse_scenario(
      "scenario toy\n"
      "source S emits s\n"
      "beamsplitter BS in s r out a b\n"
      "detector DA absorbs a\n"
      "detector DB absorbs b\n"
      "stage g : BS\n");
  REQUIRE(pr.ok());
  Scenario s = to_scenario(*pr.doc);
  REQUIRE(validate(s).ok());

  const auto table = outcome_table(s);
  REQUIRE(table.size() == 2);
  const StateVector readout = readout_final_ket(s);

  const BasisLabel src = BasisLabel::photon_only(PhotonSector("s"));
  const BasisLabel ref = BasisLabel::photon_only(PhotonSector("r"));

  StateVector sum(WaveDirection::bra, kPhotonBit);
  for (const auto& slot : table) {
    ComponentResult c = detail::compute_component(s, slot, readout);
    REQUIRE(std::abs(c.ti - 0.5) <= 1e-12);
    // Each branch leaves half the weight on the unused input port, with
    // opposite phases between the two outcomes.
    REQUIRE(std::abs(c.emitter_bra.amplitude(src) - Complex(0.5, 0.0)) <= 1e-12);
    REQUIRE(std::abs(std::abs(c.emitter_bra.amplitude(ref).imag()) - 0.5) <= 1e-12);
    sum = add(sum, c.emitter_bra);
  }
  REQUIRE(distance(sum, dagger(s.initial)) <= 1e-12);
  REQUIRE(std::abs(sum.amplitude(ref)) <= 1e-12);
}

TEST_CASE("a single detector's component is the full confirmation wave") {
  ParseResult pr = parse_scenario(
      "scenario line\n"
      "source S emits a\n"
      "mirror M a -> b\n"
      "detector D absorbs b\n"
      "stage g : M\n");
  REQUIRE(pr.ok());
  Scenario s = to_scenario(*pr.doc);
  REQUIRE(validate(s).ok());

  const auto table = outcome_table(s);
  REQUIRE(table.size() == 1);
  ComponentResult c =
      detail::compute_component(s, table[0], readout_final_ket(s));
  FullCheckResult full = full_confirmation_check(s);
  REQUIRE(distance(c.emitter_bra, full.emitter_bra) <= 1e-15);
  REQUIRE(c.ti == 1.0);
}

TEST_CASE("contingent branches agree on the shared prefix") {
  Scenario s = load_builtin("maudlin-contingent");
  ContingentScenario cs = make_contingent(s);
  ContingentReport rep = run_contingent(cs);

  REQUIRE(rep.ok());
  REQUIRE(rep.trigger_detector == "C");
  REQUIRE(std::abs(rep.base.trigger_fire_probability - 0.5) <= 1e-12);
  REQUIRE(std::abs(rep.silent.trigger_fire_probability - 0.5) <= 1e-12);
  REQUIRE(rep.trigger_consistency <= 1e-12);

  const OutcomeRow& base_c = row_of(rep.base.report, "C");
  const OutcomeRow& base_ua = row_of(rep.base.report, "UA");
  REQUIRE(std::abs(base_c.ti - 0.5) <= 1e-12);
  REQUIRE(std::abs(base_ua.ti - 0.5) <= 1e-12);

  const OutcomeRow& silent_c = row_of(rep.silent.report, "C");
  const OutcomeRow& silent_d = row_of(rep.silent.report, "D");
  REQUIRE(std::abs(silent_c.ti - 0.5) <= 1e-12);
  REQUIRE(std::abs(silent_d.ti - 0.5) <= 1e-12);

  SECTION("a tampered prefix is rejected") {
    ContingentScenario bad = cs;
    bad.silent.initial = StateVector(WaveDirection::ket, kPhotonBit);
    bad.silent.initial.add_amplitude(
        BasisLabel::photon_only(PhotonSector("r")), Complex(1.0, 0.0));
    REQUIRE_THROWS_AS(run_contingent(bad), Error);
  }
}

TEST_CASE("interaction-free measurement probabilities") {
  TransactionReport with = analyze(load_builtin("ifm-with-object"));
  REQUIRE(with.ok());
  REQUIRE(std::abs(row_of(with, "O").ti - 0.5) <= 1e-12);
  REQUIRE(std::abs(row_of(with, "C").ti - 0.25) <= 1e-12);
  REQUIRE(std::abs(row_of(with, "D").ti - 0.25) <= 1e-12);

  TransactionReport empty = analyze(load_builtin("ifm-no-object"));
  REQUIRE(empty.ok());
  REQUIRE(std::abs(row_of(empty, "C").ti - 1.0) <= 1e-12);
  REQUIRE(std::abs(row_of(empty, "D").ti - 0.0) <= 1e-12);
}

TEST_CASE("probabilities are invariant under a global source phase") {
  Scenario s = load_builtin("qle-single");
  TransactionReport before = analyze(s);
  s.initial = s.initial.scaled(std::polar(1.0, 1.234567));
  TransactionReport after = analyze(s);
  REQUIRE(after.ok());
  for (size_t i = 0; i < before.rows.size(); ++i) {
    REQUIRE(std::abs(before.rows[i].ti - after.rows[i].ti) <= 1e-12);
  }
}

TEST_CASE("probabilities are invariant under photon sector renaming") {
  const Builtin* b = find_builtin("qle-single");
  REQUIRE(b != nullptr);
  std::string text = b->text;
  // Rename every photon sector token; names only appear as whole tokens.
  for (const auto& [from, to] :
       std::vector<std::pair<std::string, std::string>>{
           {" s\n", " srcA\n"},  {" s ", " srcA "},  {" u ", " armU "},
           {" v\n", " armV\n"},  {" v ", " armV "},  {" u' ", " armUU "},
           {" u'\n", " armUU\n"}, {" v' ", " armVV "}, {" v'\n", " armVV\n"},
           {" r ", " refl "},    {" d\n", " dark\n"}, {" d ", " dark "},
           {" c\n", " bright\n"}}) {
    size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  ParseResult pr = parse_scenario(text);
  REQUIRE(pr.ok());
  Scenario renamed = to_scenario(*pr.doc);
  REQUIRE(validate(renamed).ok());

  TransactionReport a = analyze(load_builtin("qle-single"));
  TransactionReport c = analyze(renamed);
  REQUIRE(a.rows.size() == c.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].outcome.key() == c.rows[i].outcome.key());
    REQUIRE(std::abs(a.rows[i].ti - c.rows[i].ti) <= 1e-12);
  }
}

TEST_CASE("outcome spec parsing") {
  Outcome o = parse_outcome_spec("D,z1+,z2-");
  REQUIRE(o.absorber == "D");
  REQUIRE(o.spins.at(1) == SpinReading{SpinAxis::z, +1});
  REQUIRE(o.spins.at(2) == SpinReading{SpinAxis::z, -1});
  REQUIRE(o.key() == "D,z1+,z2-");
  REQUIRE(o.display() == "(D, z1+, z2-)");

  Outcome padded = parse_outcome_spec("(D, z1+, z2-)");
  REQUIRE(padded == o);

  Outcome bare = parse_outcome_spec("UA");
  REQUIRE(bare.absorber == "UA");
  REQUIRE(bare.spins.empty());

  REQUIRE_THROWS_AS(parse_outcome_spec(""), Error);
  REQUIRE_THROWS_AS(parse_outcome_spec("D,x1+"), Error);
  REQUIRE_THROWS_AS(parse_outcome_spec("D,z9"), Error);
}

TEST_CASE("randomized networks: both probability routes agree everywhere") {
  std::mt19937 rng(prop::kSeed);
  for (int i = 0; i < prop::kCases; ++i) {
    prop::PropertyCase pc = prop::make_random_case(rng, i);
    INFO("case " << i << " seed " << prop::kSeed);
    REQUIRE(validate(pc.scenario).ok());

    TransactionReport rep = analyze(pc.scenario);
    REQUIRE(rep.ok());
    REQUIRE(std::abs(rep.ti_sum - 1.0) <= 1e-12);
    for (const auto& row : rep.rows) {
      REQUIRE(std::abs(row.ti - row.born) <= 1e-12);
      REQUIRE(row.overflow_weight == 0.0);
    }

    // Independent Born oracle over plain sector maps.
    oracle::Wave w = oracle::propagate(pc.steps, {{pc.scenario.initial_region,
                                                   oracle::Complex(1.0, 0.0)}});
    for (const auto& row : rep.rows) {
      auto it = w.find(pc.detector_sector.at(row.outcome.absorber));
      const double born = it == w.end() ? 0.0 : std::norm(it->second);
      REQUIRE(std::abs(row.ti - born) <= 1e-12);
    }

    // Element-level checks on every element of the case.
    for (const auto& e : pc.scenario.elements) {
      std::vector<BasisLabel> domain;
      for (const auto& in : e.input_sectors()) {
        domain.push_back(BasisLabel::photon_only(in));
      }
      oracle::ElementMatrix m = oracle::forward_matrix(e, domain);
      REQUIRE(oracle::isometry_defect(m) <= 1e-12);
      REQUIRE(oracle::transpose_defect(e, m) == 0.0);
    }
  }
}
