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

#ifndef TIQS_TRANSACTION_HPP
#define TIQS_TRANSACTION_HPP

#include <map>
#include <string>
#include <vector>

#include "tiqs/network.hpp"
#include "tiqs/state.hpp"

// The transaction engine. An outcome is one reading of the terminal
// absorber layer: which photon absorber fired and what every spin detector
// showed. Two independent routes assign it a probability:
//
//   born: squared magnitude of the final offer wave on the outcome's
//         terminal labels;
//   ti:   seed the outcome's confirmation wave (conjugated coefficients on
//         those labels), propagate it backward to the emitter, and read the
//         amplitude it leaves on the dagger of the initial ket.
//
// The two must agree; the engine also checks the cancellation identities
// that make the backward route work (full-wave and component-sum checks).

namespace tiqs {

inline constexpr const char* kUniversalAbsorber = "UA";

struct SpinReading {
  SpinAxis axis = SpinAxis::z;
  int sign = +1;

  friend bool operator==(const SpinReading& a, const SpinReading& b) {
    return a.axis == b.axis && a.sign == b.sign;
  }
};

inline std::string to_token(const SpinReading& r, int atom_id) {
  std::string s;
  s += to_char(r.axis);
  s += static_cast<char>('0' + atom_id);
  s += r.sign > 0 ? '+' : '-';
  return s;
}

struct Outcome {
  std::string absorber;
  std::map<int, SpinReading> spins;

  // Stable lookup key, e.g. "D,z1+,z2+".
  std::string key() const {
    std::string s = absorber;
    for (const auto& [id, r] : spins) {
      s += ',';
      s += to_token(r, id);
    }
    return s;
  }

  // Human-facing form, e.g. "(D, z1+, z2+)".
  std::string display() const {
    std::string s = "(" + absorber;
    for (const auto& [id, r] : spins) {
      s += ", ";
      s += to_token(r, id);
    }
    s += ")";
    return s;
  }

  friend bool operator==(const Outcome& a, const Outcome& b) {
    return a.absorber == b.absorber && a.spins == b.spins;
  }
};

// One outcome with the terminal labels it projects onto. Most outcomes
// cover a single label; a universal-absorber spin reading can cover two
// (either atom may be the excited one).
struct OutcomeSlot {
  Outcome outcome;
  std::vector<BasisLabel> labels;
};

// ---------------------------------------------------------------------------
// Outcome table

namespace detail {

struct AtomInfo {
  int id;
  SpinLabel blocking;
  bool staged;
  SpinAxis readout;
};

inline std::vector<AtomInfo> atom_infos(const Scenario& s) {
  std::vector<AtomInfo> out;
  for (const auto* e : s.atom_elements()) {
    const AtomInteraction& at = *e->as_atom();
    SpinAxis axis = SpinAxis::z;
    auto it = s.absorbers.spin_axes.find(at.atom_id);
    if (it != s.absorbers.spin_axes.end()) axis = it->second;
    out.push_back({at.atom_id, at.blocking, s.is_staged(e->name), axis});
  }
  return out;
}

inline std::vector<SpinLabel> ground_labels(SpinAxis axis) {
  return axis == SpinAxis::z
             ? std::vector<SpinLabel>{SpinLabel::z_plus, SpinLabel::z_minus}
             : std::vector<SpinLabel>{SpinLabel::y_plus, SpinLabel::y_minus};
}

// All terminal labels the final readout-basis ket can populate: every live
// terminal sector crossed with ground readout spins, plus, for each atom
// that can absorb the photon, the vacuum label with that atom excited.
inline std::vector<BasisLabel> terminal_labels(const Scenario& s) {
  const std::vector<AtomInfo> atoms = atom_infos(s);

  std::vector<std::vector<AtomState>> combos{{}};
  auto cross = [&](const AtomInfo& a, bool excited_slot) {
    std::vector<std::vector<AtomState>> next;
    for (const auto& base : combos) {
      if (excited_slot) {
        auto row = base;
        row.push_back(AtomState::excited_z(a.blocking));
        next.push_back(std::move(row));
      } else {
        for (SpinLabel g : ground_labels(a.readout)) {
          auto row = base;
          row.push_back(AtomState::ground(g));
          next.push_back(std::move(row));
        }
      }
    }
    combos = std::move(next);
  };

  std::vector<BasisLabel> out;
  auto emit_for_sector = [&](const PhotonSector& sec, int excited_idx) {
    combos = {{}};
    for (size_t i = 0; i < atoms.size(); ++i) {
      cross(atoms[i], static_cast<int>(i) == excited_idx);
    }
    for (const auto& row : combos) {
      BasisLabel l;
      l.photon = sec;
      for (size_t i = 0; i < atoms.size(); ++i) {
        l.atom(atoms[i].id) = row[i];
      }
      out.push_back(l);
    }
  };

  for (const auto& sec : final_sectors(s)) {
    if (sec.is_vacuum()) continue;
    emit_for_sector(sec, -1);
  }
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].staged) {
      emit_for_sector(PhotonSector::vacuum(), static_cast<int>(i));
    }
  }
  return out;
}

inline Outcome outcome_of_label(const Scenario& s, const BasisLabel& l) {
  Outcome o;
  const PhotonSector& p = *l.photon;
  if (p.is_vacuum()) {
    o.absorber = kUniversalAbsorber;
  } else if (const PhotonDetector* d = s.absorbers.detector_for(p)) {
    o.absorber = d->name;
  } else if (s.absorbers.universal_absorber) {
    o.absorber = kUniversalAbsorber;
  } else {
    throw Error("terminal label " + to_string(l) + " has no absorber");
  }
  for (const auto& [id, axis] : s.absorbers.spin_axes) {
    const AtomState& st = *l.atom(id);
    o.spins[id] = SpinReading{axis_of(st.spin), sign_of(st.spin)};
  }
  return o;
}

}  // namespace detail

// Enumerates the outcome table: named detectors in declaration order, the
// universal absorber last, spin readings in canonical (+ before -) order.
inline std::vector<OutcomeSlot> outcome_table(const Scenario& s) {
  struct Rank {
    int absorber;
    std::vector<int> spins;
    bool operator<(const Rank& o) const {
      return std::tie(absorber, spins) < std::tie(o.absorber, o.spins);
    }
  };
  auto rank_of = [&](const Outcome& o) {
    Rank r;
    r.absorber = static_cast<int>(s.absorbers.detectors.size());
    for (size_t i = 0; i < s.absorbers.detectors.size(); ++i) {
      if (s.absorbers.detectors[i].name == o.absorber) {
        r.absorber = static_cast<int>(i);
      }
    }
    for (const auto& [id, reading] : o.spins) {
      r.spins.push_back(reading.sign > 0 ? 0 : 1);
    }
    return r;
  };

  std::map<Rank, OutcomeSlot> slots;
  for (const auto& l : detail::terminal_labels(s)) {
    Outcome o = detail::outcome_of_label(s, l);
    auto [it, inserted] = slots.try_emplace(rank_of(o));
    if (inserted) it->second.outcome = o;
    it->second.labels.push_back(l);
  }

  std::vector<OutcomeSlot> out;
  out.reserve(slots.size());
  for (auto& [rank, slot] : slots) out.push_back(std::move(slot));
  return out;
}

// Final offer wave with every spin-detected atom rewritten into its readout
// basis (identity for z readers).
inline StateVector readout_final_ket(const Scenario& s) {
  StateVector ket = final_ket(s);
  for (const auto& [id, axis] : s.absorbers.spin_axes) {
    if (axis == SpinAxis::y) ket = spin_basis_transform(ket, id, SpinAxis::y);
  }
  return ket;
}

namespace detail {

inline const OutcomeSlot& find_slot(const std::vector<OutcomeSlot>& table,
                                    const Outcome& o) {
  for (const auto& slot : table) {
    if (slot.outcome.key() == o.key()) return slot;
  }
  throw Error("unknown outcome " + o.display());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Probabilities

// Independent Born-rule route: no backward propagation involved.
inline double born_probability(const Scenario& s, const Outcome& o) {
  const auto table = outcome_table(s);
  const OutcomeSlot& slot = detail::find_slot(table, o);
  const StateVector ket = readout_final_ket(s);
  double p = 0.0;
  for (const auto& l : slot.labels) p += std::norm(ket.amplitude(l));
  return p;
}

// Everything one outcome's backward pass produces.
struct ComponentResult {
  Outcome outcome;
  double ti = 0.0;
  double born = 0.0;
  // Emitter-region bra of this component, preparation basis, overflow
  // attached.
  StateVector emitter_bra;
  // Weight of this component that left the one-photon space on the way
  // back (discarded from ti).
  double overflow_weight = 0.0;
  // Magnitude of the emitter bra's part orthogonal to the expected
  // dagger(initial) direction; cancels only across components.
  double emitter_residual = 0.0;
};

namespace detail {

inline ComponentResult compute_component(const Scenario& s,
                                         const OutcomeSlot& slot,
                                         const StateVector& readout_ket) {
  StateVector seed(WaveDirection::bra, readout_ket.mask());
  for (const auto& l : slot.labels) {
    seed.add_amplitude(l, std::conj(readout_ket.amplitude(l)));
  }
  ComponentResult res;
  res.outcome = slot.outcome;
  res.born = seed.norm2();

  // Back from readout bases to the propagation (z) basis.
  for (const auto& [id, axis] : s.absorbers.spin_axes) {
    if (axis == SpinAxis::y && !seed.empty()) {
      seed = spin_basis_transform(seed, id, SpinAxis::z);
    }
  }

  const StateVector emitter = propagate_confirmation(s, seed).back().state;
  const Complex amp = inner(emitter, s.initial);
  if (std::abs(amp.imag()) > kDefaultTolerance) {
    throw Error("internal consistency: transaction amplitude for " +
                slot.outcome.display() + " has imaginary part " +
                std::to_string(amp.imag()));
  }
  res.ti = amp.real();
  res.emitter_bra = emitter;
  res.overflow_weight = emitter.overflow_weight();
  res.emitter_residual = distance(emitter, dagger(s.initial).scaled(amp));
  return res;
}

}  // namespace detail

// Transactional route: confirmation-wave amplitude at the emitter.
inline double ti_probability(const Scenario& s, const Outcome& o) {
  const auto table = outcome_table(s);
  const OutcomeSlot& slot = detail::find_slot(table, o);
  return detail::compute_component(s, slot, readout_final_ket(s)).ti;
}

// ---------------------------------------------------------------------------
// Cancellation checks

struct FullCheckResult {
  // Distance between the emitter-region bra (restricted to the source
  // sectors) and dagger(initial ket).
  double emitter_residual = 0.0;
  // Leftover magnitude on non-source sectors at the emitter region.
  double r_residual = 0.0;
  // Magnitude that left the one-photon space.
  double overflow_residual = 0.0;
  // Final-ket weight that no absorber confirms (nonzero only for broken
  // configurations; excluded from the seed).
  double unconfirmed_weight = 0.0;
  StateVector emitter_bra;
};

// Seeds the dagger of the full final ket (confirmed labels only) and runs
// it backward. For a sound absorber configuration everything except the
// dagger of the initial ket must cancel.
inline FullCheckResult full_confirmation_check(const Scenario& s) {
  const StateVector fin = final_ket(s);
  StateVector seed(WaveDirection::bra, fin.mask());
  FullCheckResult res;
  for (const auto& [l, a] : fin.amplitudes()) {
    bool confirmed = true;
    if (l.photon->is_vacuum()) {
      confirmed = s.absorbers.universal_absorber;
    } else if (s.absorbers.detector_for(*l.photon) == nullptr) {
      confirmed = s.absorbers.universal_absorber;
    }
    if (confirmed) {
      seed.add_amplitude(l, std::conj(a));
    } else {
      res.unconfirmed_weight += std::norm(a);
    }
  }

  const StateVector emitter = propagate_confirmation(s, seed).back().state;
  const std::set<PhotonSector> source = detail::initial_sectors(s);

  StateVector on_source(emitter.direction(), emitter.mask());
  StateVector off_source(emitter.direction(), emitter.mask());
  for (const auto& [l, a] : emitter.amplitudes()) {
    (source.count(*l.photon) != 0 ? on_source : off_source).add_amplitude(l, a);
  }
  res.emitter_residual = distance(on_source, dagger(s.initial));
  res.r_residual = off_source.norm();
  res.overflow_residual = std::sqrt(emitter.overflow_weight());
  res.emitter_bra = emitter;
  return res;
}

struct ComponentSumResult {
  double live_residual = 0.0;
  double overflow_residual = 0.0;
  double residual = 0.0;
};

// Backward-propagates every outcome separately and checks that the summed
// emitter bras (including overflow bookkeeping) reproduce the full-wave
// result, i.e. that all spurious terms cancel across components.
inline ComponentSumResult component_sum_check(const Scenario& s) {
  const StateVector full = full_confirmation_check(s).emitter_bra;
  const StateVector readout = readout_final_ket(s);

  StateVector sum(WaveDirection::bra, full.mask());
  for (const auto& slot : outcome_table(s)) {
    sum = add(sum, detail::compute_component(s, slot, readout).emitter_bra);
  }
  ComponentSumResult res;
  res.live_residual = distance(sum, full);
  res.overflow_residual = overflow_distance(sum, full);
  res.residual = std::hypot(res.live_residual, res.overflow_residual);
  return res;
}

// ---------------------------------------------------------------------------
// Reports

struct OutcomeRow {
  Outcome outcome;
  double ti = 0.0;
  double born = 0.0;
  double delta = 0.0;
  double overflow_weight = 0.0;
  double emitter_residual = 0.0;
};

struct TransactionReport {
  std::string scenario;
  double tolerance = kDefaultTolerance;
  std::vector<OutcomeRow> rows;
  double ti_sum = 0.0;
  double born_sum = 0.0;
  double full_emitter_residual = 0.0;
  double full_r_residual = 0.0;
  double full_overflow_residual = 0.0;
  double component_sum_residual = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

// Runs every check the engine offers at the given tolerance.
inline TransactionReport analyze(const Scenario& s,
                                 double tolerance = kDefaultTolerance) {
  TransactionReport rep;
  rep.scenario = s.name;
  rep.tolerance = tolerance;

  const StateVector readout = readout_final_ket(s);
  for (const auto& slot : outcome_table(s)) {
    ComponentResult c = detail::compute_component(s, slot, readout);
    OutcomeRow row;
    row.outcome = c.outcome;
    row.ti = c.ti;
    row.born = c.born;
    row.delta = std::abs(c.ti - c.born);
    row.overflow_weight = c.overflow_weight;
    row.emitter_residual = c.emitter_residual;
    rep.ti_sum += c.ti;
    rep.born_sum += c.born;
    if (row.delta > tolerance) {
      rep.failures.push_back("outcome " + row.outcome.display() +
                             ": |ti - born| = " + render_real(row.delta) +
                             " exceeds tolerance");
    }
    rep.rows.push_back(std::move(row));
  }
  if (std::abs(rep.ti_sum - 1.0) > tolerance) {
    rep.failures.push_back("transaction probabilities sum to " +
                           render_real(rep.ti_sum) + ", not 1");
  }

  const FullCheckResult full = full_confirmation_check(s);
  rep.full_emitter_residual = full.emitter_residual;
  rep.full_r_residual = full.r_residual;
  rep.full_overflow_residual = full.overflow_residual;
  if (full.emitter_residual > tolerance) {
    rep.failures.push_back("full-wave emitter residual " +
                           render_real(full.emitter_residual) +
                           " exceeds tolerance");
  }
  if (full.r_residual > tolerance) {
    rep.failures.push_back("full-wave non-source residual " +
                           render_real(full.r_residual) + " exceeds tolerance");
  }
  if (full.overflow_residual > tolerance) {
    rep.failures.push_back("full-wave overflow residual " +
                           render_real(full.overflow_residual) +
                           " exceeds tolerance");
  }

  const ComponentSumResult comp = component_sum_check(s);
  rep.component_sum_residual = comp.residual;
  if (comp.residual > tolerance) {
    rep.failures.push_back("component-sum residual " +
                           render_real(comp.residual) + " exceeds tolerance");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Contingent evaluation

struct BranchReport {
  std::string label;
  // Probability that the trigger detector fires under this branch's
  // configuration; must agree across branches.
  double trigger_fire_probability = 0.0;
  TransactionReport report;
};

struct ContingentReport {
  std::string scenario;
  std::string trigger_detector;
  BranchReport base;
  BranchReport silent;
  double trigger_consistency = 0.0;
  std::vector<std::string> failures;

  bool ok() const {
    return failures.empty() && base.report.ok() && silent.report.ok();
  }
};

// Evaluates both branches of a contingent setup as complete scenarios and
// checks that the shared prefix gives the trigger the same probability in
// each.
inline ContingentReport run_contingent(const ContingentScenario& cs,
                                       double tolerance = kDefaultTolerance) {
  auto element_names = [](const Scenario& s) {
    std::vector<std::string> n;
    for (const auto& e : s.elements) n.push_back(e.name);
    return n;
  };
  if (cs.base.stages != cs.silent.stages ||
      element_names(cs.base) != element_names(cs.silent) ||
      cs.base.initial_region != cs.silent.initial_region ||
      distance(cs.base.initial, cs.silent.initial) > tolerance) {
    throw Error("contingent branches disagree on the shared prefix");
  }

  ContingentReport rep;
  rep.scenario = cs.base.name;
  rep.trigger_detector = cs.trigger_detector;

  auto trigger_p = [&](const TransactionReport& r) {
    double p = 0.0;
    for (const auto& row : r.rows) {
      if (row.outcome.absorber == cs.trigger_detector) p += row.born;
    }
    return p;
  };

  rep.base.label = "base";
  rep.base.report = analyze(cs.base, tolerance);
  rep.base.trigger_fire_probability = trigger_p(rep.base.report);

  rep.silent.label = cs.silent_label;
  rep.silent.report = analyze(cs.silent, tolerance);
  rep.silent.trigger_fire_probability = trigger_p(rep.silent.report);

  rep.trigger_consistency = std::abs(rep.base.trigger_fire_probability -
                                     rep.silent.trigger_fire_probability);
  if (rep.trigger_consistency > tolerance) {
    rep.failures.push_back(
        "branches assign different probabilities to trigger '" +
        cs.trigger_detector + "' firing: " +
        render_real(rep.base.trigger_fire_probability) + " vs " +
        render_real(rep.silent.trigger_fire_probability));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Outcome spec parsing ("D,z1+,z2+" or "(D, z1+, z2+)")

inline Outcome parse_outcome_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : spec) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != '(' && ch != ')' && ch != ' ' && ch != '\t') {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.empty() || parts.front().empty()) {
    throw Error("outcome spec '" + spec + "': missing absorber name");
  }
  Outcome o;
  o.absorber = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) {
    const std::string& t = parts[i];
    if (t.size() != 3 || (t[0] != 'z' && t[0] != 'y') || !std::isdigit(t[1]) ||
        (t[2] != '+' && t[2] != '-')) {
      throw Error("outcome spec '" + spec + "': bad spin token '" + t +
                  "' (expected like z1+)");
    }
    SpinReading r;
    r.axis = t[0] == 'z' ? SpinAxis::z : SpinAxis::y;
    r.sign = t[2] == '+' ? +1 : -1;
    o.spins[t[1] - '0'] = r;
  }
  return o;
}

}  // namespace tiqs

#endif  // TIQS_TRANSACTION_HPP
