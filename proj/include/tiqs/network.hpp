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

#ifndef TIQS_NETWORK_HPP
#define TIQS_NETWORK_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tiqs/elements.hpp"
#include "tiqs/state.hpp"

// Scenario assembly and staged propagation. A scenario is an initial ket,
// an ordered list of stages (each a list of element applications at one
// region boundary), and a terminal absorber configuration. Regions are
// named after the stage that produces them; the offer wave walks them
// forward, confirmation waves walk them in reverse.

namespace tiqs {

struct Stage {
  std::string name;
  std::vector<std::string> elements;

  friend bool operator==(const Stage& a, const Stage& b) {
    return a.name == b.name && a.elements == b.elements;
  }
};

struct PhotonDetector {
  std::string name;
  PhotonSector sector;
};

// Terminal measurement layer: named photon detectors bound to sectors,
// per-atom spin readout axes, and the universal absorber that confirms
// everything nothing else claims (vacuum/excited terms and unbound live
// sectors).
struct AbsorberConfig {
  std::vector<PhotonDetector> detectors;
  std::map<int, SpinAxis> spin_axes;
  bool universal_absorber = false;

  const PhotonDetector* find_detector(const std::string& name) const {
    for (const auto& d : detectors) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }

  const PhotonDetector* detector_for(const PhotonSector& s) const {
    for (const auto& d : detectors) {
      if (d.sector == s) return &d;
    }
    return nullptr;
  }
};

// Alternative absorber placement that takes effect when a detector of the
// base configuration stays silent.
struct ContingencyClause {
  std::string trigger_detector;
  std::string branch_label;
  AbsorberConfig silent_config;
};

struct Scenario {
  std::string name;
  // As prepared by the source: live photon sectors, atoms in the y basis.
  StateVector initial;
  std::string initial_region;
  std::vector<ElementMap> elements;
  std::vector<Stage> stages;
  AbsorberConfig absorbers;
  std::optional<ContingencyClause> contingency;

  const ElementMap* find_element(const std::string& ename) const {
    for (const auto& e : elements) {
      if (e.name == ename) return &e;
    }
    return nullptr;
  }

  const ElementMap& element(const std::string& ename) const {
    const ElementMap* e = find_element(ename);
    if (e == nullptr) throw Error("unknown element '" + ename + "'");
    return *e;
  }

  // Atom-interaction elements in atom-id order.
  std::vector<const ElementMap*> atom_elements() const {
    std::vector<const ElementMap*> out;
    for (const auto& e : elements) {
      if (e.kind == ElementKind::atom_interaction) out.push_back(&e);
    }
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) {
      return a->as_atom()->atom_id < b->as_atom()->atom_id;
    });
    return out;
  }

  std::vector<int> atom_ids() const {
    std::vector<int> ids;
    for (const auto* e : atom_elements()) ids.push_back(e->as_atom()->atom_id);
    return ids;
  }

  bool is_staged(const std::string& ename) const {
    for (const auto& st : stages) {
      for (const auto& n : st.elements) {
        if (n == ename) return true;
      }
    }
    return false;
  }

  std::string final_region() const {
    return stages.empty() ? initial_region : stages.back().name;
  }

  SubsystemMask mask() const {
    SubsystemMask m = kPhotonBit;
    for (int id : atom_ids()) m |= atom_bit(id);
    return m;
  }
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
  std::string rule;
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }

  std::string to_string() const {
    std::string out;
    for (const auto& i : issues) {
      out += i.rule;
      out += ": ";
      if (!i.where.empty()) {
        out += i.where;
        out += ": ";
      }
      out += i.message;
      out += "\n";
    }
    return out;
  }
};

namespace detail {

inline std::set<PhotonSector> initial_sectors(const Scenario& s) {
  std::set<PhotonSector> out;
  for (const auto& [l, a] : s.initial.amplitudes()) {
    if (l.photon) out.insert(*l.photon);
  }
  return out;
}

// Walks sector availability through the stages. Returns the set of live
// sectors after the last stage; structural problems are appended to issues
// when a report is supplied (the engine reuses the walk with issues=null
// on already-validated scenarios).
inline std::set<PhotonSector> availability_walk(const Scenario& s,
                                                std::vector<ValidationIssue>* issues) {
  auto issue = [&](std::string rule, std::string where, std::string msg) {
    if (issues != nullptr) {
      issues->push_back({std::move(rule), std::move(where), std::move(msg)});
    }
  };

  std::set<PhotonSector> avail = initial_sectors(s);
  for (const auto& st : s.stages) {
    for (const auto& ename : st.elements) {
      const ElementMap* e = s.find_element(ename);
      if (e == nullptr) {
        issue("stage-ref", "stage " + st.name, "unknown element '" + ename + "'");
        continue;
      }
      if (!e->stageable()) {
        issue("stage-source", "stage " + st.name,
              "source element '" + ename + "' cannot be staged");
        continue;
      }
      std::vector<PhotonSector> ins = e->input_sectors();
      std::vector<PhotonSector> hit;
      for (const auto& in : ins) {
        if (avail.count(in) != 0) hit.push_back(in);
      }
      if (hit.empty()) {
        std::string names;
        for (const auto& in : ins) {
          if (!names.empty()) names += ", ";
          names += in.name;
        }
        issue("no-input", "stage " + st.name + ": element " + ename,
              "no declared input sector is available (declared: " + names + ")");
        continue;
      }
      for (const auto& in : hit) avail.erase(in);
      for (const auto& outsec : e->output_sectors()) {
        if (avail.count(outsec) != 0) {
          issue("output-collision", "stage " + st.name + ": element " + ename,
                "output sector '" + outsec.name + "' is already occupied");
        }
        avail.insert(outsec);
      }
      if (e->kind == ElementKind::atom_interaction) {
        avail.insert(PhotonSector::vacuum());
      }
    }
  }
  return avail;
}

}  // namespace detail

// Live sectors remaining after the last stage (vacuum included when an
// atom interaction can absorb the photon).
inline std::set<PhotonSector> final_sectors(const Scenario& s) {
  return detail::availability_walk(s, nullptr);
}

namespace detail {

inline void validate_into(const Scenario& s, const AbsorberConfig& cfg,
                          std::vector<ValidationIssue>& issues,
                          const std::string& prefix) {
  auto issue = [&](std::string rule, std::string where, std::string msg) {
    issues.push_back({std::move(rule), prefix + where, std::move(msg)});
  };

  // Element table sanity.
  std::set<std::string> names;
  std::set<int> atom_ids;
  for (const auto& e : s.elements) {
    if (!names.insert(e.name).second) {
      issue("duplicate-name", "element " + e.name, "element name declared twice");
    }
    if (const auto* at = e.as_atom()) {
      if (!atom_ids.insert(at->atom_id).second) {
        issue("duplicate-atom", "element " + e.name,
              "atom id " + std::to_string(at->atom_id) +
                  " already has an interaction element");
      }
    }
  }

  // Initial ket shape.
  SubsystemMask want = kPhotonBit;
  for (int id : s.atom_ids()) want |= atom_bit(id);
  if (s.initial.direction() != WaveDirection::ket) {
    issue("initial-ket", "", "initial state must be a ket");
  } else if (s.initial.mask() != want) {
    issue("initial-ket", "",
          "initial ket does not span the photon and every declared atom");
  } else if (std::abs(s.initial.norm() - 1.0) > kDefaultTolerance) {
    issue("initial-ket", "", "initial ket is not normalized");
  }

  // Stage structure: every element staged at most once, non-atom elements
  // staged exactly once. Atom elements may stay unstaged (an atom parked
  // outside the photon path still contributes its spin to the outcomes).
  std::set<std::string> staged;
  for (const auto& st : s.stages) {
    for (const auto& ename : st.elements) {
      if (!staged.insert(ename).second) {
        issue("stage-dup", "stage " + st.name,
              "element '" + ename + "' is applied more than once");
      }
    }
  }
  for (const auto& e : s.elements) {
    if (e.kind != ElementKind::atom_interaction && e.stageable() &&
        staged.count(e.name) == 0) {
      issue("unstaged-element", "element " + e.name,
            "element is never applied by any stage");
    }
  }

  // Availability flow plus terminal bindings.
  std::set<PhotonSector> fin = availability_walk(s, &issues);
  bool atoms_staged = false;
  for (const auto* e : s.atom_elements()) {
    if (s.is_staged(e->name)) atoms_staged = true;
  }

  std::set<std::string> seen_det;
  std::set<std::string> seen_sector;
  for (const auto& d : cfg.detectors) {
    if (!seen_det.insert(d.name).second) {
      issue("duplicate-binding", "detector " + d.name, "detector name declared twice");
    }
    if (d.sector.is_vacuum()) {
      issue("duplicate-binding", "detector " + d.name,
            "the vacuum sector belongs to the universal absorber");
    } else if (!seen_sector.insert(d.sector.name).second) {
      issue("duplicate-binding", "detector " + d.name,
            "sector '" + d.sector.name + "' is bound to more than one detector");
    }
    if (fin.count(d.sector) == 0 && !d.sector.is_vacuum()) {
      issue("detector-unreachable", "detector " + d.name,
            "sector '" + d.sector.name + "' never reaches the terminal region");
    }
  }
  for (const auto& sec : fin) {
    if (sec.is_vacuum()) continue;
    if (cfg.detector_for(sec) == nullptr && !cfg.universal_absorber) {
      issue("unconfirmed-sector", "",
            "unconfirmed sector '" + sec.name + "' (no detector and no universal absorber)");
    }
  }
  if (atoms_staged && !cfg.universal_absorber) {
    issue("missing-universal-absorber", "",
          "unconfirmed Vacuum sector: excited-atom terms need the universal absorber");
  }

  // Spin readout coverage.
  for (const auto& [id, axis] : cfg.spin_axes) {
    if (atom_ids.count(id) == 0) {
      issue("unknown-atom", "spin detector",
            "no atom with id " + std::to_string(id));
    } else if (axis == SpinAxis::y) {
      const ElementMap* ae = nullptr;
      for (const auto* e : s.atom_elements()) {
        if (e->as_atom()->atom_id == id) ae = e;
      }
      if (ae != nullptr && s.is_staged(ae->name)) {
        issue("y-readout-excitable", "spin detector",
              "atom " + std::to_string(id) +
                  " can be excited; excited labels have no y-basis readout");
      }
    }
  }
  for (int id : s.atom_ids()) {
    if (cfg.spin_axes.count(id) == 0) {
      issue("unmeasured-atom", "",
            "atom " + std::to_string(id) + " has no spin detector");
    }
  }
}

}  // namespace detail

// Structural validation; returns diagnostics instead of throwing so a
// caller can report every problem at once.
inline ValidationReport validate(const Scenario& s) {
  ValidationReport rep;
  detail::validate_into(s, s.absorbers, rep.issues, "");
  if (s.contingency) {
    const auto& c = *s.contingency;
    if (s.absorbers.find_detector(c.trigger_detector) == nullptr) {
      rep.issues.push_back({"trigger-unknown", "contingent",
                            "trigger detector '" + c.trigger_detector +
                                "' is not a detector of the base configuration"});
    }
    detail::validate_into(s, c.silent_config, rep.issues,
                          "silent branch: ");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Contingent scenarios

// A contingent setup expanded into its two complete branch scenarios. Both
// share the identical prefix (initial ket, elements, stages); they differ
// only in the absorber layer.
struct ContingentScenario {
  Scenario base;
  Scenario silent;
  std::string trigger_detector;
  std::string silent_label;
};

inline ContingentScenario make_contingent(const Scenario& s) {
  if (!s.contingency) {
    throw Error("scenario '" + s.name + "' has no contingency clause");
  }
  ContingentScenario cs;
  cs.trigger_detector = s.contingency->trigger_detector;
  cs.silent_label = s.contingency->branch_label;
  cs.base = s;
  cs.base.contingency.reset();
  cs.silent = cs.base;
  cs.silent.absorbers = s.contingency->silent_config;
  return cs;
}

// ---------------------------------------------------------------------------
// Staged propagation

struct RegionState {
  std::string region;
  StateVector state;
};

namespace detail {

// Rewrites one atom's ground z labels into the y basis, leaving excited
// labels (which have no y expansion) untouched. Used at the emitter
// boundary where the prepared atoms are y-labeled.
inline StateVector rewrite_ground_to_y(const StateVector& x, int atom_id) {
  StateVector out(x.direction(), x.mask());
  const bool conj = x.direction() == WaveDirection::bra;
  for (const auto& [l, a] : x.amplitudes()) {
    const AtomState& st = *l.atom(atom_id);
    if (!st.excited && axis_of(st.spin) == SpinAxis::z) {
      for (const auto& [spin, c] : spin_expand(st.spin, SpinAxis::y)) {
        BasisLabel nl = l;
        nl.atom(atom_id) = AtomState::ground(spin);
        out.add_amplitude(nl, a * (conj ? std::conj(c) : c));
      }
    } else {
      out.add_amplitude(l, a);
    }
  }
  for (const auto& [l, a] : x.overflow()) out.add_overflow(l, a);
  out.prune();
  return out;
}

// The propagation basis is z; the prepared initial ket carries y labels.
inline StateVector to_propagation_basis(const Scenario& s) {
  StateVector st = s.initial;
  for (int id : s.atom_ids()) {
    bool any_y = false;
    for (const auto& [l, a] : st.amplitudes()) {
      if (axis_of(l.atom(id)->spin) == SpinAxis::y) any_y = true;
    }
    if (any_y) st = spin_basis_transform(st, id, SpinAxis::z);
  }
  return st;
}

}  // namespace detail

// Runs the offer wave forward. Row 0 is the initial region in the
// propagation (z) basis; each later row is the state after one stage.
inline std::vector<RegionState> propagate_offer(const Scenario& s) {
  std::vector<RegionState> rows;
  StateVector st = detail::to_propagation_basis(s);
  rows.push_back({s.initial_region, st});
  for (const auto& stage : s.stages) {
    for (const auto& ename : stage.elements) {
      st = apply_forward(s.element(ename), st);
    }
    rows.push_back({stage.name, st});
  }
  return rows;
}

inline StateVector final_ket(const Scenario& s) {
  return propagate_offer(s).back().state;
}

// Runs a confirmation wave backward from a seed bra on the terminal
// region. Rows walk the regions in reverse; the extra last row, named
// "emitter", is the emitter-region bra rewritten into the preparation
// (y) basis of every atom. Overflow terms accumulate along the way and
// stay attached to the states.
inline std::vector<RegionState> propagate_confirmation(const Scenario& s,
                                                       const StateVector& seed) {
  if (seed.direction() != WaveDirection::bra) {
    throw Error("propagate_confirmation: seed must be a bra");
  }
  if (seed.mask() != s.mask()) {
    throw Error("propagate_confirmation: seed does not span the scenario subsystems");
  }
  std::vector<RegionState> rows;
  StateVector st = seed;
  rows.push_back({s.final_region(), st});
  for (auto it = s.stages.rbegin(); it != s.stages.rend(); ++it) {
    for (auto en = it->elements.rbegin(); en != it->elements.rend(); ++en) {
      st = apply_backward(s.element(*en), st);
    }
    auto next = std::next(it);
    rows.push_back({next == s.stages.rend() ? s.initial_region : next->name, st});
  }
  for (int id : s.atom_ids()) st = detail::rewrite_ground_to_y(st, id);
  rows.push_back({"emitter", st});
  return rows;
}

}  // namespace tiqs

#endif  // TIQS_NETWORK_HPP
