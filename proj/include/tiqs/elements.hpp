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

#ifndef TIQS_ELEMENTS_HPP
#define TIQS_ELEMENTS_HPP

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "tiqs/state.hpp"

// Physical element maps. Each element has a forward action on kets and a
// backward action on bras that is the plain transpose of the forward one
// (bras being stored pre-conjugated). Labels whose photon sector an element
// does not touch pass through unchanged, so one element application is
// linear over the whole sparse state.

namespace tiqs {

enum class ElementKind {
  beamsplitter,
  mirror,
  atom_interaction,
  relabel,
  dual_source,
};

inline const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::beamsplitter:
      return "beamsplitter";
    case ElementKind::mirror:
      return "mirror";
    case ElementKind::atom_interaction:
      return "atom-interaction";
    case ElementKind::relabel:
      return "relabel";
    case ElementKind::dual_source:
      return "dual-source";
  }
  return "?";
}

// Two-port splitter. coeff[j][k] is the amplitude of out_j in the forward
// image of in_k; the default network convention is
//   in1 -> (i*out1 + out2)/sqrt2,  in2 -> (out1 + i*out2)/sqrt2,
// i.e. a factor i on the reflected port.
struct Beamsplitter {
  PhotonSector in1, in2, out1, out2;
  std::array<std::array<Complex, 2>, 2> coeff;
};

// Pure sector renaming with identity phase; used for both mirrors and free
// evolution relabeling.
struct Relabel {
  PhotonSector from, to;
};

// Two-level atom gating one interferometer arm. A photon in mode_in meeting
// the blocking spin component is absorbed (photon slot goes to vacuum, atom
// label gains the excitation flag); the other spin component lets the
// photon through into mode_out. Excitation is permanent within a run.
struct AtomInteraction {
  int atom_id = 1;
  SpinLabel blocking = SpinLabel::z_minus;
  PhotonSector mode_in, mode_out;
};

// Pair of phase-locked single-photon emitters feeding two sectors directly.
struct DualSource {
  PhotonSector out1, out2;
  double relative_phase = 0.0;
};

struct ElementMap {
  std::string name;
  ElementKind kind = ElementKind::relabel;
  std::variant<Beamsplitter, Relabel, AtomInteraction, DualSource> op;

  bool stageable() const { return kind != ElementKind::dual_source; }

  const AtomInteraction* as_atom() const {
    return std::get_if<AtomInteraction>(&op);
  }

  std::vector<PhotonSector> input_sectors() const {
    switch (kind) {
      case ElementKind::beamsplitter: {
        const auto& b = std::get<Beamsplitter>(op);
        return {b.in1, b.in2};
      }
      case ElementKind::mirror:
      case ElementKind::relabel:
        return {std::get<Relabel>(op).from};
      case ElementKind::atom_interaction:
        return {std::get<AtomInteraction>(op).mode_in};
      case ElementKind::dual_source:
        return {};
    }
    return {};
  }

  std::vector<PhotonSector> output_sectors() const {
    switch (kind) {
      case ElementKind::beamsplitter: {
        const auto& b = std::get<Beamsplitter>(op);
        return {b.out1, b.out2};
      }
      case ElementKind::mirror:
      case ElementKind::relabel:
        return {std::get<Relabel>(op).to};
      case ElementKind::atom_interaction:
        return {std::get<AtomInteraction>(op).mode_out};
      case ElementKind::dual_source: {
        const auto& d = std::get<DualSource>(op);
        return {d.out1, d.out2};
      }
    }
    return {};
  }
};

// ---------------------------------------------------------------------------
// Factories

namespace detail {

inline void require_distinct_live(const std::string& elem,
                                  const std::vector<PhotonSector>& sectors) {
  for (size_t i = 0; i < sectors.size(); ++i) {
    if (sectors[i].is_vacuum()) {
      throw Error("element '" + elem + "': the vacuum sector cannot be a port");
    }
    for (size_t j = i + 1; j < sectors.size(); ++j) {
      if (sectors[i] == sectors[j]) {
        throw Error("element '" + elem + "': duplicate port sector '" +
                    sectors[i].name + "'");
      }
    }
  }
}

// Columns of a 2x2 must be orthonormal for the splitter to be an isometry.
inline void require_unitary(const std::string& elem,
                            const std::array<std::array<Complex, 2>, 2>& m) {
  auto col = [&](int k) { return std::array<Complex, 2>{m[0][k], m[1][k]}; };
  auto dot = [](const std::array<Complex, 2>& a,
                const std::array<Complex, 2>& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  };
  const Complex n0 = dot(col(0), col(0));
  const Complex n1 = dot(col(1), col(1));
  const Complex off = dot(col(0), col(1));
  if (std::abs(n0 - 1.0) > kDefaultTolerance ||
      std::abs(n1 - 1.0) > kDefaultTolerance ||
      std::abs(off) > kDefaultTolerance) {
    throw Error("element '" + elem + "': coefficients are not unitary");
  }
}

}  // namespace detail

inline ElementMap make_beamsplitter(std::string name, PhotonSector in1,
                                    PhotonSector in2, PhotonSector out1,
                                    PhotonSector out2) {
  detail::require_distinct_live(name, {in1, in2});
  detail::require_distinct_live(name, {out1, out2});
  const double r = 1.0 / std::sqrt(2.0);
  Beamsplitter b{in1, in2, out1, out2,
                 {{{Complex(0.0, r), Complex(r, 0.0)},
                   {Complex(r, 0.0), Complex(0.0, r)}}}};
  return ElementMap{std::move(name), ElementKind::beamsplitter, b};
}

inline ElementMap make_beamsplitter(std::string name, PhotonSector in1,
                                    PhotonSector in2, PhotonSector out1,
                                    PhotonSector out2,
                                    std::array<std::array<Complex, 2>, 2> coeff) {
  detail::require_distinct_live(name, {in1, in2});
  detail::require_distinct_live(name, {out1, out2});
  detail::require_unitary(name, coeff);
  Beamsplitter b{in1, in2, out1, out2, coeff};
  return ElementMap{std::move(name), ElementKind::beamsplitter, b};
}

inline ElementMap make_mirror(std::string name, PhotonSector from,
                              PhotonSector to) {
  detail::require_distinct_live(name, {from, to});
  return ElementMap{std::move(name), ElementKind::mirror, Relabel{from, to}};
}

inline ElementMap make_relabel(std::string name, PhotonSector from,
                               PhotonSector to) {
  detail::require_distinct_live(name, {from, to});
  return ElementMap{std::move(name), ElementKind::relabel, Relabel{from, to}};
}

inline ElementMap make_atom_interaction(std::string name, int atom_id,
                                        SpinLabel blocking, PhotonSector in,
                                        PhotonSector out) {
  if (atom_id != 1 && atom_id != 2) {
    throw Error("element '" + name + "': atom id must be 1 or 2");
  }
  if (axis_of(blocking) != SpinAxis::z) {
    throw Error("element '" + name + "': blocking spin must be a z label");
  }
  detail::require_distinct_live(name, {in, out});
  return ElementMap{std::move(name), ElementKind::atom_interaction,
                    AtomInteraction{atom_id, blocking, in, out}};
}

inline ElementMap make_dual_source(std::string name, PhotonSector out1,
                                   PhotonSector out2, double relative_phase) {
  detail::require_distinct_live(name, {out1, out2});
  return ElementMap{std::move(name), ElementKind::dual_source,
                    DualSource{out1, out2, relative_phase}};
}

// One-photon superposition (i*out1 + e^{i*phase}*out2)/sqrt2 emitted by a
// pair of phase-locked sources, photon slot only.
inline StateVector dual_source_prepare(const DualSource& d) {
  const double r = 1.0 / std::sqrt(2.0);
  StateVector out(WaveDirection::ket, kPhotonBit);
  out.add_amplitude(BasisLabel::photon_only(d.out1), Complex(0.0, r));
  out.add_amplitude(BasisLabel::photon_only(d.out2),
                    std::polar(r, d.relative_phase));
  return out;
}

inline StateVector dual_source_prepare(const ElementMap& e) {
  const auto* d = std::get_if<DualSource>(&e.op);
  if (d == nullptr) throw Error("element '" + e.name + "' is not a dual source");
  return dual_source_prepare(*d);
}

// ---------------------------------------------------------------------------
// Forward / backward application

namespace detail {

inline void require_photon_span(const ElementMap& e, const StateVector& x) {
  if ((x.mask() & kPhotonBit) == 0u) {
    throw Error("element '" + e.name + "': state has no photon slot");
  }
}

template <typename Emit>
void beamsplitter_forward_label(const Beamsplitter& b, const std::string& elem,
                                const BasisLabel& l, Complex a, Emit&& emit) {
  const PhotonSector& p = *l.photon;
  if (p == b.out1 || p == b.out2) {
    throw Error("element '" + elem + "': input state already occupies output sector '" +
                p.name + "'");
  }
  int k = p == b.in1 ? 0 : p == b.in2 ? 1 : -1;
  if (k < 0) {
    emit(l, a);
    return;
  }
  BasisLabel l1 = l, l2 = l;
  l1.photon = b.out1;
  l2.photon = b.out2;
  emit(l1, a * b.coeff[0][k]);
  emit(l2, a * b.coeff[1][k]);
}

template <typename Emit>
void beamsplitter_backward_label(const Beamsplitter& b, const std::string& elem,
                                 const BasisLabel& l, Complex a, Emit&& emit) {
  const PhotonSector& p = *l.photon;
  if (p == b.in1 || p == b.in2) {
    throw Error("element '" + elem + "': confirmation wave already occupies input sector '" +
                p.name + "'");
  }
  int j = p == b.out1 ? 0 : p == b.out2 ? 1 : -1;
  if (j < 0) {
    emit(l, a);
    return;
  }
  BasisLabel l1 = l, l2 = l;
  l1.photon = b.in1;
  l2.photon = b.in2;
  emit(l1, a * b.coeff[j][0]);
  emit(l2, a * b.coeff[j][1]);
}

}  // namespace detail

// Applies one element in the forward (offer wave) direction.
inline StateVector apply_forward(const ElementMap& e, const StateVector& x) {
  if (x.direction() != WaveDirection::ket) {
    throw Error("element '" + e.name + "': forward action expects a ket");
  }
  if (!e.stageable()) {
    throw Error("element '" + e.name + "': sources cannot be applied in a stage");
  }
  detail::require_photon_span(e, x);

  StateVector out(x.direction(), x.mask());
  auto emit = [&out](const BasisLabel& l, Complex a) { out.add_amplitude(l, a); };

  switch (e.kind) {
    case ElementKind::beamsplitter: {
      const auto& b = std::get<Beamsplitter>(e.op);
      for (const auto& [l, a] : x.amplitudes()) {
        detail::beamsplitter_forward_label(b, e.name, l, a, emit);
      }
      break;
    }
    case ElementKind::mirror:
    case ElementKind::relabel: {
      const auto& m = std::get<Relabel>(e.op);
      for (const auto& [l, a] : x.amplitudes()) {
        const PhotonSector& p = *l.photon;
        if (p == m.to) {
          throw Error("element '" + e.name + "': input state already occupies output sector '" +
                      p.name + "'");
        }
        if (p == m.from) {
          BasisLabel nl = l;
          nl.photon = m.to;
          emit(nl, a);
        } else {
          emit(l, a);
        }
      }
      break;
    }
    case ElementKind::atom_interaction: {
      const auto& at = std::get<AtomInteraction>(e.op);
      if ((x.mask() & atom_bit(at.atom_id)) == 0u) {
        throw Error("element '" + e.name + "': state has no atom " +
                    std::to_string(at.atom_id));
      }
      for (const auto& [l, a] : x.amplitudes()) {
        const PhotonSector& p = *l.photon;
        const AtomState& st = *l.atom(at.atom_id);
        if (p == at.mode_in) {
          if (st.excited) {
            throw Error("element '" + e.name +
                        "': photon meets an already-excited atom (double excitation)");
          }
          if (axis_of(st.spin) != SpinAxis::z) {
            throw Error("element '" + e.name +
                        "': atom label must be z-resolved at the interaction");
          }
          BasisLabel nl = l;
          if (st.spin == at.blocking) {
            nl.photon = PhotonSector::vacuum();
            nl.atom(at.atom_id) = AtomState::excited_z(st.spin);
          } else {
            nl.photon = at.mode_out;
          }
          emit(nl, a);
        } else if (p == at.mode_out) {
          throw Error("element '" + e.name + "': input state already occupies output sector '" +
                      p.name + "'");
        } else if (p.is_vacuum() && st.excited && st.spin == at.blocking) {
          throw Error("element '" + e.name +
                      "': input state already contains this atom's excitation product");
        } else {
          emit(l, a);
        }
      }
      break;
    }
    case ElementKind::dual_source:
      break;  // unreachable, guarded by stageable() above
  }
  for (const auto& [l, a] : x.overflow()) out.add_overflow(l, a);
  out.prune();
  return out;
}

// Applies one element in the backward (confirmation wave) direction: the
// transpose of the forward action. Bra terms with no one-photon preimage
// under the forward map are moved to the overflow bucket unchanged.
inline StateVector apply_backward(const ElementMap& e, const StateVector& x) {
  if (x.direction() != WaveDirection::bra) {
    throw Error("element '" + e.name + "': backward action expects a bra");
  }
  if (!e.stageable()) {
    throw Error("element '" + e.name + "': sources cannot be applied in a stage");
  }
  detail::require_photon_span(e, x);

  StateVector out(x.direction(), x.mask());
  auto emit = [&out](const BasisLabel& l, Complex a) { out.add_amplitude(l, a); };

  switch (e.kind) {
    case ElementKind::beamsplitter: {
      const auto& b = std::get<Beamsplitter>(e.op);
      for (const auto& [l, a] : x.amplitudes()) {
        detail::beamsplitter_backward_label(b, e.name, l, a, emit);
      }
      break;
    }
    case ElementKind::mirror:
    case ElementKind::relabel: {
      const auto& m = std::get<Relabel>(e.op);
      for (const auto& [l, a] : x.amplitudes()) {
        const PhotonSector& p = *l.photon;
        if (p == m.from) {
          throw Error("element '" + e.name + "': confirmation wave already occupies input sector '" +
                      p.name + "'");
        }
        if (p == m.to) {
          BasisLabel nl = l;
          nl.photon = m.from;
          emit(nl, a);
        } else {
          emit(l, a);
        }
      }
      break;
    }
    case ElementKind::atom_interaction: {
      const auto& at = std::get<AtomInteraction>(e.op);
      if ((x.mask() & atom_bit(at.atom_id)) == 0u) {
        throw Error("element '" + e.name + "': state has no atom " +
                    std::to_string(at.atom_id));
      }
      for (const auto& [l, a] : x.amplitudes()) {
        const PhotonSector& p = *l.photon;
        const AtomState& st = *l.atom(at.atom_id);
        if (p == at.mode_in) {
          throw Error("element '" + e.name + "': confirmation wave already occupies input sector '" +
                      p.name + "'");
        }
        if (p == at.mode_out) {
          if (!st.excited && axis_of(st.spin) == SpinAxis::z &&
              st.spin != at.blocking) {
            BasisLabel nl = l;
            nl.photon = at.mode_in;
            emit(nl, a);
          } else {
            // A live photon behind the atom paired with the spin component
            // the atom absorbs: only a two-photon history could produce
            // this, so it leaves the one-photon space.
            out.add_overflow(l, a);
          }
        } else if (p.is_vacuum() && st.excited && st.spin == at.blocking) {
          BasisLabel nl = l;
          nl.photon = at.mode_in;
          nl.atom(at.atom_id) = AtomState::ground(st.spin);
          emit(nl, a);
        } else {
          emit(l, a);
        }
      }
      break;
    }
    case ElementKind::dual_source:
      break;  // unreachable, guarded by stageable() above
  }
  for (const auto& [l, a] : x.overflow()) out.add_overflow(l, a);
  out.prune();
  return out;
}

}  // namespace tiqs

#endif  // TIQS_ELEMENTS_HPP
