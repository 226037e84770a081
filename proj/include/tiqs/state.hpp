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

#ifndef TIQS_STATE_HPP
#define TIQS_STATE_HPP

#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

// Sparse state vectors over a compound basis: one photon occupation slot
// and up to two two-level atoms. Kets are forward-propagating offer waves;
// bras are backward-propagating confirmation waves and are stored
// pre-conjugated, so inner(bra, ket) is a plain bilinear sum and backward
// element maps are plain transposes of the forward ones.

namespace tiqs {

using Complex = std::complex<double>;

// Amplitudes below this magnitude are dropped when states are pruned.
inline constexpr double kPruneThreshold = 1e-14;

// Default tolerance for all numeric comparisons and residual checks.
inline constexpr double kDefaultTolerance = 1e-12;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Photon sector

// A photon occupation slot, named after the spatial mode it rides in.
// The reserved name "0" is the vacuum (no photon in flight). Sectors sort
// by name with the vacuum last, which keeps rendered states readable:
// live detector amplitudes first, absorbed-photon terms at the bottom.
struct PhotonSector {
  std::string name;

  PhotonSector() = default;
  explicit PhotonSector(std::string n) : name(std::move(n)) {}

  static PhotonSector vacuum() { return PhotonSector("0"); }
  bool is_vacuum() const { return name == "0"; }

  friend bool operator==(const PhotonSector& a, const PhotonSector& b) {
    return a.name == b.name;
  }
  friend bool operator!=(const PhotonSector& a, const PhotonSector& b) {
    return !(a == b);
  }
  friend bool operator<(const PhotonSector& a, const PhotonSector& b) {
    return std::make_tuple(a.is_vacuum(), std::string_view(a.name)) <
           std::make_tuple(b.is_vacuum(), std::string_view(b.name));
  }
};

// ---------------------------------------------------------------------------
// Atom state

enum class SpinLabel { z_plus, z_minus, y_plus, y_minus };

enum class SpinAxis { z, y };

inline SpinAxis axis_of(SpinLabel s) {
  return (s == SpinLabel::z_plus || s == SpinLabel::z_minus) ? SpinAxis::z
                                                             : SpinAxis::y;
}

// +1 for z+/y+, -1 for z-/y-.
inline int sign_of(SpinLabel s) {
  return (s == SpinLabel::z_plus || s == SpinLabel::y_plus) ? +1 : -1;
}

inline const char* to_string(SpinLabel s) {
  switch (s) {
    case SpinLabel::z_plus:
      return "z+";
    case SpinLabel::z_minus:
      return "z-";
    case SpinLabel::y_plus:
      return "y+";
    case SpinLabel::y_minus:
      return "y-";
  }
  return "?";
}

inline char to_char(SpinAxis a) { return a == SpinAxis::z ? 'z' : 'y'; }

// One atom's internal label: a spin state plus an excitation flag.
// Excitation is only meaningful for z-basis labels (the blocking level is a
// z eigenstate), so excited y labels are rejected at construction.
struct AtomState {
  SpinLabel spin = SpinLabel::z_plus;
  bool excited = false;

  AtomState() = default;
  AtomState(SpinLabel s, bool e) : spin(s), excited(e) {
    if (excited && axis_of(spin) != SpinAxis::z) {
      throw Error("atom state: excitation requires a z-basis spin label");
    }
  }

  static AtomState ground(SpinLabel s) { return AtomState(s, false); }
  static AtomState excited_z(SpinLabel s) { return AtomState(s, true); }

  friend bool operator==(const AtomState& a, const AtomState& b) {
    return a.spin == b.spin && a.excited == b.excited;
  }
  friend bool operator!=(const AtomState& a, const AtomState& b) {
    return !(a == b);
  }
  friend bool operator<(const AtomState& a, const AtomState& b) {
    return std::make_tuple(static_cast<int>(a.spin), a.excited) <
           std::make_tuple(static_cast<int>(b.spin), b.excited);
  }
};

// ---------------------------------------------------------------------------
// Basis labels

// Bitmask describing which subsystems a state vector spans.
using SubsystemMask = unsigned;

inline constexpr SubsystemMask kPhotonBit = 1u;
inline constexpr SubsystemMask kAtom1Bit = 2u;
inline constexpr SubsystemMask kAtom2Bit = 4u;

inline SubsystemMask atom_bit(int atom_id) {
  switch (atom_id) {
    case 1:
      return kAtom1Bit;
    case 2:
      return kAtom2Bit;
    default:
      throw Error("atom id must be 1 or 2");
  }
}

// A product basis label. Slots for subsystems outside the state's span are
// disengaged; within one state every label engages the same slots.
struct BasisLabel {
  std::optional<PhotonSector> photon;
  std::optional<AtomState> atom1;
  std::optional<AtomState> atom2;

  BasisLabel() = default;

  static BasisLabel photon_only(PhotonSector s) {
    BasisLabel l;
    l.photon = std::move(s);
    return l;
  }
  static BasisLabel atom_only(int atom_id, AtomState a) {
    BasisLabel l;
    l.atom(atom_id) = a;
    return l;
  }
  static BasisLabel full(PhotonSector s, AtomState a1, AtomState a2) {
    BasisLabel l;
    l.photon = std::move(s);
    l.atom1 = a1;
    l.atom2 = a2;
    return l;
  }

  std::optional<AtomState>& atom(int atom_id) {
    return atom_id == 1 ? atom1 : atom_id == 2 ? atom2
                                               : throw Error("atom id must be 1 or 2");
  }
  const std::optional<AtomState>& atom(int atom_id) const {
    return atom_id == 1 ? atom1 : atom_id == 2 ? atom2
                                               : throw Error("atom id must be 1 or 2");
  }

  SubsystemMask mask() const {
    return (photon ? kPhotonBit : 0u) | (atom1 ? kAtom1Bit : 0u) |
           (atom2 ? kAtom2Bit : 0u);
  }

  friend bool operator==(const BasisLabel& a, const BasisLabel& b) {
    return a.photon == b.photon && a.atom1 == b.atom1 && a.atom2 == b.atom2;
  }
  friend bool operator!=(const BasisLabel& a, const BasisLabel& b) {
    return !(a == b);
  }
  friend bool operator<(const BasisLabel& a, const BasisLabel& b) {
    return std::make_tuple(a.photon, a.atom1, a.atom2) <
           std::make_tuple(b.photon, b.atom1, b.atom2);
  }
};

inline std::string to_string(const AtomState& a, int atom_id) {
  std::string s;
  s += to_char(axis_of(a.spin));
  s += static_cast<char>('0' + atom_id);
  s += sign_of(a.spin) > 0 ? '+' : '-';
  if (a.excited) s += '*';
  return s;
}

inline std::string to_string(const BasisLabel& l) {
  std::string out = "(";
  bool first = true;
  auto emit = [&](const std::string& part) {
    if (!first) out += ", ";
    out += part;
    first = false;
  };
  if (l.photon) emit(l.photon->name);
  if (l.atom1) emit(to_string(*l.atom1, 1));
  if (l.atom2) emit(to_string(*l.atom2, 2));
  out += ")";
  return out;
}

// ---------------------------------------------------------------------------
// State vectors

enum class WaveDirection { ket, bra };

// Sparse complex vector over basis labels, tagged with a propagation
// direction and the subsystem span shared by all its labels.
//
// The overflow map holds backward-propagation terms that left the
// single-excitation space (no one-photon preimage exists). They are parked
// under the label they had when discarded, still as complex amplitudes, so
// that summing confirmation waves over outcomes cancels them exactly.
class StateVector {
 public:
  // Scalar ket spanning no subsystems; useful as a neutral aggregate member.
  StateVector() : StateVector(WaveDirection::ket, 0u) {}

  StateVector(WaveDirection dir, SubsystemMask mask)
      : direction_(dir), mask_(mask) {}

  static StateVector basis_ket(const BasisLabel& l) {
    StateVector v(WaveDirection::ket, l.mask());
    v.add_amplitude(l, Complex(1.0, 0.0));
    return v;
  }
  static StateVector basis_bra(const BasisLabel& l) {
    StateVector v(WaveDirection::bra, l.mask());
    v.add_amplitude(l, Complex(1.0, 0.0));
    return v;
  }

  WaveDirection direction() const { return direction_; }
  SubsystemMask mask() const { return mask_; }

  const std::map<BasisLabel, Complex>& amplitudes() const { return amps_; }
  const std::map<BasisLabel, Complex>& overflow() const { return overflow_; }

  Complex amplitude(const BasisLabel& l) const {
    auto it = amps_.find(l);
    return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
  }

  void add_amplitude(const BasisLabel& l, Complex a) {
    check_label(l);
    amps_[l] += a;
  }

  void set_amplitude(const BasisLabel& l, Complex a) {
    check_label(l);
    amps_[l] = a;
  }

  void add_overflow(const BasisLabel& l, Complex a) { overflow_[l] += a; }

  bool empty() const { return amps_.empty(); }

  // Squared 2-norm of the live amplitudes; overflow is excluded.
  double norm2() const {
    double s = 0.0;
    for (const auto& [l, a] : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  // Total squared weight parked in the overflow map.
  double overflow_weight() const {
    double s = 0.0;
    for (const auto& [l, a] : overflow_) s += std::norm(a);
    return s;
  }

  // Drops live and overflow entries with |amplitude| < threshold.
  // Returns the total squared weight removed.
  double prune(double threshold = kPruneThreshold) {
    double dropped = 0.0;
    for (auto* m : {&amps_, &overflow_}) {
      for (auto it = m->begin(); it != m->end();) {
        if (std::abs(it->second) < threshold) {
          dropped += std::norm(it->second);
          it = m->erase(it);
        } else {
          ++it;
        }
      }
    }
    return dropped;
  }

  StateVector scaled(Complex c) const {
    StateVector out(direction_, mask_);
    for (const auto& [l, a] : amps_) out.amps_[l] = c * a;
    for (const auto& [l, a] : overflow_) out.overflow_[l] = c * a;
    return out;
  }

  StateVector normalized() const {
    double n = norm();
    if (n < kPruneThreshold) throw Error("cannot normalize a null state");
    return scaled(Complex(1.0 / n, 0.0));
  }

 private:
  void check_label(const BasisLabel& l) const {
    if (l.mask() != mask_) {
      throw Error("label " + to_string(l) +
                  " does not match the state's subsystem span");
    }
  }

  WaveDirection direction_;
  SubsystemMask mask_;
  std::map<BasisLabel, Complex> amps_;
  std::map<BasisLabel, Complex> overflow_;
};

// Direction flip with entrywise conjugation, applied to live and overflow
// amplitudes alike. An involution: dagger(dagger(x)) == x.
inline StateVector dagger(const StateVector& x) {
  StateVector out(x.direction() == WaveDirection::ket ? WaveDirection::bra
                                                      : WaveDirection::ket,
                  x.mask());
  for (const auto& [l, a] : x.amplitudes()) out.add_amplitude(l, std::conj(a));
  for (const auto& [l, a] : x.overflow()) out.add_overflow(l, std::conj(a));
  return out;
}

// Product state over disjoint subsystem spans. Defined on live amplitudes
// only; combining states that carry overflow would silently misplace it.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  if (a.direction() != b.direction()) {
    throw Error("tensor: operands have different wave directions");
  }
  if ((a.mask() & b.mask()) != 0u) {
    throw Error("tensor: operands overlap on a subsystem");
  }
  if (!a.overflow().empty() || !b.overflow().empty()) {
    throw Error("tensor: operands must not carry overflow terms");
  }
  StateVector out(a.direction(), a.mask() | b.mask());
  for (const auto& [la, va] : a.amplitudes()) {
    for (const auto& [lb, vb] : b.amplitudes()) {
      BasisLabel l = la;
      if (lb.photon) l.photon = lb.photon;
      if (lb.atom1) l.atom1 = lb.atom1;
      if (lb.atom2) l.atom2 = lb.atom2;
      out.add_amplitude(l, va * vb);
    }
  }
  return out;
}

// Bilinear pairing of a stored-conjugated bra with a ket over the shared
// label universe. No further conjugation happens here.
inline Complex inner(const StateVector& bra, const StateVector& ket) {
  if (bra.direction() != WaveDirection::bra ||
      ket.direction() != WaveDirection::ket) {
    throw Error("inner: expects (bra, ket) in that order");
  }
  if (bra.mask() != ket.mask()) {
    throw Error("inner: operands live on different label universes");
  }
  Complex s(0.0, 0.0);
  for (const auto& [l, a] : bra.amplitudes()) {
    auto it = ket.amplitudes().find(l);
    if (it != ket.amplitudes().end()) s += a * it->second;
  }
  return s;
}

// Entrywise sum; operands must agree on direction and span. Overflow maps
// are merged with amplitude addition, so opposite-phase overflow cancels.
inline StateVector add(const StateVector& a, const StateVector& b) {
  if (a.direction() != b.direction() || a.mask() != b.mask()) {
    throw Error("add: operands must share direction and subsystem span");
  }
  StateVector out = a;
  for (const auto& [l, v] : b.amplitudes()) out.add_amplitude(l, v);
  for (const auto& [l, v] : b.overflow()) out.add_overflow(l, v);
  return out;
}

// L2 distance between live amplitude maps.
inline double distance(const StateVector& a, const StateVector& b) {
  double s = 0.0;
  std::set<BasisLabel> labels;
  for (const auto& [l, v] : a.amplitudes()) labels.insert(l);
  for (const auto& [l, v] : b.amplitudes()) labels.insert(l);
  for (const auto& l : labels) s += std::norm(a.amplitude(l) - b.amplitude(l));
  return std::sqrt(s);
}

// L2 distance between overflow maps.
inline double overflow_distance(const StateVector& a, const StateVector& b) {
  auto at = [](const std::map<BasisLabel, Complex>& m, const BasisLabel& l) {
    auto it = m.find(l);
    return it == m.end() ? Complex(0.0, 0.0) : it->second;
  };
  double s = 0.0;
  std::set<BasisLabel> labels;
  for (const auto& [l, v] : a.overflow()) labels.insert(l);
  for (const auto& [l, v] : b.overflow()) labels.insert(l);
  for (const auto& l : labels) {
    s += std::norm(at(a.overflow(), l) - at(b.overflow(), l));
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Spin basis change

// Single-atom basis change between the z and y spin bases, applied to every
// label of the state. Conventions (ket side):
//
//   |y+> = (|z+> + i|z->)/sqrt2        |z+> = (|y+> - i|y->)/sqrt2
//   |y-> = (i|z+> + |z->)/sqrt2        |z-> = (-i|y+> + |y->)/sqrt2
//
// Bras transform with the conjugated coefficients (they are stored
// pre-conjugated). Requires every label of the chosen atom to sit in the
// source basis and be unexcited; excited labels are z-bound and have no
// y-basis expansion.
namespace detail {

// Ket-side expansion of one spin label over the other axis. Bras use the
// conjugated coefficients.
inline std::vector<std::pair<SpinLabel, Complex>> spin_expand(SpinLabel from,
                                                              SpinAxis target) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex ir(0.0, r);
  const bool to_z = target == SpinAxis::z;
  switch (from) {
    case SpinLabel::y_plus:
      if (!to_z) break;
      return {{SpinLabel::z_plus, Complex(r, 0.0)}, {SpinLabel::z_minus, ir}};
    case SpinLabel::y_minus:
      if (!to_z) break;
      return {{SpinLabel::z_plus, ir}, {SpinLabel::z_minus, Complex(r, 0.0)}};
    case SpinLabel::z_plus:
      if (to_z) break;
      return {{SpinLabel::y_plus, Complex(r, 0.0)}, {SpinLabel::y_minus, -ir}};
    case SpinLabel::z_minus:
      if (to_z) break;
      return {{SpinLabel::y_plus, -ir}, {SpinLabel::y_minus, Complex(r, 0.0)}};
  }
  throw Error("spin basis transform: label already in the target basis");
}

}  // namespace detail

inline StateVector spin_basis_transform(const StateVector& x, int atom_id,
                                        SpinAxis target) {
  if ((x.mask() & atom_bit(atom_id)) == 0u) {
    throw Error("spin basis transform: state does not span atom " +
                std::to_string(atom_id));
  }
  StateVector out(x.direction(), x.mask());
  const bool conj = x.direction() == WaveDirection::bra;
  for (const auto& [l, a] : x.amplitudes()) {
    const AtomState& st = *l.atom(atom_id);
    if (st.excited) {
      throw Error("spin basis transform: atom " + std::to_string(atom_id) +
                  " label " + to_string(l) + " is excited");
    }
    for (const auto& [spin, c] : detail::spin_expand(st.spin, target)) {
      BasisLabel nl = l;
      nl.atom(atom_id) = AtomState::ground(spin);
      out.add_amplitude(nl, a * (conj ? std::conj(c) : c));
    }
  }
  for (const auto& [l, a] : x.overflow()) out.add_overflow(l, a);
  out.prune();
  return out;
}

// ---------------------------------------------------------------------------
// Canonical rendering

// "+0.250000000000-0.353553390593i" with fixed 12-decimal parts and
// explicit signs; negative zeros are normalized away.
inline std::string render_amplitude(Complex a) {
  double re = a.real();
  double im = a.imag();
  if (re == 0.0) re = 0.0;
  if (im == 0.0) im = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.12f%+.12fi", re, im);
  return buf;
}

inline std::string render_real(double v) {
  if (v == 0.0) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12f", v);
  return buf;
}

// One line per label in canonical label order:
//   <amplitude>  <label>
inline std::string render_state(const StateVector& x) {
  std::string out;
  for (const auto& [l, a] : x.amplitudes()) {
    out += render_amplitude(a);
    out += "  ";
    out += to_string(l);
    out += "\n";
  }
  return out;
}

}  // namespace tiqs

#endif  // TIQS_STATE_HPP
