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

#ifndef TIQS_BUILTINS_HPP
#define TIQS_BUILTINS_HPP

#include <string>
#include <vector>

namespace tiqs {

struct Builtin {
  const char* name;
  const char* description;
  const char* text;
};

inline const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> list = {
      {"maudlin-contingent",
       "half-silvered mirror; detector D swings into the far path when C "
       "stays silent",
       R"TIS(scenario maudlin-contingent
# A half-silvered mirror sends the packet toward nearby detector C or onto
# a slow far path. If C stays silent, detector D is moved into the far
# path in time to absorb the delayed packet.
source S emits s
beamsplitter BS in s r out near far
detector C absorbs near
universal-absorber
stage split : BS
contingent on C silent : moved
detector D absorbs far
)TIS"},

      {"ifm-with-object",
       "interferometer with an opaque object in the lower arm; a D click "
       "reveals it without absorption",
       R"TIS(scenario ifm-with-object
# An opaque object (detector O) blocks the lower arm, so the photon can
# reach detector D, which stays dark in the empty interferometer.
source S emits s
beamsplitter BS1 in s r out u v
mirror MU u -> u'
beamsplitter BS2 in u' v' out d c
detector O absorbs v
detector C absorbs c
detector D absorbs d
stage uv : BS1
stage u'v' : MU
stage cd : BS2
)TIS"},

      {"ifm-no-object",
       "empty interferometer; interference is fully constructive at C",
       R"TIS(scenario ifm-no-object
# Empty Mach-Zehnder interferometer: the two paths interfere so that all
# probability reaches detector C and none reaches D.
source S emits s
beamsplitter BS1 in s r out u v
mirror MU u -> u'
mirror MV v -> v'
beamsplitter BS2 in u' v' out d c
detector C absorbs c
detector D absorbs d
stage uv : BS1
stage u'v' : MU MV
stage cd : BS2
)TIS"},

      {"qle-single",
       "interferometer with a blocking atom in each arm; a D click leaves "
       "the atoms entangled",
       R"TIS(scenario qle-single
# One two-level atom sits in each arm, each blocking one z spin component.
# A click at the dark detector D projects the atoms onto an entangled
# state without any photon-atom interaction.
source S emits s
beamsplitter BS1 in s r out u v
atom A1 id 1 prep yminus blocks z- in u out u'
atom A2 id 2 prep yminus blocks z+ in v out v'
beamsplitter BS2 in u' v' out d c
detector C absorbs c
detector D absorbs d
universal-absorber
spin-detector atom 1 axis z
spin-detector atom 2 axis z
stage uv : BS1
stage u'v' : A1 A2
stage cd : BS2
)TIS"},

      {"qle-dual-source",
       "two phase-locked sources prepare the arm superposition directly",
       R"TIS(scenario qle-dual-source
# Two phase-locked single-photon sources emit the arm superposition
# directly; from the uv region on, everything matches qle-single.
dual-source DS emits u v phase 0.0
atom A1 id 1 prep yminus blocks z- in u out u'
atom A2 id 2 prep yminus blocks z+ in v out v'
beamsplitter BS2 in u' v' out d c
detector C absorbs c
detector D absorbs d
universal-absorber
spin-detector atom 1 axis z
spin-detector atom 2 axis z
stage u'v' : A1 A2
stage cd : BS2
)TIS"},
  };
  return list;
}

inline const Builtin* find_builtin(const std::string& name) {
  for (const auto& b : builtins()) {
    if (name == b.name) return &b;
  }
  return nullptr;
}

}  // namespace tiqs

#endif  // TIQS_BUILTINS_HPP
