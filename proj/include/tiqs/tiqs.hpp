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

#ifndef TIQS_TIQS_HPP
#define TIQS_TIQS_HPP

// Umbrella header for the whole library.

#include "tiqs/builtins.hpp"   // IWYU pragma: export
#include "tiqs/elements.hpp"   // IWYU pragma: export
#include "tiqs/network.hpp"    // IWYU pragma: export
#include "tiqs/parser.hpp"     // IWYU pragma: export
#include "tiqs/runner.hpp"     // IWYU pragma: export
#include "tiqs/state.hpp"      // IWYU pragma: export
#include "tiqs/transaction.hpp"  // IWYU pragma: export
#include "tiqs/version.hpp"    // IWYU pragma: export

#endif  // TIQS_TIQS_HPP
