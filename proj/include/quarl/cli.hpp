// Copyright 2026 The quarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>

namespace quarl {

inline constexpr const char* kVersion = "0.1.0";

/// Five repetitions of Var, Ent, Enc followed by the terminator.
inline constexpr const char* kAlt5Genome = "1-3-2-1-3-2-1-3-2-1-3-2-1-3-2-0";
/// Stand-in for the evolutionary search baseline: four Enc, Var, Ent rounds.
inline constexpr const char* kEqasGenome = "2-1-3-2-1-3-2-1-3-2-1-3-0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `quarl` tool. Subcommands: train, infer, search,
/// compile-stats, env-check, serve-mock.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quarl
