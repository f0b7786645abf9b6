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

#ifndef HOIST_CLI_HPP
#define HOIST_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hoist/optimizer.hpp"

namespace hoist {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitAborted = 3;

struct RunManifest {
    std::string space_path;          // empty: use the builtin objective's space
    std::string objective = "curve-bench";  // builtin name or "external"
    std::string external_cmd;
    double timeout_secs = 30.0;
    RunOptions options;
    std::string out_dir;
};

// Executes one optimization run; writes history.jsonl, convergence.csv and
// result.json into the output directory. An existing compatible history is
// replayed and the remaining loops are continued; incompatible options are
// refused.
int cmd_run(const RunManifest& manifest);

// Runs every (mode, seed) pair and writes compare.csv (long format) plus
// summary.csv (per-mode median best loss at each bracket-sweep boundary).
// A failed sub-run produces a `failed` row and does not abort the sweep.
int cmd_compare(const RunManifest& manifest, const std::vector<std::string>& modes,
                const std::vector<std::uint64_t>& seeds);

// Prints incumbent, consumed resource, final weights, and per-stage dataset
// sizes for a finished (or interrupted) run directory.
int cmd_report(const std::string& run_dir);

// Deterministic shortest round-trip formatting used in CSV output.
std::string format_double(double value);

}  // namespace hoist

#endif  // HOIST_CLI_HPP
