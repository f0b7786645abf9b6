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

#ifndef HOIST_OPTIMIZER_HPP
#define HOIST_OPTIMIZER_HPP

#include <optional>
#include <string>
#include <vector>

#include "hoist/acquisition.hpp"
#include "hoist/ensemble.hpp"
#include "hoist/forest.hpp"
#include "hoist/history.hpp"
#include "hoist/objectives.hpp"
#include "hoist/scheduler.hpp"
#include "hoist/store.hpp"

namespace hoist {

// Raised when the objective fails persistently (over half of a bracket).
struct RunAborted : std::runtime_error {
    explicit RunAborted(const std::string& what) : std::runtime_error(what) {}
};

enum class RunMode {
    Hoist,            // ensemble-guided sampling inside the bracket sweep
    Random,           // uniform sampling, full-resource evaluations only
    HyperbandRandom,  // the bracket sweep with uniform sampling
    CompleteOnlyBo,   // single surrogate on complete data, full-resource EI
};

std::string to_string(RunMode mode);
std::optional<RunMode> parse_run_mode(const std::string& text);

struct RunOptions {
    double max_resource = 27.0;
    double eta = 3.0;
    int total_bracket_loops = 4;
    double rho = 0.5;
    ForestParams forest;  // per-fit seeds are derived from `seed`, stage, and data size
    int pool_size = 500;
    double random_fraction = 0.0;
    IncumbentRule incumbent_rule = IncumbentRule::ModelPredicted;
    RunMode mode = RunMode::Hoist;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

nlohmann::json options_to_json(const RunOptions& options);
RunOptions options_from_json(const nlohmann::json& doc);

struct TracePoint {
    double cum_resource = 0.0;
    double best_loss = 0.0;
};

struct RunResult {
    std::optional<EvaluationRecord> incumbent;
    EvaluationStore store;
    std::vector<WeightsEvent> weight_trail;
    std::vector<TracePoint> trace;  // best-so-far complete loss per evaluation
    double total_resource = 0.0;
};

// Replayed state used to continue an interrupted or extended run.
struct StartState {
    EvaluationStore store;
    std::vector<WeightsEvent> weight_trail;
    int completed_loops = 0;
};

// One fit per stage with >= 2 records; stages below the threshold yield
// absent members.
std::vector<std::optional<ForestModel>> update_surrogates(const EvaluationStore& store,
                                                          const ConfigSpace& space,
                                                          const ForestParams& base,
                                                          std::uint64_t run_seed);

// Best-so-far complete-evaluation loss against cumulative resource, one point
// per evaluation from the first complete record onward.
std::vector<TracePoint> trace_from_store(const EvaluationStore& store);

// Executes the configured optimization. All randomness derives from
// options.seed through named streams, so identical options give identical
// results and a resumed run continues exactly where a fresh one would be.
RunResult run(const ConfigSpace& space, const Objective& objective, const RunOptions& options,
              HistoryWriter* history = nullptr, const StartState* start = nullptr);

}  // namespace hoist

#endif  // HOIST_OPTIMIZER_HPP
