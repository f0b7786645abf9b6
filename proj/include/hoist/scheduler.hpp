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

#ifndef HOIST_SCHEDULER_HPP
#define HOIST_SCHEDULER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "hoist/config_space.hpp"
#include "hoist/objectives.hpp"
#include "hoist/store.hpp"

namespace hoist {

struct BracketStage {
    int count = 0;          // configurations evaluated at this stage
    double resource = 0.0;  // per-configuration training resource
    int global_stage = 0;   // 1-based index on the shared resource ladder
};

// One successive-halving schedule: n_{i+1} = floor(n_i / eta) (clamped to 1),
// r_{i+1} = r_i * eta, ending at the maximum resource.
struct BracketPlan {
    int bracket_index = 0;  // the trade-off parameter s
    std::vector<BracketStage> stages;
    double eta = 0.0;
    double max_resource = 0.0;

    double total_resource() const;
};

// The full bracket sweep s = s_max .. 0 with the standard Hyperband counts
// n = ceil(((s_max+1)/(s+1)) * eta^s). Stages at equal resource share a
// global stage index across brackets.
std::vector<BracketPlan> plan_brackets(double max_resource, double eta);

// Keep configurations with the smallest losses; ties fall to submission order.
std::vector<Configuration> promote(const std::vector<std::pair<Configuration, double>>& ranked,
                                   int keep);

using ConfigSampler = std::function<std::vector<Configuration>(int count)>;

struct BracketOutcome {
    int evaluations = 0;
    int failures = 0;
};

// Runs one bracket: evaluates every survivor at each stage (optionally with a
// worker pool), records results into the store in survivor order regardless
// of completion order, then promotes the best into the next stage. Failed
// evaluations are recorded as failed and never promoted.
BracketOutcome run_bracket(const BracketPlan& plan, const ConfigSampler& sampler,
                           const Objective& objective, EvaluationStore& store, int bracket_id,
                           int workers = 1);

}  // namespace hoist

#endif  // HOIST_SCHEDULER_HPP
