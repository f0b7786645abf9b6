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

#include "hoist/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "hoist/log.hpp"

namespace hoist {

double BracketPlan::total_resource() const {
    double total = 0.0;
    for (const auto& s : stages) total += static_cast<double>(s.count) * s.resource;
    return total;
}

std::vector<BracketPlan> plan_brackets(double max_resource, double eta) {
    const std::vector<double> ladder = resource_ladder(max_resource, eta);
    const int s_max = static_cast<int>(ladder.size()) - 1;
    const int stage_count = s_max + 1;

    std::vector<BracketPlan> plans;
    plans.reserve(static_cast<std::size_t>(stage_count));
    for (int s = s_max; s >= 0; --s) {
        BracketPlan plan;
        plan.bracket_index = s;
        plan.eta = eta;
        plan.max_resource = max_resource;

        const double raw = (static_cast<double>(s_max + 1) / static_cast<double>(s + 1)) *
                           std::pow(eta, static_cast<double>(s));
        int n = static_cast<int>(std::ceil(raw - 1e-9));
        for (int i = 0; i <= s; ++i) {
            const int global_stage = stage_count - s + i;  // 1-based ladder position
            BracketStage stage;
            stage.count = std::max(1, n);
            stage.resource = ladder[static_cast<std::size_t>(global_stage - 1)];
            stage.global_stage = global_stage;
            plan.stages.push_back(stage);
            n = static_cast<int>(std::floor(static_cast<double>(n) / eta));
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::vector<Configuration> promote(const std::vector<std::pair<Configuration, double>>& ranked,
                                   int keep) {
    if (keep < 1 || keep > static_cast<int>(ranked.size()))
        throw std::invalid_argument("promote: keep out of range");
    std::vector<std::size_t> order(ranked.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranked[a].second < ranked[b].second;
    });
    std::vector<Configuration> kept;
    kept.reserve(static_cast<std::size_t>(keep));
    for (int i = 0; i < keep; ++i) kept.push_back(ranked[order[static_cast<std::size_t>(i)]].first);
    return kept;
}

namespace {

struct StageResult {
    double loss = 0.0;
    bool failed = false;
    std::string diagnostic;
};

// Evaluates every survivor at one resource level. Completion order never
// matters: results land in a slot per survivor index.
std::vector<StageResult> evaluate_stage(const std::vector<Configuration>& survivors,
                                        const Objective& objective, double resource,
                                        double max_resource, int workers) {
    std::vector<StageResult> results(survivors.size());
    auto evaluate_one = [&](std::size_t index) {
        try {
            double loss = objective.evaluate(survivors[index], resource, max_resource);
            if (!std::isfinite(loss)) {
                results[index] = {0.0, true, "non-finite loss"};
            } else {
                results[index] = {loss, false, {}};
            }
        } catch (const EvaluationFailure& e) {
            results[index] = {0.0, true, e.what()};
        }
    };

    if (workers <= 1 || survivors.size() <= 1) {
        for (std::size_t i = 0; i < survivors.size(); ++i) evaluate_one(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(
        static_cast<std::size_t>(std::min<std::size_t>(survivors.size(),
                                                       static_cast<std::size_t>(workers))));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < errors.size(); ++w) {
        pool.emplace_back([&, w] {
            while (true) {
                std::size_t index = next.fetch_add(1);
                if (index >= survivors.size()) return;
                try {
                    evaluate_one(index);
                } catch (...) {
                    errors[w] = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace

BracketOutcome run_bracket(const BracketPlan& plan, const ConfigSampler& sampler,
                           const Objective& objective, EvaluationStore& store, int bracket_id,
                           int workers) {
    if (plan.stages.empty()) throw std::invalid_argument("run_bracket: empty plan");

    std::vector<Configuration> survivors = sampler(plan.stages.front().count);
    if (static_cast<int>(survivors.size()) != plan.stages.front().count)
        throw std::invalid_argument("run_bracket: sampler returned wrong count");

    BracketOutcome outcome;
    for (std::size_t stage_pos = 0; stage_pos < plan.stages.size(); ++stage_pos) {
        const BracketStage& stage = plan.stages[stage_pos];
        if (survivors.empty()) break;

        log_info("bracket " + std::to_string(bracket_id) + " stage " +
                 std::to_string(stage.global_stage) + ": evaluating " +
                 std::to_string(survivors.size()) + " configs at r=" +
                 std::to_string(stage.resource));

        const std::vector<StageResult> results =
            evaluate_stage(survivors, objective, stage.resource, plan.max_resource, workers);

        std::vector<std::pair<Configuration, double>> ranked;
        ranked.reserve(survivors.size());
        for (std::size_t i = 0; i < survivors.size(); ++i) {
            ++outcome.evaluations;
            if (results[i].failed) {
                ++outcome.failures;
                store.record_failed(survivors[i], stage.global_stage, stage.resource, bracket_id);
                log_info("bracket " + std::to_string(bracket_id) +
                         ": evaluation failed: " + results[i].diagnostic);
            } else {
                store.record(survivors[i], stage.global_stage, stage.resource, results[i].loss,
                             bracket_id);
                ranked.emplace_back(survivors[i], results[i].loss);
            }
        }

        if (stage_pos + 1 == plan.stages.size()) break;
        const int keep =
            std::min(plan.stages[stage_pos + 1].count, static_cast<int>(ranked.size()));
        if (keep < 1) {
            survivors.clear();
            break;
        }
        survivors = promote(ranked, keep);
    }
    return outcome;
}

}  // namespace hoist
