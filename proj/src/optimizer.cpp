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

#include "hoist/optimizer.hpp"

#include <cmath>
#include <limits>

#include "hoist/log.hpp"
#include "hoist/rng.hpp"

namespace hoist {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Hoist: return "hoist";
        case RunMode::Random: return "random";
        case RunMode::HyperbandRandom: return "hyperband_random";
        case RunMode::CompleteOnlyBo: return "complete_only_bo";
    }
    return "?";
}

std::optional<RunMode> parse_run_mode(const std::string& text) {
    if (text == "hoist") return RunMode::Hoist;
    if (text == "random") return RunMode::Random;
    if (text == "hyperband_random") return RunMode::HyperbandRandom;
    if (text == "complete_only_bo") return RunMode::CompleteOnlyBo;
    return std::nullopt;
}

void RunOptions::validate() const {
    if (!(max_resource >= 1.0)) throw std::invalid_argument("options: max_resource must be >= 1");
    if (!(eta > 1.0)) throw std::invalid_argument("options: eta must be > 1");
    if (total_bracket_loops < 1)
        throw std::invalid_argument("options: total_bracket_loops must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("options: rho must be in [0,1]");
    if (pool_size < 1) throw std::invalid_argument("options: pool_size must be >= 1");
    if (!(random_fraction >= 0.0 && random_fraction <= 1.0))
        throw std::invalid_argument("options: random_fraction must be in [0,1]");
    if (workers < 1) throw std::invalid_argument("options: workers must be >= 1");
    forest.validate();
}

nlohmann::json options_to_json(const RunOptions& options) {
    return nlohmann::json{{"mode", to_string(options.mode)},
                          {"seed", options.seed},
                          {"max_resource", options.max_resource},
                          {"eta", options.eta},
                          {"loops", options.total_bracket_loops},
                          {"rho", options.rho},
                          {"trees", options.forest.tree_count},
                          {"max_features_fraction", options.forest.max_features_fraction},
                          {"min_samples_split", options.forest.min_samples_split},
                          {"bootstrap", options.forest.bootstrap},
                          {"variance_floor", options.forest.variance_floor},
                          {"pool_size", options.pool_size},
                          {"random_fraction", options.random_fraction},
                          {"incumbent_rule",
                           options.incumbent_rule == IncumbentRule::ModelPredicted
                               ? "model_predicted"
                               : "observed_min"},
                          {"workers", options.workers}};
}

RunOptions options_from_json(const nlohmann::json& doc) {
    RunOptions options;
    if (doc.contains("mode")) {
        auto mode = parse_run_mode(doc["mode"].get<std::string>());
        if (!mode) throw std::invalid_argument("options: unknown mode");
        options.mode = *mode;
    }
    options.seed = doc.value("seed", options.seed);
    options.max_resource = doc.value("max_resource", options.max_resource);
    options.eta = doc.value("eta", options.eta);
    options.total_bracket_loops = doc.value("loops", options.total_bracket_loops);
    options.rho = doc.value("rho", options.rho);
    options.forest.tree_count = doc.value("trees", options.forest.tree_count);
    options.forest.max_features_fraction =
        doc.value("max_features_fraction", options.forest.max_features_fraction);
    options.forest.min_samples_split =
        doc.value("min_samples_split", options.forest.min_samples_split);
    options.forest.bootstrap = doc.value("bootstrap", options.forest.bootstrap);
    options.forest.variance_floor = doc.value("variance_floor", options.forest.variance_floor);
    options.pool_size = doc.value("pool_size", options.pool_size);
    options.random_fraction = doc.value("random_fraction", options.random_fraction);
    if (doc.value("incumbent_rule", "model_predicted") == std::string("observed_min"))
        options.incumbent_rule = IncumbentRule::ObservedMin;
    options.workers = doc.value("workers", options.workers);
    return options;
}

namespace {

ForestParams stage_fit_params(const ForestParams& base, std::uint64_t run_seed, int stage_index,
                              std::size_t record_count) {
    // Seeded by (stage, data size): deterministic, independent of how many
    // refits happened before, so resumed runs and equivalent modes agree.
    ForestParams params = base;
    params.seed = derive_seed(run_seed, kFitStream, static_cast<std::uint64_t>(stage_index),
                              static_cast<std::uint64_t>(record_count));
    return params;
}

}  // namespace

std::vector<std::optional<ForestModel>> update_surrogates(const EvaluationStore& store,
                                                          const ConfigSpace& space,
                                                          const ForestParams& base,
                                                          std::uint64_t run_seed) {
    std::vector<std::optional<ForestModel>> members(
        static_cast<std::size_t>(store.stage_count()));
    for (int i = 1; i <= store.stage_count(); ++i) {
        const StageDataset& dataset = store.stage(i);
        if (dataset.size() < 2) continue;
        members[static_cast<std::size_t>(i - 1)] =
            fit_forest(dataset, space, stage_fit_params(base, run_seed, i, dataset.size()));
    }
    return members;
}

std::vector<TracePoint> trace_from_store(const EvaluationStore& store) {
    std::vector<TracePoint> trace;
    const int complete_stage = store.stage_count();
    double cum = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& entry : store.chronology()) {
        cum += entry.resource;
        if (!entry.failed && entry.stage_index == complete_stage && entry.loss < best)
            best = entry.loss;
        if (std::isfinite(best)) trace.push_back({cum, best});
    }
    return trace;
}

namespace {

struct LoopState {
    std::vector<std::optional<ForestModel>> members;
    WeightVector weights;
    std::vector<WeightsEvent> trail;
};

// Bracket sampler: ensemble-EI when the ensemble is usable, otherwise uniform
// (cold start). Used by hoist brackets and, with a single complete-stage
// member, by the complete-data-only baseline.
std::vector<Configuration> sample_batch(const EnsembleSurrogate& ensemble,
                                        const ConfigSpace& space, int count,
                                        const RunOptions& options, const EvaluationStore& store,
                                        std::mt19937_64& rng) {
    if (ensemble.usable()) {
        AcquisitionContext ctx;
        ctx.y_star = incumbent_reference(ensemble, store, space, options.incumbent_rule);
        ctx.pool_size = options.pool_size;
        ctx.random_fraction = options.random_fraction;
        return select_candidates(ensemble, space, count, ctx, rng);
    }
    return sample_uniform(space, count, rng);
}

void run_bracket_sweep(const ConfigSpace& space, const Objective& objective,
                       const RunOptions& options, const std::vector<BracketPlan>& plans,
                       EvaluationStore& store, LoopState& state, HistoryWriter* history,
                       int completed_loops) {
    const int stage_count = store.stage_count();
    const bool model_based = options.mode == RunMode::Hoist;

    for (int loop = completed_loops + 1; loop <= options.total_bracket_loops; ++loop) {
        for (std::size_t p = 0; p < plans.size(); ++p) {
            const BracketPlan& plan = plans[p];
            const int bracket_id =
                (loop - 1) * static_cast<int>(plans.size()) + static_cast<int>(p);
            auto rng = make_rng(derive_seed(options.seed, kSampleStream,
                                            static_cast<std::uint64_t>(loop), p));

            EnsembleSurrogate ensemble;
            if (model_based) ensemble = EnsembleSurrogate{state.members, state.weights};

            ConfigSampler sampler = [&](int count) {
                if (model_based)
                    return sample_batch(ensemble, space, count, options, store, rng);
                return sample_uniform(space, count, rng);
            };

            const BracketOutcome outcome =
                run_bracket(plan, sampler, objective, store, bracket_id, options.workers);
            if (outcome.failures * 2 > outcome.evaluations)
                throw RunAborted("bracket " + std::to_string(bracket_id) + ": " +
                                 std::to_string(outcome.failures) + " of " +
                                 std::to_string(outcome.evaluations) + " evaluations failed");

            if (model_based) {
                state.members = update_surrogates(store, space, options.forest, options.seed);
                if (store.stage(stage_count).size() >= 2) {
                    const WeightLearnResult learned =
                        learn_weights(store, state.members, state.weights, options.rho, space);
                    state.weights = learned.next;
                    WeightsEvent event{state.weights.iteration, state.weights.weights,
                                       learned.delta_raw};
                    state.trail.push_back(event);
                    if (history) history->write_weights(event);
                }
            }
            if (history) history->write_bracket_end(bracket_id);
        }
        if (history) history->write_loop_end(loop);
        log_info("loop " + std::to_string(loop) + " finished, total resource " +
                 std::to_string(store.total_resource()));
    }
}

void run_flat(const ConfigSpace& space, const Objective& objective, const RunOptions& options,
              const std::vector<BracketPlan>& plans, EvaluationStore& store) {
    double sweep_resource = 0.0;
    for (const auto& plan : plans) sweep_resource += plan.total_resource();
    const double budget =
        static_cast<double>(options.total_bracket_loops) * sweep_resource;
    const double full = options.max_resource;
    const int stage_count = store.stage_count();

    std::uint64_t evaluation = store.total_records();
    int failures = 0;
    for (const auto& entry : store.chronology())
        if (entry.failed) ++failures;

    while (store.total_resource() + full <= budget + 1e-9) {
        ++evaluation;
        auto rng = make_rng(derive_seed(options.seed, kSampleStream, evaluation, 0));

        Configuration config;
        if (options.mode == RunMode::CompleteOnlyBo) {
            std::vector<std::optional<ForestModel>> members(
                static_cast<std::size_t>(stage_count));
            const StageDataset& complete = store.stage(stage_count);
            if (complete.size() >= 2)
                members.back() = fit_forest(
                    complete, space,
                    stage_fit_params(options.forest, options.seed, stage_count, complete.size()));
            EnsembleSurrogate ensemble{std::move(members), uniform_weights(stage_count)};
            config = sample_batch(ensemble, space, 1, options, store, rng).front();
        } else {
            config = sample_uniform(space, 1, rng).front();
        }

        const int bracket_id = static_cast<int>(evaluation) - 1;
        try {
            const double loss = objective.evaluate(config, full, full);
            if (!std::isfinite(loss)) throw EvaluationFailure("non-finite loss");
            store.record(config, stage_count, full, loss, bracket_id);
        } catch (const EvaluationFailure& e) {
            ++failures;
            store.record_failed(config, stage_count, full, bracket_id);
            log_info(std::string("evaluation failed: ") + e.what());
        }

        const auto total = static_cast<int>(store.total_records());
        if (total >= 4 && failures * 2 > total)
            throw RunAborted(std::to_string(failures) + " of " + std::to_string(total) +
                             " evaluations failed");
    }
}

}  // namespace

RunResult run(const ConfigSpace& space, const Objective& objective, const RunOptions& options,
              HistoryWriter* history, const StartState* start) {
    options.validate();
    const std::vector<BracketPlan> plans = plan_brackets(options.max_resource, options.eta);

    EvaluationStore store =
        start ? start->store : EvaluationStore(options.max_resource, options.eta);
    const int stage_count = store.stage_count();
    if (history)
        store.set_sink([history](const EvaluationRecord& rec) { history->write_record(rec); });

    LoopState state;
    state.trail = start ? start->weight_trail : std::vector<WeightsEvent>{};
    if (state.trail.empty()) {
        state.weights = uniform_weights(stage_count);
    } else {
        state.weights.weights = state.trail.back().c;
        state.weights.iteration = state.trail.back().iteration;
    }
    if (options.mode == RunMode::Hoist)
        state.members = update_surrogates(store, space, options.forest, options.seed);
    else
        state.members.assign(static_cast<std::size_t>(stage_count), std::nullopt);

    if (options.mode == RunMode::Hoist || options.mode == RunMode::HyperbandRandom) {
        run_bracket_sweep(space, objective, options, plans, store, state, history,
                          start ? start->completed_loops : 0);
    } else {
        run_flat(space, objective, options, plans, store);
    }

    store.set_sink(nullptr);

    RunResult result;
    result.incumbent = store.incumbent();
    result.weight_trail = std::move(state.trail);
    result.trace = trace_from_store(store);
    result.total_resource = store.total_resource();
    result.store = std::move(store);
    return result;
}

}  // namespace hoist
