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

#include "hoist/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "hoist/log.hpp"

namespace hoist {

namespace fs = std::filesystem;

std::string format_double(double value) { return nlohmann::json(value).dump(); }

namespace {

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

ConfigSpace resolve_space(const RunManifest& manifest) {
    if (!manifest.space_path.empty()) return load_space_file(manifest.space_path);
    if (manifest.objective == "external")
        throw SpaceError("--space is required for external objectives");
    return builtin_objective_space(manifest.objective);
}

std::unique_ptr<Objective> resolve_objective(const RunManifest& manifest) {
    if (manifest.objective == "external") {
        if (manifest.external_cmd.empty())
            throw SpaceError("--external-cmd is required with --objective external");
        return std::make_unique<ExternalCommandObjective>(manifest.external_cmd,
                                                          manifest.timeout_secs);
    }
    auto objective = make_builtin_objective(manifest.objective);
    if (!objective) throw SpaceError("unknown objective '" + manifest.objective + "'");
    return objective;
}

// The meta/result options block: every flag with its effective value, so a
// run is reproducible from its outputs alone.
nlohmann::json manifest_options_json(const RunManifest& manifest) {
    nlohmann::json options = options_to_json(manifest.options);
    options["objective"] = manifest.objective;
    options["external_cmd"] = manifest.external_cmd;
    options["timeout_secs"] = manifest.timeout_secs;
    return options;
}

// Resume requires identical options apart from the loop budget and worker
// count (neither changes any decision).
bool compatible_options(nlohmann::json a, nlohmann::json b) {
    for (auto* doc : {&a, &b}) {
        doc->erase("loops");
        doc->erase("workers");
    }
    return a == b;
}

std::string convergence_csv(const std::vector<TracePoint>& trace) {
    std::string csv = "cum_resource,best_loss\n";
    for (const auto& point : trace)
        csv += format_double(point.cum_resource) + "," + format_double(point.best_loss) + "\n";
    return csv;
}

nlohmann::json result_json(const RunManifest& manifest, const RunResult& result,
                           const nlohmann::json& space_json) {
    nlohmann::json doc;
    if (result.incumbent.has_value()) {
        doc["incumbent"] = {{"config", config_values_to_json(result.incumbent->config)},
                            {"loss", result.incumbent->loss},
                            {"seq", result.incumbent->created_seq},
                            {"stage", result.incumbent->stage_index},
                            {"resource", result.incumbent->resource}};
    } else {
        doc["incumbent"] = nullptr;
    }
    doc["total_resource"] = result.total_resource;
    doc["evaluations"] = result.store.total_records();
    doc["options"] = manifest_options_json(manifest);
    doc["space"] = space_json;
    if (!result.weight_trail.empty()) {
        doc["final_weights"] = result.weight_trail.back().c;
    } else {
        doc["final_weights"] = nullptr;
    }
    return doc;
}

double sweep_resource(const RunOptions& options) {
    double sweep = 0.0;
    for (const auto& plan : plan_brackets(options.max_resource, options.eta))
        sweep += plan.total_resource();
    return sweep;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

int cmd_run(const RunManifest& manifest) {
    try {
        const ConfigSpace space = resolve_space(manifest);
        const nlohmann::json space_json = space_to_json(space);
        const auto objective = resolve_objective(manifest);
        const nlohmann::json options_json = manifest_options_json(manifest);

        fs::create_directories(manifest.out_dir);
        const fs::path history_path = fs::path(manifest.out_dir) / "history.jsonl";

        std::optional<StartState> start;
        bool resuming = false;
        if (fs::exists(history_path) && fs::file_size(history_path) > 0) {
            ReplayedHistory replayed = replay_history(history_path.string());
            if (replayed.meta.is_null() || !replayed.store.has_value()) {
                std::cerr << "error: existing history lacks a meta line; refusing to resume\n";
                return kExitBadInput;
            }
            if (!compatible_options(replayed.meta["options"], options_json) ||
                replayed.meta["space"] != space_json) {
                std::cerr << "error: existing history is incompatible with these options\n";
                return kExitBadInput;
            }
            truncate_history(history_path.string(), replayed.consistent_bytes);
            start.emplace(StartState{std::move(*replayed.store), std::move(replayed.weight_trail),
                                     replayed.completed_loops});
            resuming = true;
            log_info("resuming from " + std::to_string(start->store.total_records()) +
                     " replayed records");
        }

        HistoryWriter writer(history_path.string(), resuming);
        if (!resuming) writer.write_meta(options_json, space_json);

        const RunResult result = run(space, *objective, manifest.options, &writer,
                                     start.has_value() ? &*start : nullptr);

        write_file_atomic(fs::path(manifest.out_dir) / "convergence.csv",
                          convergence_csv(result.trace));
        write_file_atomic(fs::path(manifest.out_dir) / "result.json",
                          result_json(manifest, result, space_json).dump(2) + "\n");
        return kExitOk;
    } catch (const SpaceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const HistoryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const RunAborted& e) {
        std::cerr << "error: run aborted: " << e.what() << "\n";
        return kExitAborted;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_compare(const RunManifest& manifest, const std::vector<std::string>& modes,
                const std::vector<std::uint64_t>& seeds) {
    try {
        if (modes.size() < 2 || seeds.size() < 2) {
            std::cerr << "error: compare needs >= 2 modes and >= 2 seeds\n";
            return kExitBadInput;
        }
        std::vector<RunMode> parsed_modes;
        for (const auto& name : modes) {
            auto mode = parse_run_mode(name);
            if (!mode) {
                std::cerr << "error: unknown mode '" << name << "'\n";
                return kExitBadInput;
            }
            parsed_modes.push_back(*mode);
        }
        const ConfigSpace space = resolve_space(manifest);
        const auto objective = resolve_objective(manifest);

        fs::create_directories(manifest.out_dir);

        std::string compare_csv = "mode,seed,cum_resource,best_loss\n";
        // per mode: per seed: trace (empty marks a failed sub-run)
        std::map<std::string, std::vector<std::pair<std::uint64_t, std::vector<TracePoint>>>>
            traces;

        for (std::size_t m = 0; m < parsed_modes.size(); ++m) {
            for (std::uint64_t seed : seeds) {
                RunOptions options = manifest.options;
                options.mode = parsed_modes[m];
                options.seed = seed;
                try {
                    const RunResult result = run(space, *objective, options);
                    for (const auto& point : result.trace)
                        compare_csv += modes[m] + "," + std::to_string(seed) + "," +
                                       format_double(point.cum_resource) + "," +
                                       format_double(point.best_loss) + "\n";
                    traces[modes[m]].emplace_back(seed, result.trace);
                } catch (const std::exception& e) {
                    log_info("sub-run failed (" + modes[m] + ", seed " + std::to_string(seed) +
                             "): " + e.what());
                    compare_csv += modes[m] + "," + std::to_string(seed) + ",,failed\n";
                    traces[modes[m]].emplace_back(seed, std::vector<TracePoint>{});
                }
            }
        }

        std::string summary_csv = "mode,cum_resource,median_best_loss\n";
        const double sweep = sweep_resource(manifest.options);
        for (const auto& name : modes) {
            for (int l = 1; l <= manifest.options.total_bracket_loops; ++l) {
                const double checkpoint = sweep * l;
                std::vector<double> values;
                for (const auto& [seed, trace] : traces[name]) {
                    (void)seed;
                    double best = std::numeric_limits<double>::quiet_NaN();
                    for (const auto& point : trace) {
                        if (point.cum_resource <= checkpoint + 1e-9) best = point.best_loss;
                        else break;
                    }
                    if (!std::isnan(best)) values.push_back(best);
                }
                if (values.empty()) continue;
                summary_csv += name + "," + format_double(checkpoint) + "," +
                               format_double(median(std::move(values))) + "\n";
            }
        }

        write_file_atomic(fs::path(manifest.out_dir) / "compare.csv", compare_csv);
        write_file_atomic(fs::path(manifest.out_dir) / "summary.csv", summary_csv);
        return kExitOk;
    } catch (const SpaceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_report(const std::string& run_dir) {
    try {
        const fs::path history_path = fs::path(run_dir) / "history.jsonl";
        if (!fs::exists(history_path)) {
            std::cerr << "error: no history file in '" << run_dir << "'\n";
            return kExitBadInput;
        }
        const ReplayedHistory replayed = replay_history(history_path.string());
        if (replayed.meta.is_null() || !replayed.store.has_value()) {
            std::cerr << "error: history in '" << run_dir << "' lacks a meta line\n";
            return kExitBadInput;
        }
        const EvaluationStore& store = *replayed.store;

        std::ostringstream out;
        out << "mode: " << replayed.meta["options"].value("mode", "?") << "\n";
        out << "total_resource: " << format_double(store.total_resource()) << "\n";
        out << "evaluations: " << store.total_records() << "\n";
        out << "failed_evaluations: " << store.failed_records().size() << "\n";
        const auto incumbent = store.incumbent();
        if (incumbent.has_value()) {
            out << "incumbent_loss: " << format_double(incumbent->loss) << "\n";
            out << "incumbent_seq: " << incumbent->created_seq << "\n";
            out << "incumbent_config: " << config_values_to_json(incumbent->config).dump()
                << "\n";
        } else {
            out << "incumbent_loss: n/a\n";
        }
        if (!replayed.weight_trail.empty()) {
            out << "weights: " << nlohmann::json(replayed.weight_trail.back().c).dump() << "\n";
        } else {
            out << "weights: n/a\n";
        }
        for (int i = 1; i <= store.stage_count(); ++i) {
            out << "stage_" << i << "_resource: " << format_double(store.stage(i).resource_level)
                << "\n";
            out << "stage_" << i << "_size: " << store.stage(i).size() << "\n";
        }
        std::cout << out.str();
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

}  // namespace hoist
