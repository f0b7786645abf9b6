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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hoist/cli.hpp"

namespace {

void add_common_flags(CLI::App* cmd, hoist::RunManifest& manifest, std::string& mode) {
    cmd->add_option("--space", manifest.space_path,
                    "space definition JSON (defaults to the builtin objective's space)");
    cmd->add_option("--objective", manifest.objective,
                    "curve-bench | deceptive-bench | distorted-branin | external");
    cmd->add_option("--external-cmd", manifest.external_cmd,
                    "shell command implementing the external evaluation protocol");
    cmd->add_option("--max-resource", manifest.options.max_resource, "maximum training resource R");
    cmd->add_option("--eta", manifest.options.eta, "successive-halving reduction factor");
    cmd->add_option("--loops", manifest.options.total_bracket_loops, "bracket-sweep loops");
    cmd->add_option("--mode", mode, "hoist | random | hyperband_random | complete_only_bo");
    cmd->add_option("--seed", manifest.options.seed, "random seed");
    cmd->add_option("--rho", manifest.options.rho, "weight smoothing factor");
    cmd->add_option("--trees", manifest.options.forest.tree_count, "trees per surrogate");
    cmd->add_option("--pool-size", manifest.options.pool_size, "EI candidate pool size");
    cmd->add_option("--random-fraction", manifest.options.random_fraction,
                    "fraction of each selection replaced by uniform samples");
    cmd->add_option("--workers", manifest.options.workers, "concurrent evaluations per stage");
    cmd->add_option("--timeout-secs", manifest.timeout_secs, "external evaluation timeout");
    cmd->add_option("--out", manifest.out_dir, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-fidelity hyperparameter optimization with an ensemble surrogate"};
    app.require_subcommand(1);

    hoist::RunManifest manifest;
    std::string mode_text = "hoist";
    std::vector<std::string> modes;
    std::vector<std::uint64_t> seeds;
    std::string report_dir;

    CLI::App* run_cmd = app.add_subcommand("run", "execute one optimization run");
    add_common_flags(run_cmd, manifest, mode_text);

    CLI::App* compare_cmd = app.add_subcommand("compare", "run a (mode, seed) comparison grid");
    add_common_flags(compare_cmd, manifest, mode_text);
    compare_cmd->add_option("--modes", modes, "modes to compare")->delimiter(',')->required();
    compare_cmd->add_option("--seeds", seeds, "seeds to compare")->delimiter(',')->required();

    CLI::App* report_cmd = app.add_subcommand("report", "summarize a run directory");
    report_cmd->add_option("dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return hoist::kExitBadInput;
    }

    if (run_cmd->parsed() || compare_cmd->parsed()) {
        auto mode = hoist::parse_run_mode(mode_text);
        if (!mode) {
            std::cerr << "error: unknown mode '" << mode_text << "'\n";
            return hoist::kExitBadInput;
        }
        manifest.options.mode = *mode;
        try {
            manifest.options.validate();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return hoist::kExitBadInput;
        }
    }

    if (run_cmd->parsed()) return hoist::cmd_run(manifest);
    if (compare_cmd->parsed()) return hoist::cmd_compare(manifest, modes, seeds);
    return hoist::cmd_report(report_dir);
}
