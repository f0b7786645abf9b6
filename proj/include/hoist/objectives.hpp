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

#ifndef HOIST_OBJECTIVES_HPP
#define HOIST_OBJECTIVES_HPP

#include <memory>
#include <string>

#include "hoist/config_space.hpp"

namespace hoist {

// An evaluation that could not produce a finite loss (timeouts, crashed
// workers, malformed responses). The scheduler records these as failed.
struct EvaluationFailure : std::runtime_error {
    explicit EvaluationFailure(const std::string& what) : std::runtime_error(what) {}
};

// Multi-fidelity objective: loss of a configuration evaluated with `resource`
// units of training out of `max_resource`. Lower is better.
class Objective {
  public:
    virtual ~Objective() = default;
    virtual double evaluate(const Configuration& config, double resource,
                            double max_resource) const = 0;
    virtual std::string name() const = 0;
};

// Smooth two-dimensional bowl plus a power-law training-curve term a*r^(-b):
// low fidelities are noisy but positively informative about the asymptote.
// Expects x1, x2 in [0,1], a in [0.1,1], b in [0.3,1].
double eval_curve_bench(const Configuration& config, double resource, double max_resource);

// Same bowl, but stages below half the maximum resource see the ranking
// exactly inverted; exercises the suppression of anti-correlated stages.
double eval_deceptive_bench(const Configuration& config, double resource, double max_resource);

// Branin function with a fidelity-dependent sine distortion that vanishes at
// full resource. Expects x1 in [-5,10], x2 in [0,15].
double eval_distorted_branin(const Configuration& config, double resource, double max_resource);

// Canonical spaces for the built-in benchmarks.
ConfigSpace curve_bench_space();       // shared by curve-bench and deceptive-bench
ConfigSpace distorted_branin_space();

// Builtin objective by CLI name ("curve-bench", "deceptive-bench",
// "distorted-branin"); nullptr when unknown.
std::unique_ptr<Objective> make_builtin_objective(const std::string& name);
ConfigSpace builtin_objective_space(const std::string& name);

// Spawns `command` through /bin/sh, writes one JSON request line
// {"config":{...},"resource":r,"max_resource":R} to its stdin and expects one
// JSON response line {"loss": v} with finite v on its stdout. Any timeout,
// nonzero exit, malformed response, or non-finite loss raises
// EvaluationFailure.
double eval_external(const std::string& command, const Configuration& config, double resource,
                     double max_resource, double timeout_secs);

class ExternalCommandObjective : public Objective {
  public:
    ExternalCommandObjective(std::string command, double timeout_secs)
        : command_(std::move(command)), timeout_secs_(timeout_secs) {}

    double evaluate(const Configuration& config, double resource,
                    double max_resource) const override {
        return eval_external(command_, config, resource, max_resource, timeout_secs_);
    }
    std::string name() const override { return "external"; }

  private:
    std::string command_;
    double timeout_secs_;
};

}  // namespace hoist

#endif  // HOIST_OBJECTIVES_HPP
