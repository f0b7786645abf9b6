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

#ifndef HOIST_ACQUISITION_HPP
#define HOIST_ACQUISITION_HPP

#include <random>
#include <vector>

#include "hoist/config_space.hpp"
#include "hoist/ensemble.hpp"
#include "hoist/store.hpp"

namespace hoist {

// How the incumbent reference y* is derived from the complete-stage data:
// either the minimum ensemble posterior mean over evaluated configurations
// (default; stays commensurate with normalized posterior outputs) or the raw
// observed minimum on the normalized scale.
enum class IncumbentRule { ModelPredicted, ObservedMin };

struct AcquisitionContext {
    double y_star = 0.0;    // incumbent reference on the normalized loss scale
    int pool_size = 500;
    double random_fraction = 0.0;  // fraction of the selection replaced by fresh uniform draws
};

// Closed-form expected improvement for a Gaussian posterior under the
// minimization convention; sigma = 0 degenerates to max(y_star - mean, 0).
double expected_improvement(const PosteriorPrediction& prediction, double y_star);

// Incumbent reference for EI; requires a usable ensemble and a nonempty
// complete stage (returns 0 when the complete stage is empty, matching the
// normalized-scale convention).
double incumbent_reference(const EnsembleSurrogate& ensemble, const EvaluationStore& store,
                           const ConfigSpace& space, IncumbentRule rule);

// Scores a uniform pool of ctx.pool_size candidates by EI under the ensemble
// posterior and returns the top `count` (ties by pool order). A positive
// random_fraction replaces the floor(random_fraction * count) tail with fresh
// uniform samples. Deterministic given the rng state.
std::vector<Configuration> select_candidates(const EnsembleSurrogate& ensemble,
                                             const ConfigSpace& space, int count,
                                             const AcquisitionContext& ctx,
                                             std::mt19937_64& rng);

}  // namespace hoist

#endif  // HOIST_ACQUISITION_HPP
