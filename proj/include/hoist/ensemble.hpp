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

#ifndef HOIST_ENSEMBLE_HPP
#define HOIST_ENSEMBLE_HPP

#include <optional>
#include <span>
#include <vector>

#include "hoist/config_space.hpp"
#include "hoist/forest.hpp"
#include "hoist/store.hpp"

namespace hoist {

struct EnsembleError : std::runtime_error {
    explicit EnsembleError(const std::string& what) : std::runtime_error(what) {}
};

// Per-stage mixing weights c, each in [0,1] with unit sum.
struct WeightVector {
    std::vector<double> weights;
    int iteration = 0;

    std::size_t size() const { return weights.size(); }
};

WeightVector uniform_weights(int member_count);

// (v - min) / (max - min); a constant vector maps to all zeros. This is the
// single normalization convention shared with forest fitting.
std::vector<double> min_max_normalize(const std::vector<double>& values);

// Sample Pearson correlation; zero variance on either side yields 0
// (a constant predictor carries no ranking information).
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

// Weighted bagging of the per-stage surrogates. Members without enough data
// are absent; their weight mass is renormalized away at prediction time.
struct EnsembleSurrogate {
    std::vector<std::optional<ForestModel>> members;
    WeightVector weights;

    std::vector<bool> active_mask() const;
    bool usable() const;
};

// Weights renormalized over active members, then mean = sum c_i * mu_i and
// variance = sum c_i^2 * sigma_i^2 (members treated as independent).
PosteriorPrediction ensemble_predict(const EnsembleSurrogate& ensemble,
                                     const Configuration& config, const ConfigSpace& space);
PosteriorPrediction ensemble_predict_encoded(const EnsembleSurrogate& ensemble,
                                             std::span<const double> features);

// Formula core used by ensemble_predict: combine member posteriors under
// renormalized weights; absent members contribute nothing.
PosteriorPrediction combine_predictions(
    const std::vector<std::optional<PosteriorPrediction>>& member_predictions,
    const WeightVector& weights);

struct WeightLearnResult {
    WeightVector next;
    std::vector<double> delta_raw;  // per-member correlation before clipping
};

// One weight-learning step: correlate each member's predicted means against
// the normalized complete-evaluation losses, clip negatives to zero, amplify
// by squared-share, then blend c_next = rho * c_prev + (1 - rho) * delta.
// If every clipped correlation is zero the previous weights are kept.
// Requires >= 2 complete-stage records.
WeightLearnResult learn_weights(const EvaluationStore& store,
                                const std::vector<std::optional<ForestModel>>& members,
                                const WeightVector& c_prev, double rho,
                                const ConfigSpace& space);

}  // namespace hoist

#endif  // HOIST_ENSEMBLE_HPP
