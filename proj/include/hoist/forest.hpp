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

#ifndef HOIST_FOREST_HPP
#define HOIST_FOREST_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hoist/config_space.hpp"
#include "hoist/store.hpp"

namespace hoist {

struct ForestParams {
    int tree_count = 10;
    double max_features_fraction = 0.8;  // fraction of features examined per split
    int min_samples_split = 2;
    bool bootstrap = true;
    double variance_floor = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean

    bool leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> features) const;
};

// A fitted probabilistic forest. Targets are min-max normalized to [0,1] at
// fit time (constant targets map to 0), so every stage surrogate shares one
// output scale.
struct ForestModel {
    std::vector<RegressionTree> trees;
    double target_min = 0.0;  // raw-loss normalization used at fit time
    double target_max = 0.0;
    int feature_dim = 0;
    double variance_floor = 1e-8;
};

// Gaussian posterior on the normalized loss scale.
struct PosteriorPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

// Trains one tree per bootstrap resample with per-split feature subsampling.
// Deterministic given params.seed. Requires >= 2 records.
ForestModel fit_forest(const StageDataset& dataset, const ConfigSpace& space,
                       const ForestParams& params);

// Mean and population variance (divisor = tree count) of the per-tree
// predictions, floored at the model's variance floor.
PosteriorPrediction predict(const ForestModel& model, const Configuration& config,
                            const ConfigSpace& space);
PosteriorPrediction predict_encoded(const ForestModel& model, std::span<const double> features);

}  // namespace hoist

#endif  // HOIST_FOREST_HPP
