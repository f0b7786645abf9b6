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

#include "hoist/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hoist/ensemble.hpp"
#include "hoist/rng.hpp"

namespace hoist {

void ForestParams::validate() const {
    if (tree_count < 1) throw std::invalid_argument("forest: tree_count must be >= 1");
    if (!(max_features_fraction > 0.0 && max_features_fraction <= 1.0))
        throw std::invalid_argument("forest: max_features_fraction must be in (0, 1]");
    if (min_samples_split < 2)
        throw std::invalid_argument("forest: min_samples_split must be >= 2");
    if (!(variance_floor > 0.0))
        throw std::invalid_argument("forest: variance_floor must be > 0");
}

double RegressionTree::predict(std::span<const double> features) const {
    int node = 0;
    while (!nodes[static_cast<std::size_t>(node)].leaf()) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

// Data shared by one tree build: row-major feature matrix plus targets.
struct TrainingView {
    const std::vector<std::vector<double>>& rows;
    const std::vector<double>& targets;
    int feature_dim;
};

struct SplitChoice {
    double reduction = 0.0;
    int feature = -1;
    double threshold = 0.0;

    bool valid() const { return feature >= 0; }
    // Larger reduction wins; ties fall to the lowest feature, then threshold.
    bool better_than(const SplitChoice& other) const {
        if (!other.valid()) return valid();
        if (reduction != other.reduction) return reduction > other.reduction;
        if (feature != other.feature) return feature < other.feature;
        return threshold < other.threshold;
    }
};

double subset_mean(const TrainingView& view, const std::vector<int>& indices) {
    double sum = 0.0;
    for (int i : indices) sum += view.targets[static_cast<std::size_t>(i)];
    return sum / static_cast<double>(indices.size());
}

// Best squared-error-reduction threshold for one feature, or invalid if the
// feature is constant on this node.
SplitChoice best_split_on_feature(const TrainingView& view, const std::vector<int>& indices,
                                  int feature) {
    const std::size_t n = indices.size();
    std::vector<int> order(indices);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return view.rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(feature)] <
               view.rows[static_cast<std::size_t>(b)][static_cast<std::size_t>(feature)];
    });

    double total_sum = 0.0, total_sq = 0.0;
    for (int i : order) {
        double y = view.targets[static_cast<std::size_t>(i)];
        total_sum += y;
        total_sq += y * y;
    }
    const double parent_sse =
        std::max(0.0, total_sq - total_sum * total_sum / static_cast<double>(n));

    SplitChoice best;
    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t p = 1; p < n; ++p) {
        double y = view.targets[static_cast<std::size_t>(order[p - 1])];
        left_sum += y;
        left_sq += y * y;
        double xl = view.rows[static_cast<std::size_t>(order[p - 1])][static_cast<std::size_t>(feature)];
        double xr = view.rows[static_cast<std::size_t>(order[p])][static_cast<std::size_t>(feature)];
        if (xl == xr) continue;
        double threshold = xl + (xr - xl) / 2.0;
        if (threshold >= xr) threshold = xl;  // midpoint rounded up to the right value

        double right_sum = total_sum - left_sum;
        double right_sq = total_sq - left_sq;
        double nl = static_cast<double>(p);
        double nr = static_cast<double>(n - p);
        double sse = std::max(0.0, left_sq - left_sum * left_sum / nl) +
                     std::max(0.0, right_sq - right_sum * right_sum / nr);
        // A partition can never increase total SSE; negatives are float noise.
        SplitChoice candidate{std::max(0.0, parent_sse - sse), feature, threshold};
        if (candidate.better_than(best)) best = candidate;
    }
    return best;
}

class TreeBuilder {
  public:
    TreeBuilder(const TrainingView& view, const ForestParams& params, std::mt19937_64& rng)
        : view_(view), params_(params), rng_(rng) {}

    RegressionTree build(const std::vector<int>& indices) {
        RegressionTree tree;
        grow(tree, indices);
        return tree;
    }

  private:
    int grow(RegressionTree& tree, const std::vector<int>& indices) {
        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (static_cast<int>(indices.size()) < params_.min_samples_split ||
            constant_targets(indices)) {
            tree.nodes[static_cast<std::size_t>(node_id)].value = subset_mean(view_, indices);
            return node_id;
        }

        SplitChoice split = choose_split(indices);
        if (!split.valid()) {
            tree.nodes[static_cast<std::size_t>(node_id)].value = subset_mean(view_, indices);
            return node_id;
        }

        std::vector<int> left, right;
        for (int i : indices) {
            double x = view_.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(split.feature)];
            (x <= split.threshold ? left : right).push_back(i);
        }

        int left_id = grow(tree, left);
        int right_id = grow(tree, right);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }

    bool constant_targets(const std::vector<int>& indices) const {
        double first = view_.targets[static_cast<std::size_t>(indices.front())];
        for (int i : indices)
            if (view_.targets[static_cast<std::size_t>(i)] != first) return false;
        return true;
    }

    // Examines a random subset of ceil(fraction * d) features; when all of
    // them are constant on this node the search keeps drawing from the rest
    // of the permutation, so a splittable node is never forced into a leaf.
    SplitChoice choose_split(const std::vector<int>& indices) {
        const int d = view_.feature_dim;
        std::vector<int> features(static_cast<std::size_t>(d));
        std::iota(features.begin(), features.end(), 0);
        for (int i = d - 1; i > 0; --i) {
            std::uniform_int_distribution<int> dist(0, i);
            std::swap(features[static_cast<std::size_t>(i)],
                      features[static_cast<std::size_t>(dist(rng_))]);
        }
        const int subset =
            static_cast<int>(std::ceil(params_.max_features_fraction * static_cast<double>(d)));

        SplitChoice best;
        for (int k = 0; k < d; ++k) {
            if (k >= subset && best.valid()) break;
            SplitChoice candidate =
                best_split_on_feature(view_, indices, features[static_cast<std::size_t>(k)]);
            if (candidate.valid() && candidate.better_than(best)) best = candidate;
        }
        return best;
    }

    const TrainingView& view_;
    const ForestParams& params_;
    std::mt19937_64& rng_;
};

}  // namespace

ForestModel fit_forest(const StageDataset& dataset, const ConfigSpace& space,
                       const ForestParams& params) {
    params.validate();
    const std::size_t n = dataset.records.size();
    if (n < 2) throw std::invalid_argument("fit_forest: need >= 2 records in stage " +
                                           std::to_string(dataset.stage_index));

    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(encode(space, dataset.records[i].config));
        raw[i] = dataset.records[i].loss;
    }
    std::vector<double> targets = min_max_normalize(raw);

    ForestModel model;
    model.feature_dim = static_cast<int>(space.size());
    model.target_min = *std::min_element(raw.begin(), raw.end());
    model.target_max = *std::max_element(raw.begin(), raw.end());
    model.variance_floor = params.variance_floor;
    model.trees.reserve(static_cast<std::size_t>(params.tree_count));

    TrainingView view{rows, targets, model.feature_dim};
    for (int t = 0; t < params.tree_count; ++t) {
        auto rng = make_rng(derive_seed(params.seed, kForestStream, static_cast<std::uint64_t>(t)));
        std::vector<int> indices(n);
        if (params.bootstrap) {
            std::uniform_int_distribution<int> dist(0, static_cast<int>(n) - 1);
            for (auto& idx : indices) idx = dist(rng);
        } else {
            std::iota(indices.begin(), indices.end(), 0);
        }
        TreeBuilder builder(view, params, rng);
        model.trees.push_back(builder.build(indices));
    }
    return model;
}

PosteriorPrediction predict_encoded(const ForestModel& model, std::span<const double> features) {
    if (model.trees.empty()) throw std::logic_error("predict: model is not fitted");
    if (static_cast<int>(features.size()) != model.feature_dim)
        throw std::invalid_argument("predict: feature dimension mismatch");

    const double count = static_cast<double>(model.trees.size());
    double sum = 0.0;
    std::vector<double> per_tree;
    per_tree.reserve(model.trees.size());
    for (const auto& tree : model.trees) {
        double p = tree.predict(features);
        per_tree.push_back(p);
        sum += p;
    }
    const double mean = sum / count;
    double variance = 0.0;
    for (double p : per_tree) variance += (p - mean) * (p - mean);
    variance /= count;
    return {mean, std::max(variance, model.variance_floor)};
}

PosteriorPrediction predict(const ForestModel& model, const Configuration& config,
                            const ConfigSpace& space) {
    std::vector<double> features = encode(space, config);
    return predict_encoded(model, features);
}

}  // namespace hoist
