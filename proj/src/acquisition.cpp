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

#include "hoist/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hoist {

namespace {

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double expected_improvement(const PosteriorPrediction& prediction, double y_star) {
    if (prediction.variance < 0.0)
        throw std::invalid_argument("expected_improvement: negative variance");
    const double improvement = y_star - prediction.mean;
    const double sigma = std::sqrt(prediction.variance);
    if (sigma == 0.0) return std::max(improvement, 0.0);
    const double z = improvement / sigma;
    return improvement * normal_cdf(z) + sigma * normal_pdf(z);
}

double incumbent_reference(const EnsembleSurrogate& ensemble, const EvaluationStore& store,
                           const ConfigSpace& space, IncumbentRule rule) {
    const StageDataset& complete = store.stage(store.stage_count());
    if (complete.records.empty()) return 0.0;

    if (rule == IncumbentRule::ObservedMin) {
        std::vector<double> losses(complete.size());
        for (std::size_t j = 0; j < complete.size(); ++j) losses[j] = complete.records[j].loss;
        const std::vector<double> normalized = min_max_normalize(losses);
        return *std::min_element(normalized.begin(), normalized.end());
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : complete.records)
        best = std::min(best, ensemble_predict(ensemble, rec.config, space).mean);
    return best;
}

std::vector<Configuration> select_candidates(const EnsembleSurrogate& ensemble,
                                             const ConfigSpace& space, int count,
                                             const AcquisitionContext& ctx,
                                             std::mt19937_64& rng) {
    if (count < 1) throw std::invalid_argument("select_candidates: count must be >= 1");
    if (ctx.pool_size < count)
        throw std::invalid_argument("select_candidates: pool_size must be >= count");
    if (!ensemble.usable())
        throw EnsembleError("select_candidates: ensemble unusable");

    std::vector<Configuration> pool = sample_uniform(space, ctx.pool_size, rng);
    std::vector<double> scores(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::vector<double> features = encode(space, pool[i]);
        scores[i] = expected_improvement(ensemble_predict_encoded(ensemble, features), ctx.y_star);
    }

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<Configuration> selected;
    selected.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) selected.push_back(pool[order[static_cast<std::size_t>(i)]]);

    const int replace = static_cast<int>(std::floor(ctx.random_fraction * count));
    if (replace > 0) {
        std::vector<Configuration> fresh = sample_uniform(space, replace, rng);
        for (int i = 0; i < replace; ++i)
            selected[static_cast<std::size_t>(count - replace + i)] = std::move(fresh[static_cast<std::size_t>(i)]);
    }
    return selected;
}

}  // namespace hoist
