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

#include "hoist/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace hoist {

WeightVector uniform_weights(int member_count) {
    if (member_count < 1) throw EnsembleError("uniform_weights: need >= 1 member");
    WeightVector w;
    w.weights.assign(static_cast<std::size_t>(member_count),
                     1.0 / static_cast<double>(member_count));
    w.iteration = 0;
    return w;
}

std::vector<double> min_max_normalize(const std::vector<double>& values) {
    if (values.empty()) throw EnsembleError("min_max_normalize: empty input");
    for (double v : values)
        if (!std::isfinite(v)) throw EnsembleError("min_max_normalize: non-finite input");
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size(), 0.0);
    if (hi == lo) return out;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw EnsembleError("pearson_correlation: length mismatch");
    if (a.size() < 2) throw EnsembleError("pearson_correlation: need >= 2 points");
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return 0.0;
    return cov / (std::sqrt(var_a) * std::sqrt(var_b));
}

std::vector<bool> EnsembleSurrogate::active_mask() const {
    std::vector<bool> mask(members.size(), false);
    for (std::size_t i = 0; i < members.size(); ++i) mask[i] = members[i].has_value();
    return mask;
}

bool EnsembleSurrogate::usable() const {
    for (const auto& m : members)
        if (m.has_value()) return true;
    return false;
}

PosteriorPrediction combine_predictions(
    const std::vector<std::optional<PosteriorPrediction>>& member_predictions,
    const WeightVector& weights) {
    if (member_predictions.size() != weights.size())
        throw EnsembleError("combine_predictions: weight/member count mismatch");

    double active_mass = 0.0;
    int active_count = 0;
    for (std::size_t i = 0; i < member_predictions.size(); ++i) {
        if (member_predictions[i].has_value()) {
            active_mass += weights.weights[i];
            ++active_count;
        }
    }
    if (active_count == 0)
        throw EnsembleError("ensemble unusable: no active member");

    double mean = 0.0, variance = 0.0;
    for (std::size_t i = 0; i < member_predictions.size(); ++i) {
        if (!member_predictions[i].has_value()) continue;
        // all stored mass sits on inactive members: fall back to uniform
        const double c = active_mass > 0.0 ? weights.weights[i] / active_mass
                                           : 1.0 / static_cast<double>(active_count);
        mean += c * member_predictions[i]->mean;
        variance += c * c * member_predictions[i]->variance;
    }
    return {mean, variance};
}

PosteriorPrediction ensemble_predict_encoded(const EnsembleSurrogate& ensemble,
                                             std::span<const double> features) {
    std::vector<std::optional<PosteriorPrediction>> predictions(ensemble.members.size());
    for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
        if (ensemble.members[i].has_value())
            predictions[i] = predict_encoded(*ensemble.members[i], features);
    }
    return combine_predictions(predictions, ensemble.weights);
}

PosteriorPrediction ensemble_predict(const EnsembleSurrogate& ensemble,
                                     const Configuration& config, const ConfigSpace& space) {
    std::vector<double> features = encode(space, config);
    return ensemble_predict_encoded(ensemble, features);
}

WeightLearnResult learn_weights(const EvaluationStore& store,
                                const std::vector<std::optional<ForestModel>>& members,
                                const WeightVector& c_prev, double rho,
                                const ConfigSpace& space) {
    const int member_count = static_cast<int>(members.size());
    if (member_count != store.stage_count())
        throw EnsembleError("learn_weights: member count does not match stage count");
    if (c_prev.size() != members.size())
        throw EnsembleError("learn_weights: weight vector size mismatch");
    if (!(rho >= 0.0 && rho <= 1.0)) throw EnsembleError("learn_weights: rho must be in [0,1]");

    const StageDataset& complete = store.stage(store.stage_count());
    if (complete.size() < 2) throw EnsembleError("learn_weights: insufficient complete data");

    std::vector<double> complete_losses(complete.size());
    for (std::size_t j = 0; j < complete.size(); ++j)
        complete_losses[j] = complete.records[j].loss;
    const std::vector<double> observed = min_max_normalize(complete_losses);

    std::vector<std::vector<double>> encoded;
    encoded.reserve(complete.size());
    for (const auto& rec : complete.records) encoded.push_back(encode(space, rec.config));

    std::vector<double> delta(members.size(), 0.0);
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!members[i].has_value()) continue;
        std::vector<double> predicted(complete.size());
        for (std::size_t j = 0; j < complete.size(); ++j)
            predicted[j] = predict_encoded(*members[i], encoded[j]).mean;
        delta[i] = pearson_correlation(predicted, observed);
    }
    WeightLearnResult result;
    result.delta_raw = delta;

    for (double& d : delta) d = std::max(0.0, d);
    double sum_squares = 0.0;
    for (double d : delta) sum_squares += d * d;
    if (sum_squares == 0.0) {
        // every member uninformative or anti-correlated: keep the weights
        result.next = c_prev;
        result.next.iteration = c_prev.iteration + 1;
        return result;
    }
    for (double& d : delta) d = d * d / sum_squares;

    result.next.weights.resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        result.next.weights[i] = rho * c_prev.weights[i] + (1.0 - rho) * delta[i];
    result.next.iteration = c_prev.iteration + 1;
    return result;
}

}  // namespace hoist
