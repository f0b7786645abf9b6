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

#include "hoist/store.hpp"

#include <cmath>
#include <limits>

namespace hoist {

std::vector<double> resource_ladder(double max_resource, double eta) {
    if (!(max_resource >= 1.0)) throw StoreError("max_resource must be >= 1");
    if (!(eta > 1.0)) throw StoreError("eta must be > 1");
    // floor(log_eta R); the epsilon absorbs one-ulp error in the log ratio
    int s_max = static_cast<int>(std::floor(std::log(max_resource) / std::log(eta) + 1e-9));
    std::vector<double> ladder(static_cast<std::size_t>(s_max) + 1);
    ladder.back() = max_resource;
    for (int i = s_max - 1; i >= 0; --i) ladder[static_cast<std::size_t>(i)] = ladder[i + 1] / eta;
    return ladder;
}

EvaluationStore::EvaluationStore(double max_resource, double eta)
    : max_resource_(max_resource), eta_(eta) {
    auto ladder = resource_ladder(max_resource, eta);
    stages_.resize(ladder.size());
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        stages_[i].stage_index = static_cast<int>(i) + 1;
        stages_[i].resource_level = ladder[i];
    }
}

const StageDataset& EvaluationStore::stage(int stage_index) const {
    if (stage_index < 1 || stage_index > stage_count())
        throw StoreError("stage index " + std::to_string(stage_index) + " out of range");
    return stages_[static_cast<std::size_t>(stage_index - 1)];
}

std::uint64_t EvaluationStore::append(const Configuration& config, int stage_index,
                                      double resource, double loss, int bracket_id, bool failed,
                                      std::optional<std::uint64_t> forced_seq) {
    if (stage_index < 1 || stage_index > stage_count())
        throw StoreError("record: stage index " + std::to_string(stage_index) + " out of range");
    const StageDataset& target = stages_[static_cast<std::size_t>(stage_index - 1)];
    if (resource != target.resource_level)
        throw StoreError("record: resource " + std::to_string(resource) +
                         " does not match stage " + std::to_string(stage_index) + " level " +
                         std::to_string(target.resource_level));
    if (!failed && !std::isfinite(loss))
        throw StoreError("record: non-finite loss for configuration id " +
                         std::to_string(config.id()));

    std::uint64_t seq;
    if (forced_seq) {
        if (*forced_seq <= next_seq_)
            throw StoreError("replay: sequence numbers must be strictly increasing");
        seq = *forced_seq;
        next_seq_ = seq;
    } else {
        seq = ++next_seq_;
    }

    EvaluationRecord rec;
    rec.config = config;
    rec.resource = resource;
    rec.loss = failed ? std::numeric_limits<double>::infinity() : loss;
    rec.stage_index = stage_index;
    rec.bracket_id = bracket_id;
    rec.created_seq = seq;
    rec.failed = failed;

    if (failed) {
        failed_.push_back(rec);
    } else {
        stages_[static_cast<std::size_t>(stage_index - 1)].records.push_back(rec);
    }
    chronology_.push_back({seq, stage_index, bracket_id, resource, rec.loss, failed});
    total_resource_ += resource;
    if (sink_) sink_(rec);
    return seq;
}

std::uint64_t EvaluationStore::record(const Configuration& config, int stage_index,
                                      double resource, double loss, int bracket_id) {
    return append(config, stage_index, resource, loss, bracket_id, false, std::nullopt);
}

std::uint64_t EvaluationStore::record_failed(const Configuration& config, int stage_index,
                                             double resource, int bracket_id) {
    return append(config, stage_index, resource, 0.0, bracket_id, true, std::nullopt);
}

void EvaluationStore::replay(const EvaluationRecord& rec) {
    append(rec.config, rec.stage_index, rec.resource, rec.loss, rec.bracket_id, rec.failed,
           rec.created_seq);
}

std::optional<EvaluationRecord> EvaluationStore::incumbent() const {
    const StageDataset& complete = stages_.back();
    const EvaluationRecord* best = nullptr;
    for (const auto& rec : complete.records) {
        if (best == nullptr || rec.loss < best->loss) best = &rec;
    }
    if (best == nullptr) return std::nullopt;
    return *best;
}

}  // namespace hoist
