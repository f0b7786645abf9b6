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

#ifndef HOIST_STORE_HPP
#define HOIST_STORE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hoist/config_space.hpp"

namespace hoist {

struct StoreError : std::runtime_error {
    explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

// One observation (x, r, y) at a fidelity stage. Failed evaluations carry
// loss = +infinity and never enter a stage dataset.
struct EvaluationRecord {
    Configuration config;
    double resource = 0.0;
    double loss = 0.0;
    int stage_index = 0;  // 1-based position on the resource ladder
    int bracket_id = 0;
    std::uint64_t created_seq = 0;
    bool failed = false;
};

struct StageDataset {
    int stage_index = 0;
    double resource_level = 0.0;
    std::vector<EvaluationRecord> records;

    std::size_t size() const { return records.size(); }
};

// Geometric resource ladder r_i = R * eta^(i-K), i = 1..K, built by repeated
// division from R so that every consumer sees bit-identical levels.
std::vector<double> resource_ladder(double max_resource, double eta);

// All evaluation data of one run, partitioned by fidelity stage. Single
// writer; an optional sink observes every accepted record (history logging).
class EvaluationStore {
  public:
    EvaluationStore() = default;
    EvaluationStore(double max_resource, double eta);

    double max_resource() const { return max_resource_; }
    double eta() const { return eta_; }
    int stage_count() const { return static_cast<int>(stages_.size()); }
    const StageDataset& stage(int stage_index) const;  // 1-based
    const std::vector<StageDataset>& stages() const { return stages_; }
    const std::vector<EvaluationRecord>& failed_records() const { return failed_; }

    // Appends a successful evaluation; the resource must equal the stage's
    // ladder level and the loss must be finite.
    std::uint64_t record(const Configuration& config, int stage_index, double resource,
                         double loss, int bracket_id);

    // Appends a failed evaluation (kept for the history log only).
    std::uint64_t record_failed(const Configuration& config, int stage_index, double resource,
                                int bracket_id);

    // Replay path: same validation, but the sequence number comes from the log.
    void replay(const EvaluationRecord& rec);

    // Best complete evaluation (stage K), ties broken by earliest sequence.
    std::optional<EvaluationRecord> incumbent() const;

    std::uint64_t total_records() const { return next_seq_; }
    double total_resource() const { return total_resource_; }

    // Chronological skeleton of every record (successful and failed), in
    // sequence order; enough to rebuild traces and ledgers.
    struct LogEntry {
        std::uint64_t seq;
        int stage_index;
        int bracket_id;
        double resource;
        double loss;
        bool failed;
    };
    const std::vector<LogEntry>& chronology() const { return chronology_; }

    using RecordSink = std::function<void(const EvaluationRecord&)>;
    void set_sink(RecordSink sink) { sink_ = std::move(sink); }

  private:
    std::uint64_t append(const Configuration& config, int stage_index, double resource,
                         double loss, int bracket_id, bool failed,
                         std::optional<std::uint64_t> forced_seq);

    double max_resource_ = 0.0;
    double eta_ = 0.0;
    std::vector<StageDataset> stages_;
    std::vector<EvaluationRecord> failed_;
    std::vector<LogEntry> chronology_;
    std::uint64_t next_seq_ = 0;  // count of records issued so far
    double total_resource_ = 0.0;
    RecordSink sink_;
};

}  // namespace hoist

#endif  // HOIST_STORE_HPP
