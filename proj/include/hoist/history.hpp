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

#ifndef HOIST_HISTORY_HPP
#define HOIST_HISTORY_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hoist/store.hpp"
#include "json.hpp"

namespace hoist {

struct HistoryError : std::runtime_error {
    explicit HistoryError(const std::string& what) : std::runtime_error(what) {}
};

// One learned weight vector, as logged per iteration.
struct WeightsEvent {
    int iteration = 0;
    std::vector<double> c;
    std::vector<double> delta_raw;
};

nlohmann::json record_to_json(const EvaluationRecord& rec);
EvaluationRecord record_from_json(const nlohmann::json& line);

// Append-only JSON-lines run log. Evaluation records are interleaved with
// event lines: a leading "meta" event (options + space), "weights" events,
// and "bracket_end"/"loop_end" checkpoints that mark consistent states for
// resumption.
class HistoryWriter {
  public:
    HistoryWriter() = default;
    HistoryWriter(const std::string& path, bool append);

    bool open() const { return out_.is_open(); }

    void write_meta(const nlohmann::json& options, const nlohmann::json& space);
    void write_record(const EvaluationRecord& rec);
    void write_weights(const WeightsEvent& event);
    void write_bracket_end(int bracket_id);
    void write_loop_end(int loop);

  private:
    void write_line(const nlohmann::json& line);

    std::ofstream out_;
};

// Everything reconstructed from a run log. Records that follow the last
// checkpoint of a bracket-scheduled run belong to an interrupted bracket;
// they are not loaded and `consistent_bytes` marks where the file should be
// truncated before resuming.
struct ReplayedHistory {
    nlohmann::json meta;  // null when the file has no meta line
    std::optional<EvaluationStore> store;
    std::vector<WeightsEvent> weight_trail;
    int completed_brackets = 0;
    int completed_loops = 0;
    std::uintmax_t consistent_bytes = 0;
};

ReplayedHistory replay_history(const std::string& path);

// Drops an inconsistent tail left by an interrupted run.
void truncate_history(const std::string& path, std::uintmax_t bytes);

}  // namespace hoist

#endif  // HOIST_HISTORY_HPP
