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

#include "hoist/history.hpp"

#include <filesystem>
#include <limits>

namespace hoist {

nlohmann::json record_to_json(const EvaluationRecord& rec) {
    nlohmann::json line;
    line["seq"] = rec.created_seq;
    line["bracket"] = rec.bracket_id;
    line["stage"] = rec.stage_index;
    line["resource"] = rec.resource;
    // +inf (the failed marker) has no JSON number form; null round-trips it
    if (rec.failed) {
        line["loss"] = nullptr;
        line["failed"] = true;
    } else {
        line["loss"] = rec.loss;
    }
    line["config"] = config_values_to_json(rec.config);
    return line;
}

EvaluationRecord record_from_json(const nlohmann::json& line) {
    if (!line.is_object() || !line.contains("seq") || !line.contains("bracket") ||
        !line.contains("stage") || !line.contains("resource") || !line.contains("loss") ||
        !line.contains("config"))
        throw HistoryError("history: malformed record line");

    EvaluationRecord rec;
    rec.created_seq = line["seq"].get<std::uint64_t>();
    rec.bracket_id = line["bracket"].get<int>();
    rec.stage_index = line["stage"].get<int>();
    rec.resource = line["resource"].get<double>();
    rec.failed = line.value("failed", false);
    rec.loss = rec.failed ? std::numeric_limits<double>::infinity() : line["loss"].get<double>();
    rec.config = config_from_json(line["config"]);
    return rec;
}

HistoryWriter::HistoryWriter(const std::string& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw HistoryError("history: cannot open '" + path + "' for writing");
}

void HistoryWriter::write_line(const nlohmann::json& line) {
    out_ << line.dump() << '\n';
    out_.flush();
}

void HistoryWriter::write_meta(const nlohmann::json& options, const nlohmann::json& space) {
    write_line({{"event", "meta"}, {"options", options}, {"space", space}});
}

void HistoryWriter::write_record(const EvaluationRecord& rec) { write_line(record_to_json(rec)); }

void HistoryWriter::write_weights(const WeightsEvent& event) {
    write_line({{"event", "weights"},
                {"iteration", event.iteration},
                {"c", event.c},
                {"delta_raw", event.delta_raw}});
}

void HistoryWriter::write_bracket_end(int bracket_id) {
    write_line({{"event", "bracket_end"}, {"bracket", bracket_id}});
}

void HistoryWriter::write_loop_end(int loop) {
    write_line({{"event", "loop_end"}, {"loop", loop}});
}

ReplayedHistory replay_history(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw HistoryError("history: cannot open '" + path + "'");

    ReplayedHistory replayed;
    replayed.meta = nlohmann::json();

    // Bracket-scheduled runs commit work at bracket_end/loop_end checkpoints;
    // flat runs commit per record line.
    bool checkpointed_mode = false;

    std::vector<EvaluationRecord> pending_records;
    std::vector<WeightsEvent> pending_weights;
    std::uintmax_t consumed = 0;

    auto flush_pending = [&] {
        if (!replayed.store.has_value())
            throw HistoryError("history: records precede the meta line");
        for (const auto& rec : pending_records) replayed.store->replay(rec);
        for (const auto& ev : pending_weights) replayed.weight_trail.push_back(ev);
        pending_records.clear();
        pending_weights.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        const std::uintmax_t line_bytes = static_cast<std::uintmax_t>(line.size()) + 1;
        if (line.empty()) {
            consumed += line_bytes;
            continue;
        }
        nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded()) break;  // torn tail; stop here

        if (parsed.is_object() && parsed.contains("event")) {
            const std::string event = parsed["event"].get<std::string>();
            if (event == "meta") {
                replayed.meta = parsed;
                const nlohmann::json& options = parsed.value("options", nlohmann::json());
                if (!options.contains("max_resource") || !options.contains("eta"))
                    throw HistoryError("history: meta line lacks max_resource/eta");
                replayed.store.emplace(options["max_resource"].get<double>(),
                                       options["eta"].get<double>());
                const std::string mode = options.value("mode", "");
                checkpointed_mode = (mode == "hoist" || mode == "hyperband_random");
                consumed += line_bytes;
                replayed.consistent_bytes = consumed;
            } else if (event == "weights") {
                WeightsEvent ev;
                ev.iteration = parsed["iteration"].get<int>();
                ev.c = parsed["c"].get<std::vector<double>>();
                ev.delta_raw = parsed["delta_raw"].get<std::vector<double>>();
                pending_weights.push_back(std::move(ev));
                consumed += line_bytes;
                if (!checkpointed_mode) {
                    flush_pending();
                    replayed.consistent_bytes = consumed;
                }
            } else if (event == "bracket_end") {
                flush_pending();
                ++replayed.completed_brackets;
                consumed += line_bytes;
                replayed.consistent_bytes = consumed;
            } else if (event == "loop_end") {
                flush_pending();
                ++replayed.completed_loops;
                consumed += line_bytes;
                replayed.consistent_bytes = consumed;
            } else {
                throw HistoryError("history: unknown event '" + event + "'");
            }
        } else {
            pending_records.push_back(record_from_json(parsed));
            consumed += line_bytes;
            if (!checkpointed_mode) {
                flush_pending();
                replayed.consistent_bytes = consumed;
            }
        }
    }

    if (!checkpointed_mode && (!pending_records.empty() || !pending_weights.empty()))
        flush_pending();
    return replayed;
}

void truncate_history(const std::string& path, std::uintmax_t bytes) {
    std::filesystem::resize_file(path, bytes);
}

}  // namespace hoist
