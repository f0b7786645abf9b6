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

#include "hoist/config_space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hoist {

namespace {

std::uint64_t next_config_id() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

[[noreturn]] void fail(const std::string& msg) { throw SpaceError(msg); }

}  // namespace

std::string to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::Continuous: return "continuous";
        case ParamKind::ContinuousLog: return "continuous-log";
        case ParamKind::Integer: return "integer";
        case ParamKind::Categorical: return "categorical";
    }
    return "?";
}

ParamKind parse_param_kind(const std::string& text) {
    if (text == "continuous") return ParamKind::Continuous;
    if (text == "continuous-log") return ParamKind::ContinuousLog;
    if (text == "integer") return ParamKind::Integer;
    if (text == "categorical") return ParamKind::Categorical;
    fail("unknown parameter kind '" + text + "'");
}

void ParameterSpec::validate() const {
    if (name.empty()) fail("parameter with empty name");
    if (kind == ParamKind::Categorical) {
        if (choices.size() < 2) fail("parameter '" + name + "': categorical needs >= 2 choices");
        std::set<std::string> distinct(choices.begin(), choices.end());
        if (distinct.size() != choices.size())
            fail("parameter '" + name + "': duplicate choice labels");
        return;
    }
    if (!std::isfinite(lower) || !std::isfinite(upper))
        fail("parameter '" + name + "': non-finite bounds");
    if (!(lower < upper)) fail("parameter '" + name + "': requires lower < upper");
    if (kind == ParamKind::ContinuousLog && !(lower > 0.0))
        fail("parameter '" + name + "': continuous-log requires lower > 0");
    if (kind == ParamKind::Integer &&
        (std::floor(lower) != lower || std::floor(upper) != upper))
        fail("parameter '" + name + "': integer bounds must be whole numbers");
}

Configuration::Configuration(std::map<std::string, ParamValue> values)
    : id_(next_config_id()), values_(std::move(values)) {}

const ParamValue& Configuration::at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end())
        throw SpaceError("configuration has no parameter '" + name + "'");
    return it->second;
}

double Configuration::numeric(const std::string& name) const {
    const ParamValue& v = at(name);
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<std::int64_t>(v))
        return static_cast<double>(std::get<std::int64_t>(v));
    throw SpaceError("parameter '" + name + "' is categorical, not numeric");
}

ConfigSpace::ConfigSpace(std::vector<ParameterSpec> parameters)
    : parameters_(std::move(parameters)) {
    std::set<std::string> names;
    for (const auto& p : parameters_) {
        p.validate();
        if (!names.insert(p.name).second) fail("duplicate parameter name '" + p.name + "'");
    }
}

void ConfigSpace::validate_configuration(const Configuration& config) const {
    if (config.values().size() != parameters_.size())
        fail("configuration has " + std::to_string(config.values().size()) +
             " values, space has " + std::to_string(parameters_.size()));
    for (const auto& p : parameters_) {
        const ParamValue& v = config.at(p.name);
        switch (p.kind) {
            case ParamKind::Continuous:
            case ParamKind::ContinuousLog: {
                if (!std::holds_alternative<double>(v))
                    fail("parameter '" + p.name + "': expected a real value");
                double x = std::get<double>(v);
                if (!(x >= p.lower && x <= p.upper))
                    fail("parameter '" + p.name + "': value " + std::to_string(x) +
                         " outside [" + std::to_string(p.lower) + ", " +
                         std::to_string(p.upper) + "]");
                break;
            }
            case ParamKind::Integer: {
                if (!std::holds_alternative<std::int64_t>(v))
                    fail("parameter '" + p.name + "': expected an integer value");
                auto x = std::get<std::int64_t>(v);
                if (x < static_cast<std::int64_t>(p.lower) ||
                    x > static_cast<std::int64_t>(p.upper))
                    fail("parameter '" + p.name + "': value " + std::to_string(x) +
                         " outside bounds");
                break;
            }
            case ParamKind::Categorical: {
                if (!std::holds_alternative<std::string>(v))
                    fail("parameter '" + p.name + "': expected a choice label");
                const auto& label = std::get<std::string>(v);
                if (std::find(p.choices.begin(), p.choices.end(), label) == p.choices.end())
                    fail("parameter '" + p.name + "': unknown choice '" + label + "'");
                break;
            }
        }
    }
}

std::vector<Configuration> sample_uniform(const ConfigSpace& space, int count,
                                          std::mt19937_64& rng) {
    if (count < 1) throw SpaceError("sample_uniform: count must be >= 1");
    std::vector<Configuration> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::map<std::string, ParamValue> values;
        for (const auto& p : space.parameters()) {
            switch (p.kind) {
                case ParamKind::Continuous: {
                    std::uniform_real_distribution<double> dist(p.lower, p.upper);
                    values.emplace(p.name, dist(rng));
                    break;
                }
                case ParamKind::ContinuousLog: {
                    std::uniform_real_distribution<double> dist(std::log10(p.lower),
                                                                std::log10(p.upper));
                    double v = std::pow(10.0, dist(rng));
                    // exponentiation can overshoot the raw bounds by an ulp
                    values.emplace(p.name, std::clamp(v, p.lower, p.upper));
                    break;
                }
                case ParamKind::Integer: {
                    std::uniform_int_distribution<std::int64_t> dist(
                        static_cast<std::int64_t>(p.lower), static_cast<std::int64_t>(p.upper));
                    values.emplace(p.name, dist(rng));
                    break;
                }
                case ParamKind::Categorical: {
                    std::uniform_int_distribution<std::size_t> dist(0, p.choices.size() - 1);
                    values.emplace(p.name, p.choices[dist(rng)]);
                    break;
                }
            }
        }
        out.emplace_back(std::move(values));
    }
    return out;
}

std::vector<double> encode(const ConfigSpace& space, const Configuration& config) {
    std::vector<double> coords;
    coords.reserve(space.size());
    for (const auto& p : space.parameters()) {
        const ParamValue& v = config.at(p.name);
        switch (p.kind) {
            case ParamKind::Continuous: {
                double x = std::get<double>(v);
                if (!(x >= p.lower && x <= p.upper))
                    fail("encode: parameter '" + p.name + "' out of bounds");
                coords.push_back((x - p.lower) / (p.upper - p.lower));
                break;
            }
            case ParamKind::ContinuousLog: {
                double x = std::get<double>(v);
                if (!(x >= p.lower && x <= p.upper))
                    fail("encode: parameter '" + p.name + "' out of bounds");
                double lo = std::log10(p.lower), hi = std::log10(p.upper);
                coords.push_back((std::log10(x) - lo) / (hi - lo));
                break;
            }
            case ParamKind::Integer: {
                auto x = static_cast<double>(std::get<std::int64_t>(v));
                if (!(x >= p.lower && x <= p.upper))
                    fail("encode: parameter '" + p.name + "' out of bounds");
                coords.push_back((x - p.lower) / (p.upper - p.lower));
                break;
            }
            case ParamKind::Categorical: {
                const auto& label = std::get<std::string>(v);
                auto it = std::find(p.choices.begin(), p.choices.end(), label);
                if (it == p.choices.end())
                    fail("encode: parameter '" + p.name + "' has unknown choice '" + label + "'");
                auto index = static_cast<double>(it - p.choices.begin());
                coords.push_back(index / static_cast<double>(p.choices.size() - 1));
                break;
            }
        }
    }
    return coords;
}

Configuration decode(const ConfigSpace& space, std::span<const double> coords) {
    if (coords.size() != space.size()) fail("decode: coordinate count mismatch");
    std::map<std::string, ParamValue> values;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const ParameterSpec& p = space.parameter(i);
        double c = coords[i];
        switch (p.kind) {
            case ParamKind::Continuous:
                values.emplace(p.name, p.lower + c * (p.upper - p.lower));
                break;
            case ParamKind::ContinuousLog: {
                double lo = std::log10(p.lower), hi = std::log10(p.upper);
                values.emplace(p.name, std::pow(10.0, lo + c * (hi - lo)));
                break;
            }
            case ParamKind::Integer:
                values.emplace(p.name, static_cast<std::int64_t>(
                                           std::llround(p.lower + c * (p.upper - p.lower))));
                break;
            case ParamKind::Categorical: {
                auto index = static_cast<std::size_t>(
                    std::llround(c * static_cast<double>(p.choices.size() - 1)));
                values.emplace(p.name, p.choices.at(index));
                break;
            }
        }
    }
    return Configuration(std::move(values));
}

namespace {

ParameterSpec parameter_from_json(const nlohmann::json& entry, std::size_t index) {
    const std::string where = "parameters[" + std::to_string(index) + "]";
    if (!entry.is_object()) fail(where + ": expected an object");
    for (const auto& [key, value] : entry.items()) {
        (void)value;
        if (key != "name" && key != "kind" && key != "lower" && key != "upper" &&
            key != "choices")
            fail(where + ": unknown key '" + key + "'");
    }
    if (!entry.contains("name") || !entry["name"].is_string())
        fail(where + ".name: missing or not a string");
    if (!entry.contains("kind") || !entry["kind"].is_string())
        fail(where + ".kind: missing or not a string");

    ParameterSpec spec;
    spec.name = entry["name"].get<std::string>();
    spec.kind = parse_param_kind(entry["kind"].get<std::string>());

    if (spec.kind == ParamKind::Categorical) {
        if (entry.contains("lower") || entry.contains("upper"))
            fail(where + ": categorical takes 'choices', not bounds");
        if (!entry.contains("choices") || !entry["choices"].is_array())
            fail(where + ".choices: missing or not an array");
        for (const auto& c : entry["choices"]) {
            if (!c.is_string()) fail(where + ".choices: entries must be strings");
            spec.choices.push_back(c.get<std::string>());
        }
    } else {
        if (entry.contains("choices"))
            fail(where + ": numeric kinds take bounds, not 'choices'");
        if (!entry.contains("lower") || !entry["lower"].is_number())
            fail(where + ".lower: missing or not a number");
        if (!entry.contains("upper") || !entry["upper"].is_number())
            fail(where + ".upper: missing or not a number");
        spec.lower = entry["lower"].get<double>();
        spec.upper = entry["upper"].get<double>();
    }
    spec.validate();
    return spec;
}

}  // namespace

ConfigSpace space_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) fail("space definition: expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "parameters") fail("space definition: unknown key '" + key + "'");
    }
    if (!doc.contains("parameters") || !doc["parameters"].is_array())
        fail("space definition: 'parameters' array missing");
    std::vector<ParameterSpec> params;
    std::size_t i = 0;
    for (const auto& entry : doc["parameters"]) params.push_back(parameter_from_json(entry, i++));
    return ConfigSpace(std::move(params));
}

ConfigSpace load_space_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("space file '" + path + "': cannot open");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail("space file '" + path + "': " + e.what());
    }
    return space_from_json(doc);
}

nlohmann::json space_to_json(const ConfigSpace& space) {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : space.parameters()) {
        nlohmann::json entry;
        entry["name"] = p.name;
        entry["kind"] = to_string(p.kind);
        if (p.kind == ParamKind::Categorical) {
            entry["choices"] = p.choices;
        } else {
            entry["lower"] = p.lower;
            entry["upper"] = p.upper;
        }
        params.push_back(std::move(entry));
    }
    return nlohmann::json{{"parameters", std::move(params)}};
}

nlohmann::json config_values_to_json(const Configuration& config) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, value] : config.values()) {
        if (std::holds_alternative<double>(value)) {
            out[name] = std::get<double>(value);
        } else if (std::holds_alternative<std::int64_t>(value)) {
            out[name] = std::get<std::int64_t>(value);
        } else {
            out[name] = std::get<std::string>(value);
        }
    }
    return out;
}

Configuration config_from_json(const nlohmann::json& values) {
    if (!values.is_object()) fail("configuration values: expected a JSON object");
    std::map<std::string, ParamValue> out;
    for (const auto& [name, value] : values.items()) {
        if (value.is_number_float()) {
            out.emplace(name, value.get<double>());
        } else if (value.is_number_integer() || value.is_number_unsigned()) {
            out.emplace(name, value.get<std::int64_t>());
        } else if (value.is_string()) {
            out.emplace(name, value.get<std::string>());
        } else {
            fail("configuration values: parameter '" + name + "' has unsupported type");
        }
    }
    return Configuration(std::move(out));
}

}  // namespace hoist
