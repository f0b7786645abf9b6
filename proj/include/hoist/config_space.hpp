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

#ifndef HOIST_CONFIG_SPACE_HPP
#define HOIST_CONFIG_SPACE_HPP

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace hoist {

// Raised for malformed space definitions (construction or file parsing).
// The message names the offending parameter or field.
struct SpaceError : std::runtime_error {
    explicit SpaceError(const std::string& what) : std::runtime_error(what) {}
};

enum class ParamKind { Continuous, ContinuousLog, Integer, Categorical };

std::string to_string(ParamKind kind);
ParamKind parse_param_kind(const std::string& text);  // throws SpaceError

struct ParameterSpec {
    std::string name;
    ParamKind kind = ParamKind::Continuous;
    double lower = 0.0;  // raw-value bounds; for ContinuousLog both must be > 0
    double upper = 1.0;
    std::vector<std::string> choices;  // Categorical only, >= 2 distinct labels

    bool numeric() const { return kind != ParamKind::Categorical; }
    void validate() const;  // throws SpaceError
};

using ParamValue = std::variant<double, std::int64_t, std::string>;

// A concrete assignment of every parameter in a space. The id is unique for
// the lifetime of the process and is never recycled.
class Configuration {
  public:
    Configuration() = default;
    explicit Configuration(std::map<std::string, ParamValue> values);

    std::uint64_t id() const { return id_; }
    const std::map<std::string, ParamValue>& values() const { return values_; }
    const ParamValue& at(const std::string& name) const;

    // Numeric view of a real or integer parameter; throws on categorical.
    double numeric(const std::string& name) const;

    bool same_values(const Configuration& other) const { return values_ == other.values_; }

  private:
    std::uint64_t id_ = 0;
    std::map<std::string, ParamValue> values_;
};

// Ordered parameter list. The ordering is fixed at construction and defines
// the coordinate layout produced by encode().
class ConfigSpace {
  public:
    ConfigSpace() = default;
    explicit ConfigSpace(std::vector<ParameterSpec> parameters);  // validates

    std::size_t size() const { return parameters_.size(); }
    const std::vector<ParameterSpec>& parameters() const { return parameters_; }
    const ParameterSpec& parameter(std::size_t index) const { return parameters_.at(index); }

    // Checks that config assigns every parameter a value of the right type
    // within bounds; throws SpaceError otherwise.
    void validate_configuration(const Configuration& config) const;

  private:
    std::vector<ParameterSpec> parameters_;
};

// Independent uniform draws per parameter: continuous on [lower, upper],
// continuous-log uniform in base-10 exponent, integer over the inclusive
// range, categorical over the choice list. Deterministic given the rng state.
std::vector<Configuration> sample_uniform(const ConfigSpace& space, int count,
                                          std::mt19937_64& rng);

// Maps a configuration to [0,1]^d in parameter order. Out-of-bounds values
// raise SpaceError naming the parameter.
std::vector<double> encode(const ConfigSpace& space, const Configuration& config);

// Inverse of encode (affine / index map); exact for integer and categorical.
Configuration decode(const ConfigSpace& space, std::span<const double> coords);

// JSON space definition: {"parameters": [{"name", "kind", "lower"/"upper" or
// "choices"}, ...]}. Unknown keys are rejected.
ConfigSpace space_from_json(const nlohmann::json& doc);
ConfigSpace load_space_file(const std::string& path);
nlohmann::json space_to_json(const ConfigSpace& space);

nlohmann::json config_values_to_json(const Configuration& config);
Configuration config_from_json(const nlohmann::json& values);

}  // namespace hoist

#endif  // HOIST_CONFIG_SPACE_HPP
