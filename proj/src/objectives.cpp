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

#include "hoist/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace hoist {

namespace {

constexpr double kDeceptiveThreshold = 0.5;

double bowl(double x1, double x2) {
    return (x1 - 0.3) * (x1 - 0.3) + (x2 - 0.7) * (x2 - 0.7);
}

void check_range(const std::string& name, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi))
        throw std::invalid_argument("objective: parameter '" + name + "' value " +
                                    std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
}

struct CurveParams {
    double x1, x2, a, b;
};

CurveParams curve_params(const Configuration& config) {
    CurveParams p{config.numeric("x1"), config.numeric("x2"), config.numeric("a"),
                  config.numeric("b")};
    check_range("x1", p.x1, 0.0, 1.0);
    check_range("x2", p.x2, 0.0, 1.0);
    check_range("a", p.a, 0.1, 1.0);
    check_range("b", p.b, 0.3, 1.0);
    return p;
}

}  // namespace

double eval_curve_bench(const Configuration& config, double resource, double /*max_resource*/) {
    if (resource < 1.0) throw std::invalid_argument("curve-bench: resource must be >= 1");
    const CurveParams p = curve_params(config);
    return bowl(p.x1, p.x2) + p.a * std::pow(resource, -p.b);
}

double eval_deceptive_bench(const Configuration& config, double resource, double max_resource) {
    if (resource < 1.0) throw std::invalid_argument("deceptive-bench: resource must be >= 1");
    const CurveParams p = curve_params(config);
    const double asymptote = bowl(p.x1, p.x2);
    if (resource / max_resource < kDeceptiveThreshold) return 1.0 - asymptote;
    return asymptote;
}

double eval_distorted_branin(const Configuration& config, double resource, double max_resource) {
    const double x1 = config.numeric("x1");
    const double x2 = config.numeric("x2");
    check_range("x1", x1, -5.0, 10.0);
    check_range("x2", x2, 0.0, 15.0);

    const double pi = std::acos(-1.0);
    const double b = 5.1 / (4.0 * pi * pi);
    const double c = 5.0 / pi;
    const double t = 1.0 / (8.0 * pi);
    const double inner = x2 - b * x1 * x1 + c * x1 - 6.0;
    const double branin = inner * inner + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;

    const double distortion =
        (1.0 - resource / max_resource) * 10.0 * std::abs(std::sin(3.0 * pi * (x1 + 5.0) / 15.0));
    return branin + distortion;
}

ConfigSpace curve_bench_space() {
    return ConfigSpace({{"x1", ParamKind::Continuous, 0.0, 1.0, {}},
                        {"x2", ParamKind::Continuous, 0.0, 1.0, {}},
                        {"a", ParamKind::Continuous, 0.1, 1.0, {}},
                        {"b", ParamKind::Continuous, 0.3, 1.0, {}}});
}

ConfigSpace distorted_branin_space() {
    return ConfigSpace({{"x1", ParamKind::Continuous, -5.0, 10.0, {}},
                        {"x2", ParamKind::Continuous, 0.0, 15.0, {}}});
}

namespace {

class CurveBench : public Objective {
  public:
    double evaluate(const Configuration& config, double r, double R) const override {
        return eval_curve_bench(config, r, R);
    }
    std::string name() const override { return "curve-bench"; }
};

class DeceptiveBench : public Objective {
  public:
    double evaluate(const Configuration& config, double r, double R) const override {
        return eval_deceptive_bench(config, r, R);
    }
    std::string name() const override { return "deceptive-bench"; }
};

class DistortedBranin : public Objective {
  public:
    double evaluate(const Configuration& config, double r, double R) const override {
        return eval_distorted_branin(config, r, R);
    }
    std::string name() const override { return "distorted-branin"; }
};

}  // namespace

std::unique_ptr<Objective> make_builtin_objective(const std::string& name) {
    if (name == "curve-bench") return std::make_unique<CurveBench>();
    if (name == "deceptive-bench") return std::make_unique<DeceptiveBench>();
    if (name == "distorted-branin") return std::make_unique<DistortedBranin>();
    return nullptr;
}

ConfigSpace builtin_objective_space(const std::string& name) {
    if (name == "curve-bench" || name == "deceptive-bench") return curve_bench_space();
    if (name == "distorted-branin") return distorted_branin_space();
    throw std::invalid_argument("unknown builtin objective '" + name + "'");
}

}  // namespace hoist
