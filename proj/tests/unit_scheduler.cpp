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

#include <chrono>
#include <cmath>
#include <set>
#include <thread>

#include "doctest.h"
#include "hoist/rng.hpp"
#include "hoist/scheduler.hpp"
#include "test_util.hpp"

using namespace hoist;

namespace {

// Objective keyed on an integer index parameter; loss equals the index.
class IndexObjective : public Objective {
  public:
    double evaluate(const Configuration& config, double, double) const override {
        return config.numeric("i");
    }
    std::string name() const override { return "index"; }
};

// Loss equals the index; evaluation sleeps longer for smaller indices so
// completion order is scrambled under concurrency.
class SlowIndexObjective : public Objective {
  public:
    double evaluate(const Configuration& config, double, double) const override {
        const auto index = static_cast<int>(config.numeric("i"));
        std::this_thread::sleep_for(std::chrono::milliseconds(10 - index));
        return index;
    }
    std::string name() const override { return "slow-index"; }
};

// Fails on every index in the given set.
class FailingObjective : public Objective {
  public:
    explicit FailingObjective(std::set<int> failing) : failing_(std::move(failing)) {}
    double evaluate(const Configuration& config, double, double) const override {
        const auto index = static_cast<int>(config.numeric("i"));
        if (failing_.count(index)) throw EvaluationFailure("index " + std::to_string(index));
        return index;
    }
    std::string name() const override { return "failing"; }

  private:
    std::set<int> failing_;
};

ConfigSpace index_space() { return ConfigSpace({{"i", ParamKind::Integer, 0, 1000, {}}}); }

ConfigSampler indexed_sampler() {
    return [](int count) {
        std::vector<Configuration> configs;
        for (int i = 0; i < count; ++i)
            configs.push_back(test::make_config({{"i", static_cast<std::int64_t>(i)}}));
        return configs;
    };
}

}  // namespace

TEST_CASE("bracket planning reproduces the standard schedule") {
    const auto plans = plan_brackets(9.0, 3.0);
    REQUIRE(plans.size() == 3);

    SUBCASE("widest bracket") {
        const BracketPlan& plan = plans[0];
        CHECK(plan.bracket_index == 2);
        REQUIRE(plan.stages.size() == 3);
        CHECK(plan.stages[0].count == 9);
        CHECK(plan.stages[0].resource == 1.0);
        CHECK(plan.stages[1].count == 3);
        CHECK(plan.stages[1].resource == 3.0);
        CHECK(plan.stages[2].count == 1);
        CHECK(plan.stages[2].resource == 9.0);
        CHECK(plan.total_resource() == 27.0);
        CHECK(plan.stages[0].global_stage == 1);
        CHECK(plan.stages[2].global_stage == 3);
    }
    SUBCASE("middle and narrow brackets") {
        CHECK(plans[1].stages.size() == 2);
        CHECK(plans[1].stages[0].count == 5);  // ceil((3/2) * 3)
        CHECK(plans[1].stages[0].resource == 3.0);
        CHECK(plans[1].stages[1].count == 1);
        CHECK(plans[1].stages[0].global_stage == 2);

        CHECK(plans[2].stages.size() == 1);
        CHECK(plans[2].stages[0].count == 3);
        CHECK(plans[2].stages[0].resource == 9.0);
        CHECK(plans[2].stages[0].global_stage == 3);
    }
    SUBCASE("R = 27 sweep") {
        const auto wide = plan_brackets(27.0, 3.0);
        REQUIRE(wide.size() == 4);
        CHECK(wide[0].stages[0].count == 27);
        CHECK(wide[1].stages[0].count == 12);  // ceil((4/3) * 9)
        CHECK(wide[2].stages[0].count == 6);
        CHECK(wide[3].stages[0].count == 4);
    }
    SUBCASE("invalid budget") { CHECK_THROWS(plan_brackets(0.9, 3.0)); }
}

TEST_CASE("bracket invariants hold for fractional reduction factors") {
    for (double eta : {2.0, 2.5, 3.0, 4.0}) {
        for (double R : {4.0, 10.0, 27.0, 50.0}) {
            const auto plans = plan_brackets(R, eta);
            for (const auto& plan : plans) {
                REQUIRE(plan.stages.size() == static_cast<std::size_t>(plan.bracket_index) + 1);
                CHECK(plan.stages.back().resource == R);
                for (std::size_t i = 0; i + 1 < plan.stages.size(); ++i) {
                    const int expected =
                        std::max(1, static_cast<int>(std::floor(plan.stages[i].count / eta)));
                    CHECK(plan.stages[i + 1].count == expected);
                    CHECK(plan.stages[i + 1].resource > plan.stages[i].resource);
                }
            }
        }
    }
}

TEST_CASE("promotion keeps the best by loss with stable ties") {
    std::vector<std::pair<Configuration, double>> ranked;
    ranked.emplace_back(test::make_config({{"i", std::int64_t{0}}}), 0.9);
    ranked.emplace_back(test::make_config({{"i", std::int64_t{1}}}), 0.1);
    ranked.emplace_back(test::make_config({{"i", std::int64_t{2}}}), 0.5);

    SUBCASE("keep one") {
        const auto kept = promote(ranked, 1);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].numeric("i") == 1.0);
    }
    SUBCASE("ties fall to submission order") {
        ranked[0].second = 0.2;
        ranked[1].second = 0.2;
        ranked[2].second = 0.3;
        const auto kept = promote(ranked, 2);
        CHECK(kept[0].numeric("i") == 0.0);
        CHECK(kept[1].numeric("i") == 1.0);
    }
    SUBCASE("keep everything") {
        const auto kept = promote(ranked, 3);
        REQUIRE(kept.size() == 3);
        CHECK(kept[0].numeric("i") == 1.0);  // loss order
        CHECK(kept[1].numeric("i") == 2.0);
        CHECK(kept[2].numeric("i") == 0.0);
    }
    SUBCASE("keep out of range") { CHECK_THROWS(promote(ranked, 4)); }
}

TEST_CASE("successive halving follows the monotone-objective trace") {
    const auto plans = plan_brackets(9.0, 3.0);
    EvaluationStore store(9.0, 3.0);
    IndexObjective objective;
    run_bracket(plans[0], indexed_sampler(), objective, store, 0);

    REQUIRE(store.stage(1).size() == 9);
    REQUIRE(store.stage(2).size() == 3);
    REQUIRE(store.stage(3).size() == 1);
    for (int i = 0; i < 3; ++i)
        CHECK(store.stage(2).records[static_cast<std::size_t>(i)].config.numeric("i") == i);
    CHECK(store.stage(3).records[0].config.numeric("i") == 0.0);

    SUBCASE("resource ledger") {
        CHECK(store.total_resource() == plans[0].total_resource());
        CHECK(store.total_resource() == 27.0);
    }
    SUBCASE("promoted configurations appear at the larger resource, others do not") {
        std::vector<double> indices;
        for (const auto& rec : store.stage(2).records) indices.push_back(rec.config.numeric("i"));
        CHECK(indices == std::vector<double>{0.0, 1.0, 2.0});
    }
}

TEST_CASE("equal losses promote the earliest submissions") {
    const auto plans = plan_brackets(9.0, 3.0);
    EvaluationStore store(9.0, 3.0);
    class ConstantObjective : public Objective {
      public:
        double evaluate(const Configuration&, double, double) const override { return 0.5; }
        std::string name() const override { return "constant"; }
    } objective;
    run_bracket(plans[0], indexed_sampler(), objective, store, 0);
    REQUIRE(store.stage(2).size() == 3);
    for (int i = 0; i < 3; ++i)
        CHECK(store.stage(2).records[static_cast<std::size_t>(i)].config.numeric("i") == i);
}

TEST_CASE("single-stage brackets write straight to the complete stage") {
    const auto plans = plan_brackets(9.0, 3.0);
    EvaluationStore store(9.0, 3.0);
    IndexObjective objective;
    run_bracket(plans[2], indexed_sampler(), objective, store, 7);
    CHECK(store.stage(3).size() == 3);
    CHECK(store.stage(1).size() == 0);
    CHECK(store.stage(3).records[0].bracket_id == 7);
}

TEST_CASE("failed evaluations are recorded but never promoted") {
    const auto plans = plan_brackets(9.0, 3.0);
    EvaluationStore store(9.0, 3.0);
    FailingObjective objective({1});  // index 1 would otherwise be promoted
    const auto outcome = run_bracket(plans[0], indexed_sampler(), objective, store, 0);
    CHECK(outcome.evaluations == 13);  // 9 + 3 + 1
    CHECK(outcome.failures == 1);
    REQUIRE(store.failed_records().size() == 1);
    CHECK(store.failed_records()[0].config.numeric("i") == 1.0);
    CHECK(store.failed_records()[0].failed);
    // survivors skip the failure: 0, 2, 3 advance
    std::vector<double> promoted;
    for (const auto& rec : store.stage(2).records) promoted.push_back(rec.config.numeric("i"));
    CHECK(promoted == std::vector<double>{0.0, 2.0, 3.0});
}

TEST_CASE("worker pools do not change the recorded order") {
    const auto plans = plan_brackets(9.0, 3.0);
    SlowIndexObjective objective;

    EvaluationStore sequential(9.0, 3.0);
    run_bracket(plans[0], indexed_sampler(), objective, sequential, 0, 1);
    EvaluationStore threaded(9.0, 3.0);
    run_bracket(plans[0], indexed_sampler(), objective, threaded, 0, 4);

    REQUIRE(sequential.chronology().size() == threaded.chronology().size());
    for (std::size_t i = 0; i < sequential.chronology().size(); ++i) {
        CHECK(sequential.chronology()[i].seq == threaded.chronology()[i].seq);
        CHECK(sequential.chronology()[i].loss == threaded.chronology()[i].loss);
        CHECK(sequential.chronology()[i].stage_index == threaded.chronology()[i].stage_index);
    }
}
