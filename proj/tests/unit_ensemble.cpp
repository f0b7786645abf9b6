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

#include <cmath>

#include "doctest.h"
#include "hoist/ensemble.hpp"
#include "hoist/rng.hpp"
#include "test_util.hpp"

using namespace hoist;

namespace {

// Store whose complete stage holds losses at fixed 1-d points.
EvaluationStore store_with_complete(double max_resource, const std::vector<double>& xs,
                                    const std::vector<double>& losses) {
    EvaluationStore store(max_resource, 3.0);
    const int complete = store.stage_count();
    for (std::size_t i = 0; i < xs.size(); ++i)
        store.record(test::make_config({{"x1", xs[i]}}), complete, max_resource, losses[i], 0);
    return store;
}

}  // namespace

TEST_CASE("min-max normalization") {
    CHECK(min_max_normalize({2, 4, 6}) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(min_max_normalize({5, 5, 5}) == std::vector<double>{0.0, 0.0, 0.0});
    const auto scaled = min_max_normalize({0.31, 0.12, 0.9});
    CHECK(scaled[0] == doctest::Approx((0.31 - 0.12) / 0.78).epsilon(1e-12));
    CHECK(scaled[1] == 0.0);
    CHECK(scaled[2] == 1.0);
    CHECK_THROWS_AS(min_max_normalize({}), EnsembleError);
}

TEST_CASE("pearson correlation") {
    CHECK(pearson_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson_correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson_correlation({1, 2, 3, 4}, {1, 3, 2, 4}) ==
          doctest::Approx(0.8).epsilon(1e-12));
    CHECK(pearson_correlation({1, 1, 1}, {1, 2, 3}) == 0.0);  // zero variance
    CHECK_THROWS_AS(pearson_correlation({1, 2}, {1, 2, 3}), EnsembleError);
    CHECK_THROWS_AS(pearson_correlation({1}, {2}), EnsembleError);
}

TEST_CASE("ensemble prediction combines member posteriors") {
    SUBCASE("degenerate weight selects one member") {
        EnsembleSurrogate ensemble;
        ensemble.members.push_back(test::stub_posterior_member(1, 0.2, 0.1));
        ensemble.members.push_back(test::stub_posterior_member(1, 0.9, 0.3));
        ensemble.weights = {{1.0, 0.0}, 0};
        const double point[] = {0.5};
        const auto pred = ensemble_predict_encoded(ensemble, point);
        const auto member = predict_encoded(*ensemble.members[0], point);
        CHECK(pred.mean == member.mean);
        CHECK(pred.variance == member.variance);
    }
    SUBCASE("independence formulas") {
        std::vector<std::optional<PosteriorPrediction>> members;
        members.push_back(PosteriorPrediction{0.2, 0.04});
        members.push_back(PosteriorPrediction{0.4, 0.08});
        const auto pred = combine_predictions(members, {{0.5, 0.5}, 0});
        CHECK(pred.mean == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(pred.variance == doctest::Approx(0.03).epsilon(1e-15));
    }
    SUBCASE("absent members renormalize the remaining mass") {
        std::vector<std::optional<PosteriorPrediction>> members;
        members.push_back(PosteriorPrediction{1.0, 0.0});
        members.push_back(std::nullopt);
        members.push_back(PosteriorPrediction{0.0, 0.0});
        const auto pred = combine_predictions(members, {{0.2, 0.3, 0.5}, 0});
        CHECK(pred.mean == doctest::Approx(0.2 / 0.7).epsilon(1e-12));
    }
    SUBCASE("no active member is an error") {
        std::vector<std::optional<PosteriorPrediction>> members(2);
        CHECK_THROWS_AS(combine_predictions(members, {{0.5, 0.5}, 0}), EnsembleError);
        EnsembleSurrogate ensemble;
        ensemble.members.resize(2);
        ensemble.weights = uniform_weights(2);
        CHECK_FALSE(ensemble.usable());
    }
    SUBCASE("all stored mass on inactive members falls back to uniform") {
        std::vector<std::optional<PosteriorPrediction>> members;
        members.push_back(std::nullopt);
        members.push_back(PosteriorPrediction{0.4, 0.02});
        members.push_back(PosteriorPrediction{0.8, 0.02});
        const auto pred = combine_predictions(members, {{1.0, 0.0, 0.0}, 0});
        CHECK(pred.mean == doctest::Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("weight learning follows the clipped amplified update") {
    const std::vector<double> xs{0.1, 0.3, 0.5, 0.7, 0.9};
    const std::vector<double> losses{0.4, 0.1, 0.3, 0.5, 0.2};
    const ConfigSpace space = test::unit_interval_space(1);

    SUBCASE("one perfect member, one anti-correlated member") {
        // K = 2 ladder (R = 3); the complete stage carries the data
        EvaluationStore store = store_with_complete(3.0, xs, losses);
        std::vector<std::optional<ForestModel>> members;
        members.push_back(test::stub_member(1, xs, {0.75, 0.0, 0.5, 1.0, 0.25}));   // = normalized Y
        members.push_back(test::stub_member(1, xs, {0.25, 1.0, 0.5, 0.0, 0.75}));  // inverted

        const auto result = learn_weights(store, members, uniform_weights(2), 0.5, space);
        CHECK(result.delta_raw[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(result.delta_raw[1] == doctest::Approx(-1.0).epsilon(1e-12));
        // clip removes the negative member; a lone survivor amplifies to 1
        CHECK(result.next.weights[0] == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(result.next.weights[1] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(result.next.iteration == 1);
    }

    SUBCASE("single member keeps weight one while its correlation is positive") {
        EvaluationStore store = store_with_complete(1.0, xs, losses);
        std::vector<std::optional<ForestModel>> members;
        members.push_back(test::stub_member(1, xs, {0.5, 0.2, 0.4, 0.6, 0.3}));
        const auto result = learn_weights(store, members, uniform_weights(1), 0.5, space);
        CHECK(result.next.weights[0] == 1.0);
    }

    SUBCASE("all members uninformative keeps the previous weights") {
        EvaluationStore store = store_with_complete(3.0, xs, losses);
        std::vector<std::optional<ForestModel>> members;
        members.push_back(test::stub_member(1, xs, {0.5, 0.5, 0.5, 0.5, 0.5}));  // constant
        members.push_back(test::stub_member(1, xs, {0.25, 1.0, 0.5, 0.0, 0.75}));  // negative
        const WeightVector c_prev{{0.7, 0.3}, 4};
        const auto result = learn_weights(store, members, c_prev, 0.5, space);
        CHECK(result.next.weights == c_prev.weights);
        CHECK(result.next.iteration == 5);
        CHECK(result.delta_raw[0] == 0.0);
    }

    SUBCASE("inactive members contribute zero correlation and decay") {
        EvaluationStore store = store_with_complete(9.0, xs, losses);  // K = 3
        std::vector<std::optional<ForestModel>> members(3);
        members[0] = test::stub_member(1, xs, {0.75, 0.0, 0.5, 1.0, 0.25});
        members[2] = test::stub_member(1, xs, {0.7, 0.1, 0.45, 0.95, 0.2});
        const auto result = learn_weights(store, members, uniform_weights(3), 0.5, space);
        CHECK(result.delta_raw[1] == 0.0);
        CHECK(result.next.weights[1] == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
    }

    SUBCASE("insufficient complete data is an error") {
        EvaluationStore store = store_with_complete(3.0, {0.5}, {0.4});
        std::vector<std::optional<ForestModel>> members(2);
        members[1] = test::stub_member(1, xs, losses);
        CHECK_THROWS_WITH_AS(learn_weights(store, members, uniform_weights(2), 0.5, space),
                             doctest::Contains("insufficient complete data"), EnsembleError);
    }
}

TEST_CASE("learned weights stay a distribution") {
    const ConfigSpace space = test::unit_interval_space(1);
    auto rng = make_rng(17);
    const std::vector<double> xs{0.05, 0.2, 0.4, 0.55, 0.8, 0.95};
    std::vector<double> losses;
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (std::size_t i = 0; i < xs.size(); ++i) losses.push_back(dist(rng));

    EvaluationStore store = store_with_complete(9.0, xs, losses);
    WeightVector weights = uniform_weights(3);
    for (int round = 0; round < 6; ++round) {
        std::vector<std::optional<ForestModel>> members(3);
        for (int m = 0; m < 3; ++m) {
            std::vector<double> noisy;
            for (double v : losses) noisy.push_back(v + dist(rng) * (m + 1) * 0.4);
            members[static_cast<std::size_t>(m)] = test::stub_member(1, xs, noisy);
        }
        weights = learn_weights(store, members, weights, 0.5, space).next;
        double sum = 0.0;
        for (double c : weights.weights) {
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            sum += c;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("affine loss rescaling leaves the correlations unchanged") {
    const ConfigSpace space = test::unit_interval_space(1);
    auto rng = make_rng(23);

    // two-stage run: stage 1 with its own data, stage 2 complete
    auto build_store = [&](double a1, double b1, double a2, double b2) {
        EvaluationStore store(3.0, 3.0);
        auto low_rng = make_rng(404);
        for (const auto& config : sample_uniform(space, 12, low_rng)) {
            const double x = config.numeric("x1");
            store.record(config, 1, 1.0, a1 * (x * x + 0.1) + b1, 0);
        }
        auto high_rng = make_rng(405);
        for (const auto& config : sample_uniform(space, 6, high_rng)) {
            const double x = config.numeric("x1");
            store.record(config, 2, 3.0, a2 * ((x - 0.4) * (x - 0.4)) + b2, 0);
        }
        return store;
    };

    auto learn_from = [&](const EvaluationStore& store) {
        ForestParams params;
        params.seed = 99;
        params.bootstrap = false;
        std::vector<std::optional<ForestModel>> members;
        members.push_back(fit_forest(store.stage(1), space, params));
        members.push_back(fit_forest(store.stage(2), space, params));
        return learn_weights(store, members, uniform_weights(2), 0.5, space);
    };

    const auto base = learn_from(build_store(1.0, 0.0, 1.0, 0.0));
    const auto scaled = learn_from(build_store(12.5, -3.0, 0.25, 7.0));
    REQUIRE(base.delta_raw.size() == scaled.delta_raw.size());
    for (std::size_t i = 0; i < base.delta_raw.size(); ++i)
        CHECK(scaled.delta_raw[i] == doctest::Approx(base.delta_raw[i]).epsilon(1e-9));
    (void)rng;
}
