// Copyright 2026 The wateruse Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "test_util.hpp"

#include "wateruse/boosting.hpp"
#include "wateruse/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace wateruse;
using namespace wateruse::boosting;

namespace {

double hand_sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

double accuracy(const std::vector<double>& p, const std::vector<std::uint8_t>& y) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += (p[i] >= 0.5) == (y[i] == 1);
    return double(hits) / double(y.size());
}

void collect_features(const RegressionTree& t, std::set<int>& out) {
    for (const auto& n : t.nodes()) {
        if (!n.is_leaf()) out.insert(n.feature);
    }
}

} // namespace

TEST_CASE("scalar building blocks") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-1.0, 1.0) == 0.0);
    CHECK(leaf_value(4.0, 3.0, 1.0, 2.0) == -3.0 / 5.0);
    CHECK(leaf_value(0.7, 10.0, 0.7, 1.0) == 0.0);
    const double gl = 1.5, hl = 2.0, gr = -0.5, hr = 3.0, lambda = 0.3;
    const double direct = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                                 (gl + gr) * (gl + gr) / (hl + hr + lambda));
    CHECK(split_gain(gl, hl, gr, hr, lambda) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(1000.0) < 1.0);
    CHECK(sigmoid(-1000.0) > 0.0);
}

TEST_CASE("all-zero labels grow no trees") {
    const auto toy = testutil::diagonal_toy(50, 1);
    const std::vector<std::uint8_t> zeros(50, 0);
    GbtParams params;
    params.n_estimators = 10;
    const auto model = fit_gbt(toy.x, zeros, params, 1);
    CHECK(model.trees().empty());
    CHECK(model.base_margin() == -kBaseMarginClamp);
    for (double p : model.predict_proba(toy.x)) CHECK(p < 0.5);
}

TEST_CASE("training loss never rises and the toy set is learned") {
    const auto toy = testutil::diagonal_toy(200, 2);
    GbtParams params;
    params.n_estimators = 100;
    params.max_depth = 3;
    params.learning_rate = 0.1;
    const auto model = fit_gbt(toy.x, toy.y, params, 4);
    const auto& loss = model.training_loss();
    REQUIRE(loss.size() == 101u);
    for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] <= loss[i - 1]);
    CHECK(accuracy(model.predict_proba(toy.x), toy.y) >= 0.97);
}

TEST_CASE("stump leaves equal the closed form on frozen gradients") {
    const auto toy = testutil::diagonal_toy(200, 3);
    GbtParams params;
    params.n_estimators = 1;
    params.max_depth = 1;
    params.alpha = 0.4;
    params.lambda = 1.7;
    const auto model = fit_gbt(toy.x, toy.y, params, 1);
    REQUIRE(model.trees().size() == 1u);
    const auto& nodes = model.trees()[0].nodes();
    REQUIRE(nodes.size() == 3u);

    double rate = 0.0;
    for (auto v : toy.y) rate += v;
    rate /= 200.0;
    const double p0 = hand_sigmoid(std::log(rate / (1.0 - rate)));
    double g[2] = {0, 0}, h[2] = {0, 0};
    for (std::size_t i = 0; i < 200; ++i) {
        const int side = toy.x(i, static_cast<std::size_t>(nodes[0].feature)) <= nodes[0].threshold ? 0 : 1;
        g[side] += p0 - toy.y[i];
        h[side] += p0 * (1.0 - p0);
    }
    for (int side = 0; side < 2; ++side) {
        const double G = g[side];
        const double shrunk = G > 0 ? std::max(G - 0.4, 0.0) : std::min(G + 0.4, 0.0);
        const double expected = -shrunk / (h[side] + 1.7);
        CHECK(std::abs(nodes[static_cast<std::size_t>(nodes[0].left + side)].value - expected) <= 1e-12);
    }
}

TEST_CASE("a large L1 penalty zeroes every leaf") {
    const auto toy = testutil::diagonal_toy(100, 5);
    GbtParams params;
    params.n_estimators = 5;
    params.max_depth = 2;
    params.alpha = 1e6;
    const auto model = fit_gbt(toy.x, toy.y, params, 1);
    for (const auto& t : model.trees()) {
        for (const auto& n : t.nodes()) {
            if (n.is_leaf()) CHECK(n.value == 0.0);
        }
    }
    for (double m : model.predict_margin(toy.x)) CHECK(m == model.base_margin());
}

TEST_CASE("hand-built models predict by the margin formula") {
    GbtParams params;
    params.learning_rate = 0.5;
    CHECK(BoostedModel::from_parts(params, 0.0, {}, 2).predict_proba(Matrix(3, 2)) ==
          std::vector<double>(3, 0.5));

    std::vector<RegressionNode> nodes(3);
    nodes[0] = {0, 0.5, 1, 2, 0.0};
    nodes[1].value = -1.0;
    nodes[2].value = 1.0;
    const double base = 0.3;
    const auto model = BoostedModel::from_parts(params, base, {RegressionTree(nodes)}, 1);
    Matrix x(2, 1);
    x(0, 0) = 0.0;
    x(1, 0) = 1.0;
    const auto p = model.predict_proba(x);
    CHECK(p[0] == doctest::Approx(hand_sigmoid(base - 0.5)).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(hand_sigmoid(base + 0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(model.predict_proba(Matrix(1, 2)), FormatError);
}

TEST_CASE("column sampling by tree restricts features") {
    Matrix x(200, 8);
    std::vector<std::uint8_t> y(200);
    Rng rng = make_rng(5, {});
    for (std::size_t r = 0; r < 200; ++r) {
        for (std::size_t c = 0; c < 8; ++c) x(r, c) = uniform01(rng);
        y[r] = x(r, 0) + x(r, 3) + x(r, 6) > 1.5;
    }
    GbtParams params;
    params.n_estimators = 12;
    params.max_depth = 3;
    params.colsample_bytree = 0.25;
    const auto model = fit_gbt(x, y, params, 9);
    for (const auto& t : model.trees()) {
        std::set<int> used;
        collect_features(t, used);
        CHECK(used.size() <= 2u);
    }
}

TEST_CASE("subsampled fits are deterministic per seed") {
    const auto toy = testutil::xor_toy(150, 7);
    GbtParams params;
    params.n_estimators = 10;
    params.subsample = 0.5;
    params.colsample_bynode = 0.5;
    const auto a = fit_gbt(toy.x, toy.y, params, 3);
    const auto b = fit_gbt(toy.x, toy.y, params, 3);
    const auto c = fit_gbt(toy.x, toy.y, params, 4);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_json() != c.to_json());
    for (double p : a.predict_proba(toy.x)) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
}

TEST_CASE("hyperparameter validation") {
    GbtParams params;
    params.learning_rate = 0.03;
    params.max_depth = 6;
    params.subsample = 0.2;
    CHECK_NOTHROW(validate(params));
    params.subsample = 0.0;
    CHECK_THROWS_AS(validate(params), ConfigError);
    params.subsample = 1.0;
    params.colsample_bylevel = 1.5;
    CHECK_THROWS_AS(validate(params), ConfigError);
    params.colsample_bylevel = 1.0;
    params.learning_rate = 0.0;
    CHECK_THROWS_AS(validate(params), ConfigError);
    params.learning_rate = 0.1;
    params.lambda = -1.0;
    CHECK_THROWS_AS(validate(params), ConfigError);
}

TEST_CASE("boosted model JSON round-trip is bit-exact") {
    const auto toy = testutil::xor_toy(120, 1);
    GbtParams params;
    params.n_estimators = 8;
    params.subsample = 0.8;
    params.alpha = 0.01;
    const auto model = fit_gbt(toy.x, toy.y, params, 2);
    const auto back = BoostedModel::from_json(Json::parse(model.to_json().dump()));
    CHECK(back.predict_proba(toy.x) == model.predict_proba(toy.x));
    CHECK(back.to_json() == model.to_json());
    BoostedModel unfitted(params, 1);
    CHECK_THROWS_AS(unfitted.predict_proba(toy.x), TrainingError);
}
