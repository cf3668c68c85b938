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

#include "oracles/finite_difference.hpp"
#include "test_util.hpp"

#include "wateruse/errors.hpp"
#include "wateruse/neural.hpp"

#include <doctest.h>

#include <cmath>

using namespace wateruse;
using namespace wateruse::neural;

namespace {

struct Batch {
    Matrix x;
    std::vector<std::uint8_t> y;
};

Batch random_batch(std::size_t n, std::size_t width, Rng& rng) {
    Batch b{Matrix(n, width), std::vector<std::uint8_t>(n)};
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < width; ++c) b.x(r, c) = normal(rng);
        b.y[r] = uniform01(rng) < 0.5;
    }
    return b;
}

} // namespace

TEST_CASE("init shapes, scale and determinism") {
    const auto p = init_mlp({4, 3, 1}, 1);
    REQUIRE(p.layers.size() == 2u);
    CHECK(p.layers[0].weights.rows() == 3u);
    CHECK(p.layers[0].weights.cols() == 4u);
    CHECK(p.layers[1].weights.rows() == 1u);
    CHECK(p.layers[1].weights.cols() == 3u);
    CHECK(p.input_width() == 4u);
    CHECK(init_mlp({4, 3, 1}, 1).layers[0].weights == p.layers[0].weights);
    CHECK_FALSE(init_mlp({4, 3, 1}, 2).layers[0].weights == p.layers[0].weights);

    const auto wide = init_mlp({100, 8, 1}, 5);
    for (double w : wide.layers[0].weights.data()) CHECK(std::abs(w) <= 0.1);
    for (double b : wide.layers[0].bias) CHECK(b == 0.0);
    CHECK_THROWS_AS(init_mlp({4, 0, 1}, 1), ConfigError);
    CHECK_THROWS_AS(init_mlp({4, 1}, 1), ConfigError);
}

TEST_CASE("zero parameters give probability one half") {
    auto p = init_mlp({3, 5, 4, 1}, 1);
    for (auto& layer : p.layers) std::fill(layer.weights.data().begin(), layer.weights.data().end(), 0.0);
    const std::vector<double> x{3.0, -7.0, 0.25};
    CHECK(forward(p, x) == 0.5);
}

TEST_CASE("analytic gradient matches central differences") {
    Rng rng = make_rng(77, {});
    double worst = 0.0;
    for (int trial = 0; trial < 24; ++trial) {
        std::uniform_int_distribution<std::size_t> width(1, 6), depth(1, 3), rows(1, 8);
        std::vector<std::size_t> sizes{width(rng)};
        const std::size_t hidden = depth(rng);
        for (std::size_t h = 0; h < hidden; ++h) sizes.push_back(width(rng));
        sizes.push_back(1);
        const auto params = init_mlp(sizes, static_cast<std::uint64_t>(trial));
        const auto batch = random_batch(rows(rng), sizes.front(), rng);
        const double l2 = trial % 3 == 0 ? 0.0 : 0.05 * uniform01(rng);
        const auto analytic = backward(params, batch.x, batch.y, l2);
        const auto numeric = oracle::numeric_gradient(params, batch.x, batch.y, l2, 1e-4);
        worst = std::max(worst, oracle::max_relative_error(analytic, numeric, 1e-6));
    }
    MESSAGE("max relative gradient error " << worst);
    CHECK(worst <= 1e-5);
}

TEST_CASE("one small SGD step lowers a single sample's loss") {
    Rng rng = make_rng(3, {});
    const auto batch = random_batch(1, 5, rng);
    MlpConfig config;
    config.hidden = {4};
    config.optimizer = Optimizer::Sgd;
    config.learning_rate = 1e-3;
    config.batch_size = 1;
    config.epochs = 1;
    config.l2 = 0.0;
    const auto before = init_mlp({5, 4, 1}, 8);
    const auto after = train(before, batch.x, batch.y, config, 1);
    CHECK(loss(after, batch.x, batch.y, 0.0) < loss(before, batch.x, batch.y, 0.0));
}

TEST_CASE("training is deterministic and learns a separable set") {
    const auto toy = testutil::diagonal_toy(300, 4);
    MlpConfig config;
    config.hidden = {8};
    config.epochs = 60;
    config.batch_size = 32;
    config.learning_rate = 0.05;
    MlpClassifier a(config, 5), b(config, 5);
    a.fit(toy.x, toy.y);
    b.fit(toy.x, toy.y);
    CHECK(a.predict_proba(toy.x) == b.predict_proba(toy.x));
    const auto p = a.predict_proba(toy.x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hits += (p[i] >= 0.5) == (toy.y[i] == 1);
    CHECK(double(hits) / double(p.size()) >= 0.95);
}

TEST_CASE("non-finite loss aborts with the epoch and batch") {
    const auto toy = testutil::diagonal_toy(64, 2);
    MlpConfig config;
    config.hidden = {4};
    config.optimizer = Optimizer::Sgd;
    config.learning_rate = 1e300;
    config.batch_size = 16;
    config.epochs = 3;
    config.standardize = false;
    MlpClassifier model(config, 1);
    try {
        model.fit(toy.x, toy.y);
        FAIL("expected a training failure");
    } catch (const TrainingError& e) {
        const std::string what = e.what();
        CHECK(what.find("epoch") != std::string::npos);
        CHECK(what.find("batch") != std::string::npos);
    }
}

TEST_CASE("config validation") {
    MlpConfig config;
    config.hidden = {32, 32};
    config.batch_size = 256;
    CHECK_NOTHROW(validate(config));
    config.hidden = {};
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.hidden = {8};
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.learning_rate = 0.01;
    config.batch_size = 0;
    CHECK_THROWS_AS(validate(config), ConfigError);
}

TEST_CASE("MLP JSON round-trip is bit-exact") {
    const auto toy = testutil::xor_toy(80, 2);
    MlpConfig config;
    config.hidden = {6, 3};
    config.epochs = 3;
    config.batch_size = 16;
    MlpClassifier model(config, 4);
    model.fit(toy.x, toy.y);
    const auto back = MlpClassifier::from_json(Json::parse(model.to_json().dump()));
    CHECK(back.predict_proba(toy.x) == model.predict_proba(toy.x));
    CHECK(back.to_json() == model.to_json());
    CHECK(back.standardizer().mean == model.standardizer().mean);
    CHECK_THROWS_AS(back.predict_proba(Matrix(1, 3)), FormatError);
}
