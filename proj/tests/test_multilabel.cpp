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

#include "wateruse/errors.hpp"
#include "wateruse/multilabel.hpp"

#include <doctest.h>

#include <memory>

using namespace wateruse;

namespace {

/// Predicts its last input feature as the probability and counts its calls.
class LastFeatureStub final : public BinaryClassifier {
public:
    LastFeatureStub(std::size_t width, std::shared_ptr<std::size_t> calls)
        : width_(width), calls_(std::move(calls)) {}
    std::string kind() const override { return "stub"; }
    void fit(MatrixView, std::span<const std::uint8_t>) override {}
    std::vector<double> predict_proba(MatrixView x) const override {
        ++*calls_;
        REQUIRE(x.cols() == width_);
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = x(r, x.cols() - 1);
        return out;
    }
    bool fitted() const override { return true; }
    std::size_t input_width() const override { return width_; }
    Json to_json() const override { return Json::object(); }

private:
    std::size_t width_;
    std::shared_ptr<std::size_t> calls_;
};

MetaModel stub_model(MetaMethod method, std::size_t window, std::shared_ptr<std::size_t> calls) {
    std::vector<std::unique_ptr<BinaryClassifier>> members;
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        const std::size_t width = method == MetaMethod::ClassifierChain ? window + k : window;
        members.push_back(std::make_unique<LastFeatureStub>(width, calls));
    }
    return MetaModel(method, kCanonicalOrder, window, 0.5, std::move(members));
}

BaseLearnerSpec spec_for(LearnerKind kind, std::uint64_t seed) {
    switch (kind) {
    case LearnerKind::Forest:
        return {kind, {{"n_estimators", 4}, {"max_depth", 5}, {"max_features", "sqrt"}}, seed};
    case LearnerKind::Gbt:
        return {kind, {{"n_estimators", 6}, {"max_depth", 3}, {"subsample", 0.8}}, seed};
    case LearnerKind::Mlp:
        return {kind, {{"hidden_layers", 1}, {"hidden_units", 8}, {"epochs", 2}, {"batch_size", 64}},
                seed};
    }
    return {};
}

} // namespace

TEST_CASE("labels all zero on train give all-zero predictions") {
    const auto toy = testutil::diagonal_toy(60, 1);
    const std::vector<LabelVector> labels(60);
    const auto factory = [](std::size_t) -> std::unique_ptr<BinaryClassifier> {
        FAIL("a constant label must not reach the factory");
        return nullptr;
    };
    for (auto method : {MetaMethod::BinaryRelevance, MetaMethod::ClassifierChain}) {
        const auto model = method == MetaMethod::BinaryRelevance ? fit_br(toy.x, labels, factory)
                                                                 : fit_cc(toy.x, labels, factory);
        const auto pred = model.predict(toy.x);
        for (const auto& v : pred.labels) CHECK_FALSE(v.any());
        for (std::size_t k = 0; k < kFixtureCount; ++k) CHECK(model.member(k).kind() == "prior");
    }
}

TEST_CASE("classifier chain member 0 equals binary relevance member 0") {
    const auto ds = testutil::small_dataset(2, 20, 3);
    for (auto kind : {LearnerKind::Forest, LearnerKind::Gbt, LearnerKind::Mlp}) {
        const auto spec = spec_for(kind, 99);
        const auto br = fit_br(ds, spec);
        const auto cc = fit_cc(ds, spec);
        const Matrix x = ds.design_matrix(ds.rows(Split::Test));
        CHECK(cc.member(0).to_json() == br.member(0).to_json());
        CHECK(cc.member(0).predict_proba(x) == br.member(0).predict_proba(x));

        const LabelOrder order{2, 0, 1, 3, 4};
        const auto cc2 = fit_cc(ds, spec, order);
        CHECK(cc2.member(0).predict_proba(x) == br.member(2).predict_proba(x));
    }
}

TEST_CASE("member input widths") {
    const auto ds = testutil::small_dataset(1, 12, 5);
    const auto spec = spec_for(LearnerKind::Gbt, 1);
    const auto cc = fit_cc(ds, spec);
    const auto br = fit_br(ds, spec);
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        CHECK(cc.member_input_width(k) == 12 + k);
        CHECK(cc.member(k).input_width() == 12 + k);
        CHECK(br.member(k).input_width() == 12u);
    }
}

TEST_CASE("chain stubs propagate the first prediction down the chain") {
    auto calls = std::make_shared<std::size_t>(0);
    const auto cc = stub_model(MetaMethod::ClassifierChain, 3, calls);
    Matrix x(4, 3);
    x(0, 2) = 1.0;
    x(1, 2) = 0.0;
    x(2, 2) = 0.7;
    x(3, 2) = 0.2;
    const auto pred = cc.predict(x);
    CHECK(*calls == kFixtureCount);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t k = 1; k < kFixtureCount; ++k) CHECK(pred.labels[r][k] == pred.labels[r][k - 1]);
    }
    CHECK(pred.labels[0].bits() == 0x1F);
    CHECK(pred.labels[1].bits() == 0);
    CHECK(pred.labels[2].bits() == 0x1F);
    CHECK(pred.probabilities(2, 0) == 0.7);
    CHECK(pred.probabilities(2, 1) == 1.0);
}

TEST_CASE("relevance stubs read only the window") {
    auto calls = std::make_shared<std::size_t>(0);
    const auto br = stub_model(MetaMethod::BinaryRelevance, 2, calls);
    Matrix x(3, 2);
    x(0, 1) = 0.9;
    x(1, 1) = 0.1;
    x(2, 1) = 0.5;
    const auto pred = br.predict(x);
    CHECK(*calls == kFixtureCount);
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        CHECK(pred.probabilities(0, k) == 0.9);
        CHECK(pred.probabilities(1, k) == 0.1);
    }
    CHECK(pred.labels[2].bits() == 0x1F);
}

TEST_CASE("bits are set at or above the threshold") {
    std::vector<std::unique_ptr<BinaryClassifier>> members;
    for (double p : {0.49, 0.51, 0.5, 0.0, 1.0}) members.push_back(std::make_unique<PriorClassifier>(p, 4));
    const MetaModel model(MetaMethod::BinaryRelevance, kCanonicalOrder, 4, 0.5, std::move(members));
    const auto pred = model.predict(Matrix(2, 4));
    for (const auto& v : pred.labels) {
        CHECK_FALSE(v[0]);
        CHECK(v[1]);
        CHECK(v[2]);
        CHECK_FALSE(v[3]);
        CHECK(v[4]);
    }
    CHECK_THROWS_AS(model.predict(Matrix(2, 5)), FormatError);
}

TEST_CASE("binary relevance is label-order independent") {
    const auto ds = testutil::small_dataset(1, 10, 8);
    const RowRange train = ds.rows(Split::Train);
    const Matrix x = ds.design_matrix(train);
    const std::vector<LabelVector> labels(ds.labels().begin() + train.begin,
                                          ds.labels().begin() + train.end);
    const LabelOrder perm{3, 0, 4, 1, 2};
    std::vector<LabelVector> permuted(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        for (std::size_t k = 0; k < kFixtureCount; ++k) permuted[r].set(k, labels[r][perm[k]]);
    }
    boosting::GbtParams params;
    params.n_estimators = 5;
    params.max_depth = 3;
    const LearnerFactory factory = [&](std::size_t) {
        return std::make_unique<boosting::BoostedModel>(params, 1);
    };
    const auto direct = fit_br(x, labels, factory).predict(x);
    const auto via_perm = fit_br(x, permuted, factory).predict(x);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        LabelVector back;
        for (std::size_t k = 0; k < kFixtureCount; ++k) back.set(perm[k], via_perm.labels[r][k]);
        REQUIRE(back == direct.labels[r]);
    }
}

TEST_CASE("meta model JSON round-trip reproduces predictions") {
    const auto ds = testutil::small_dataset(1, 15, 6);
    const auto dir = testutil::temp_dir("multilabel");
    for (auto kind : {LearnerKind::Forest, LearnerKind::Gbt, LearnerKind::Mlp}) {
        for (auto method : {MetaMethod::BinaryRelevance, MetaMethod::ClassifierChain}) {
            const auto model = fit_meta(ds, method, spec_for(kind, 4), LabelOrder{4, 3, 2, 1, 0}, 0.4);
            const auto path = dir / (to_string(kind) + to_string(method) + ".json");
            save_model(model, path);
            const auto back = load_model(path);
            CHECK(back.method() == method);
            CHECK(back.threshold() == 0.4);
            CHECK(back.label_order() == model.label_order());
            const RowRange test = ds.rows(Split::Test);
            const auto a = model.predict(ds, test);
            const auto b = back.predict(ds, test);
            CHECK(a.labels == b.labels);
            CHECK(a.probabilities == b.probabilities);
        }
    }
    auto j = fit_br(ds, spec_for(LearnerKind::Gbt, 1)).to_json();
    j["window"] = 16;
    CHECK_THROWS_AS(MetaModel::from_json(j), FormatError);
}

TEST_CASE("hyperparameter documents") {
    CHECK_NOTHROW(forest_params_from_json({{"n_estimators", 475}, {"criterion", "entropy"},
                                           {"max_depth", 9}, {"max_features", "sqrt"},
                                           {"class_weight", "balanced"}}));
    const auto g = gbt_params_from_json({{"learning_rate", 0.03}, {"max_depth", 6}, {"subsample", 0.2}});
    CHECK(g.learning_rate == 0.03);
    CHECK(g.n_estimators == boosting::GbtParams{}.n_estimators);
    const auto m = mlp_config_from_json({{"hidden_layers", 2}, {"hidden_units", 32},
                                         {"activation", "tanh"}, {"batch_size", 256}});
    CHECK(m.hidden == std::vector<std::size_t>{32, 32});
    CHECK_THROWS_AS(gbt_params_from_json({{"booster", "dart"}}), ConfigError);
    CHECK_THROWS_AS(gbt_params_from_json({{"eta", 0.1}}), ConfigError);
    CHECK_THROWS_AS(mlp_config_from_json({{"activation", "relu"}}), ConfigError);
    CHECK_THROWS_AS(forest_params_from_json({{"max_depth", "deep"}}), ConfigError);
    CHECK(gbt_params_from_json(to_json(g)).subsample == 0.2);
    CHECK(mlp_config_from_json(to_json(m)).hidden == m.hidden);
    CHECK_THROWS_AS((BaseLearnerSpec{LearnerKind::Forest, {{"n_estimators", 0}}, 0}.validate()),
                    ConfigError);
}

TEST_CASE("learner kinds, methods and label orders parse") {
    CHECK(learner_kind_from_string("rf") == LearnerKind::Forest);
    CHECK(meta_method_from_string("cc") == MetaMethod::ClassifierChain);
    CHECK_THROWS_AS(learner_kind_from_string("svm"), ConfigError);
    const auto order = label_order_from_names({"dishwasher", "toilet", "shower", "faucet", "clothes_washer"});
    CHECK(order == LabelOrder{4, 0, 1, 2, 3});
    CHECK_THROWS_AS(label_order_from_names({"toilet", "toilet", "shower", "faucet", "dishwasher"}),
                    ConfigError);
    CHECK_THROWS_AS(label_order_from_names({"toilet"}), ConfigError);
}

TEST_CASE("member seeds derive from the label index") {
    const BaseLearnerSpec spec = spec_for(LearnerKind::Forest, 10);
    const auto a = make_learner(spec, 0);
    const auto b = make_learner(spec, 1);
    const auto toy = testutil::xor_toy(80, 3);
    a->fit(toy.x, toy.y);
    b->fit(toy.x, toy.y);
    CHECK(a->to_json() != b->to_json());
    const auto again = make_learner(spec, 0);
    again->fit(toy.x, toy.y);
    CHECK(again->to_json() == a->to_json());
}
