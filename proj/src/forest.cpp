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

#include "cart.hpp"
#include "wateruse/rng.hpp"

namespace wateruse::trees {

void validate(const ForestParams& params) {
    if (params.n_estimators < 1) {
        throw ConfigError("n_estimators must be >= 1");
    }
    if (params.tree.max_depth < 0) {
        throw ConfigError("max_depth must be >= 0");
    }
}

void ForestModel::fit(MatrixView x, std::span<const std::uint8_t> y) {
    validate(params_);
    check_fit_input(x, y);
    const std::size_t n = x.rows();
    const auto sorted = wateruse::detail::SortedColumns::build(x);

    trees_.clear();
    trees_.reserve(static_cast<std::size_t>(params_.n_estimators));
    std::vector<double> weights(n);
    for (int t = 0; t < params_.n_estimators; ++t) {
        const auto tree_id = static_cast<std::uint64_t>(t);
        if (params_.bootstrap) {
            std::fill(weights.begin(), weights.end(), 0.0);
            Rng rng = make_rng(seed_, {0xB007ULL, tree_id});
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) {
                weights[pick(rng)] += 1.0;
            }
        } else {
            std::fill(weights.begin(), weights.end(), 1.0);
        }
        trees_.push_back(detail::grow_tree(x, y, weights, sorted, params_.tree,
                                           derive_seed(seed_, {0x7EEULL, tree_id})));
    }
    width_ = x.cols();
}

std::vector<double> ForestModel::predict_proba(MatrixView x) const {
    check_predict_input(*this, x);
    std::vector<double> sum(x.rows(), 0.0);
    for (const auto& tree : trees_) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            sum[r] += tree.predict_one(x.row(r));
        }
    }
    const double n = static_cast<double>(trees_.size());
    for (auto& v : sum) {
        v /= n;
    }
    return sum;
}

Json ForestModel::to_json() const {
    Json trees = Json::array();
    for (const auto& t : trees_) {
        trees.push_back(t.to_json());
    }
    return {{"schema", "wateruse.forest"},
            {"version", 1},
            {"input_width", width_},
            {"seed", seed_},
            {"params",
             {{"n_estimators", params_.n_estimators},
              {"criterion", to_string(params_.tree.criterion)},
              {"max_depth", params_.tree.max_depth},
              {"max_features", to_string(params_.tree.max_features)},
              {"class_weight", to_string(params_.tree.class_weight)},
              {"bootstrap", params_.bootstrap}}},
            {"trees", trees}};
}

ForestModel ForestModel::from_json(const Json& j) {
    expect_schema(j, "wateruse.forest", 1);
    const auto& p = j.at("params");
    ForestParams params;
    params.n_estimators = json_field<int>(p, "n_estimators");
    params.tree.criterion = criterion_from_string(json_field<std::string>(p, "criterion"));
    params.tree.max_depth = json_field<int>(p, "max_depth");
    params.tree.max_features = max_features_from_string(json_field<std::string>(p, "max_features"));
    params.tree.class_weight = class_weight_from_string(json_field<std::string>(p, "class_weight"));
    params.bootstrap = json_field<bool>(p, "bootstrap");
    ForestModel model(params, json_field<std::uint64_t>(j, "seed"));
    model.width_ = json_field<std::size_t>(j, "input_width");
    for (const auto& t : j.at("trees")) {
        model.trees_.push_back(DecisionTree::from_json(t, model.width_));
    }
    if (model.trees_.size() != static_cast<std::size_t>(params.n_estimators)) {
        throw FormatError("forest tree count differs from n_estimators");
    }
    return model;
}

ForestModel fit_forest(MatrixView x, std::span<const std::uint8_t> y, const ForestParams& params,
                       std::uint64_t seed) {
    ForestModel model(params, seed);
    model.fit(x, y);
    return model;
}

} // namespace wateruse::trees
