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

#pragma once

#include "wateruse/classifier.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wateruse::trees {

enum class Criterion { Gini, Entropy };
enum class MaxFeatures { Auto, Sqrt };
enum class ClassWeight { None, Balanced };

std::string to_string(Criterion c);
std::string to_string(MaxFeatures m);
std::string to_string(ClassWeight w);
Criterion criterion_from_string(const std::string& s);
MaxFeatures max_features_from_string(const std::string& s);
ClassWeight class_weight_from_string(const std::string& s);

/// Impurity of a node with class weights (negative, positive).
/// gini = 1 - sum p^2, entropy = -sum p log2 p with 0 log 0 = 0.
double impurity(double negative, double positive, Criterion criterion);

struct TreeParams {
    Criterion criterion = Criterion::Gini;
    int max_depth = 8; // 0 = grow until pure or fewer than 2 samples
    MaxFeatures max_features = MaxFeatures::Auto;
    ClassWeight class_weight = ClassWeight::None;
};

/// Internal nodes send x[feature] <= threshold left. Leaves carry the
/// weighted positive fraction and the (sample-weighted) support.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double probability = 0.0;
    double support = 0.0;

    bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::size_t width)
        : nodes_(std::move(nodes)), width_(width) {}

    double predict_one(std::span<const double> row) const;
    std::vector<double> predict_proba(MatrixView x) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t input_width() const { return width_; }
    int depth() const;

    /// Nested {feature, threshold, left, right} / {probability, support} records.
    Json to_json() const;
    static DecisionTree from_json(const Json& j, std::size_t width);

private:
    std::vector<TreeNode> nodes_;
    std::size_t width_ = 0;
};

/// Greedy CART. Each node considers a random feature subset (all features
/// for `auto`, ceil(sqrt(W)) for `sqrt`) drawn from a per-node substream of
/// `seed`. Candidate thresholds are midpoints between consecutive distinct
/// values; ties in impurity decrease go to the lowest feature index, then the
/// lowest threshold. Splits must decrease impurity by more than 1e-12 of the
/// node weight.
DecisionTree fit_tree(MatrixView x, std::span<const std::uint8_t> y,
                      std::span<const double> sample_weights, const TreeParams& params,
                      std::uint64_t seed = 0);

struct ForestParams {
    int n_estimators = 100;
    TreeParams tree;
    bool bootstrap = true;
};

/// Random forest: bootstrap-resampled trees on per-tree substreams,
/// probability = unweighted mean of the member leaf probabilities.
class ForestModel final : public BinaryClassifier {
public:
    ForestModel() = default;
    ForestModel(ForestParams params, std::uint64_t seed) : params_(params), seed_(seed) {}

    std::string kind() const override { return "forest"; }
    void fit(MatrixView x, std::span<const std::uint8_t> y) override;
    std::vector<double> predict_proba(MatrixView x) const override;
    bool fitted() const override { return !trees_.empty(); }
    std::size_t input_width() const override { return width_; }
    Json to_json() const override;
    static ForestModel from_json(const Json& j);

    const std::vector<DecisionTree>& trees() const { return trees_; }
    const ForestParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

private:
    ForestParams params_;
    std::uint64_t seed_ = 0;
    std::vector<DecisionTree> trees_;
    std::size_t width_ = 0;
};

ForestModel fit_forest(MatrixView x, std::span<const std::uint8_t> y, const ForestParams& params,
                       std::uint64_t seed);

void validate(const ForestParams& params);

} // namespace wateruse::trees
