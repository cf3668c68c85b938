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
#include <vector>

namespace wateruse::boosting {

/// Children must carry at least this much hessian weight.
inline constexpr double kMinChildWeight = 1.0;
/// Initial margin is the training log-odds clamped to +/- this value.
inline constexpr double kBaseMarginClamp = 15.0;

struct GbtParams {
    int n_estimators = 100;
    int max_depth = 6;
    double learning_rate = 0.1;
    double subsample = 1.0;
    double colsample_bytree = 1.0;
    double colsample_bylevel = 1.0;
    double colsample_bynode = 1.0;
    double alpha = 0.0;  // L1 on leaf values
    double lambda = 1.0; // L2 on leaf values
};

void validate(const GbtParams& params);

/// sign(g) * max(|g| - alpha, 0)
double soft_threshold(double g, double alpha);
/// -soft_threshold(G, alpha) / (H + lambda)
double leaf_value(double grad_sum, double hess_sum, double alpha, double lambda);
/// 1/2 [GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)] with G = GL+GR.
double split_gain(double gl, double hl, double gr, double hr, double lambda);
/// Logistic function; the margin is clamped to +/-35 so the result stays
/// strictly inside (0, 1).
double sigmoid(double margin);

struct RegressionNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<RegressionNode> nodes) : nodes_(std::move(nodes)) {}

    double predict_one(std::span<const double> row) const;
    const std::vector<RegressionNode>& nodes() const { return nodes_; }

    Json to_json() const;
    static RegressionTree from_json(const Json& j, std::size_t width);

private:
    std::vector<RegressionNode> nodes_;
};

/// Gradient-boosted trees on the logistic loss with second-order leaf
/// weights. Trees store raw leaf values; the learning rate is applied at
/// prediction time: margin = base_margin + eta * sum(leaf values).
class BoostedModel final : public BinaryClassifier {
public:
    BoostedModel() = default;
    BoostedModel(GbtParams params, std::uint64_t seed) : params_(params), seed_(seed) {}

    std::string kind() const override { return "gbt"; }
    void fit(MatrixView x, std::span<const std::uint8_t> y) override;
    std::vector<double> predict_proba(MatrixView x) const override;
    bool fitted() const override { return fitted_; }
    std::size_t input_width() const override { return width_; }
    Json to_json() const override;
    static BoostedModel from_json(const Json& j);

    std::vector<double> predict_margin(MatrixView x) const;

    const GbtParams& params() const { return params_; }
    double base_margin() const { return base_margin_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    /// Mean training log-loss before the first round and after each round.
    const std::vector<double>& training_loss() const { return training_loss_; }

    /// Assembles a model from parts, e.g. for hand-built test fixtures.
    static BoostedModel from_parts(GbtParams params, double base_margin,
                                   std::vector<RegressionTree> trees, std::size_t width);

private:
    GbtParams params_;
    std::uint64_t seed_ = 0;
    double base_margin_ = 0.0;
    std::vector<RegressionTree> trees_;
    std::vector<double> training_loss_;
    std::size_t width_ = 0;
    bool fitted_ = false;
};

BoostedModel fit_gbt(MatrixView x, std::span<const std::uint8_t> y, const GbtParams& params,
                     std::uint64_t seed);

} // namespace wateruse::boosting
