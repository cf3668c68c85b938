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
#include "wateruse/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wateruse::neural {

enum class Optimizer { Sgd, Adam };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& s);

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

struct MlpConfig {
    std::vector<std::size_t> hidden{32, 32};
    double l2 = 1e-4;
    Optimizer optimizer = Optimizer::Adam;
    double learning_rate = 0.01;
    std::size_t batch_size = 256;
    int epochs = 25;
    bool standardize = true;
};

void validate(const MlpConfig& config);

struct DenseLayer {
    Matrix weights; // outputs x inputs
    std::vector<double> bias;
};

/// tanh hidden layers, one sigmoid output unit.
struct MlpParams {
    std::vector<DenseLayer> layers;

    std::size_t input_width() const { return layers.empty() ? 0 : layers.front().weights.cols(); }
    bool all_finite() const;
};

/// `layer_sizes` = {input, hidden..., 1}. Weights uniform in
/// +/- 1/sqrt(fan_in), biases zero.
MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

/// Probability of the positive class for one input row.
double forward(const MlpParams& params, std::span<const double> x);

/// Mean binary cross-entropy over the rows plus (l2/2) * sum of squared
/// weights (biases are not penalized).
double loss(const MlpParams& params, MatrixView x, std::span<const std::uint8_t> y, double l2);

/// Gradient of `loss` with respect to every weight and bias, same shapes
/// as `params`.
MlpParams backward(const MlpParams& params, MatrixView x, std::span<const std::uint8_t> y,
                   double l2);

/// Mini-batch training for exactly `config.epochs` epochs; the batch order
/// is reshuffled every epoch from `seed`. Throws TrainingError on a
/// non-finite loss, naming the epoch and batch.
MlpParams train(MlpParams params, MatrixView x, std::span<const std::uint8_t> y,
                const MlpConfig& config, std::uint64_t seed);

class MlpClassifier final : public BinaryClassifier {
public:
    MlpClassifier() = default;
    MlpClassifier(MlpConfig config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {}

    std::string kind() const override { return "mlp"; }
    void fit(MatrixView x, std::span<const std::uint8_t> y) override;
    std::vector<double> predict_proba(MatrixView x) const override;
    bool fitted() const override { return fitted_; }
    std::size_t input_width() const override { return params_.input_width(); }
    Json to_json() const override;
    static MlpClassifier from_json(const Json& j);

    const MlpParams& params() const { return params_; }
    const Standardizer& standardizer() const { return standardizer_; }

private:
    MlpConfig config_;
    std::uint64_t seed_ = 0;
    Standardizer standardizer_;
    MlpParams params_;
    bool fitted_ = false;
};

} // namespace wateruse::neural
