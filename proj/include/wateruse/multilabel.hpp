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

#include "wateruse/boosting.hpp"
#include "wateruse/classifier.hpp"
#include "wateruse/dataset.hpp"
#include "wateruse/neural.hpp"
#include "wateruse/trees.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wateruse {

enum class LearnerKind { Forest, Gbt, Mlp };
enum class MetaMethod { BinaryRelevance, ClassifierChain };

std::string to_string(LearnerKind k);     // rf | gbt | mlp
std::string to_string(MetaMethod m);      // br | cc
std::string display_name(LearnerKind k);  // Random Forest | GBT | MLP
LearnerKind learner_kind_from_string(const std::string& s);
MetaMethod meta_method_from_string(const std::string& s);

/// Hyperparameter documents, one flat JSON object per learner kind. Missing
/// keys take the defaults; unknown keys are rejected.
trees::ForestParams forest_params_from_json(const Json& j);
boosting::GbtParams gbt_params_from_json(const Json& j);
neural::MlpConfig mlp_config_from_json(const Json& j);
Json to_json(const trees::ForestParams& p);
Json to_json(const boosting::GbtParams& p);
Json to_json(const neural::MlpConfig& c);

struct BaseLearnerSpec {
    LearnerKind kind = LearnerKind::Gbt;
    Json hyperparameters = Json::object();
    std::uint64_t seed = 0;

    /// Throws ConfigError if the hyperparameters do not validate.
    void validate() const;
};

/// Builds an unfitted member for `label` with seed derive_seed(spec.seed, {label}).
std::unique_ptr<BinaryClassifier> make_learner(const BaseLearnerSpec& spec, std::size_t label);

using LearnerFactory = std::function<std::unique_ptr<BinaryClassifier>(std::size_t label)>;
using LabelOrder = std::array<std::size_t, kFixtureCount>;

inline constexpr LabelOrder kCanonicalOrder{0, 1, 2, 3, 4};

LabelOrder label_order_from_names(const std::vector<std::string>& names);

struct MultiLabelPrediction {
    std::vector<LabelVector> labels;
    Matrix probabilities; // N x 5, canonical label order
};

/// Five binary members combined by binary relevance or a classifier chain.
///
/// Binary relevance: member k predicts label k from the window alone.
/// Classifier chain: member k predicts label order[k] from the window
/// followed by the thresholded predictions of members 0..k-1, so its input
/// width is W + k. Training feeds the true earlier labels instead.
class MetaModel {
public:
    MetaModel() = default;
    MetaModel(MetaMethod method, LabelOrder order, std::size_t window, double threshold,
              std::vector<std::unique_ptr<BinaryClassifier>> members);

    MetaMethod method() const { return method_; }
    const LabelOrder& label_order() const { return order_; }
    std::size_t window() const { return window_; }
    double threshold() const { return threshold_; }
    const BinaryClassifier& member(std::size_t k) const { return *members_.at(k); }
    std::size_t member_input_width(std::size_t k) const;

    /// `x` has exactly `window()` columns.
    MultiLabelPrediction predict(MatrixView x) const;
    MultiLabelPrediction predict(const WindowedDataset& ds, RowRange rows) const;

    Json to_json() const;
    static MetaModel from_json(const Json& j);

private:
    MultiLabelPrediction predict_wide(Matrix& wide) const;

    MetaMethod method_ = MetaMethod::BinaryRelevance;
    LabelOrder order_ = kCanonicalOrder;
    std::size_t window_ = 0;
    double threshold_ = 0.5;
    std::vector<std::unique_ptr<BinaryClassifier>> members_;
};

/// Fits on the train split. A label that is constant on train gets a
/// PriorClassifier member instead of a fitted learner.
MetaModel fit_br(const WindowedDataset& ds, const LearnerFactory& factory, double threshold = 0.5);
MetaModel fit_cc(const WindowedDataset& ds, const LearnerFactory& factory,
                 LabelOrder order = kCanonicalOrder, double threshold = 0.5);

MetaModel fit_br(const WindowedDataset& ds, const BaseLearnerSpec& spec, double threshold = 0.5);
MetaModel fit_cc(const WindowedDataset& ds, const BaseLearnerSpec& spec,
                 LabelOrder order = kCanonicalOrder, double threshold = 0.5);

/// Matrix-level variants: `x` holds the window features of the training rows.
MetaModel fit_br(MatrixView x, std::span<const LabelVector> labels, const LearnerFactory& factory,
                 double threshold = 0.5);
MetaModel fit_cc(MatrixView x, std::span<const LabelVector> labels, const LearnerFactory& factory,
                 LabelOrder order = kCanonicalOrder, double threshold = 0.5);

MetaModel fit_meta(const WindowedDataset& ds, MetaMethod method, const BaseLearnerSpec& spec,
                   LabelOrder order = kCanonicalOrder, double threshold = 0.5);

void save_model(const MetaModel& model, const std::filesystem::path& path);
MetaModel load_model(const std::filesystem::path& path);

} // namespace wateruse
