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

#include "wateruse/matrix.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wateruse {

using Json = nlohmann::json;

/// Fit/predict-probability contract shared by every binary base learner.
class BinaryClassifier {
public:
    virtual ~BinaryClassifier() = default;

    virtual std::string kind() const = 0;
    virtual void fit(MatrixView x, std::span<const std::uint8_t> y) = 0;
    /// Probability of the positive class per row. Throws if unfitted or on a
    /// width mismatch.
    virtual std::vector<double> predict_proba(MatrixView x) const = 0;
    virtual bool fitted() const = 0;
    virtual std::size_t input_width() const = 0;
    virtual Json to_json() const = 0;
};

/// Constant predictor returning the training positive rate. Stands in for a
/// member whose label column is constant on the training data.
class PriorClassifier final : public BinaryClassifier {
public:
    PriorClassifier() = default;
    PriorClassifier(double probability, std::size_t width)
        : probability_(probability), width_(width), fitted_(true) {}

    std::string kind() const override { return "prior"; }
    void fit(MatrixView x, std::span<const std::uint8_t> y) override;
    std::vector<double> predict_proba(MatrixView x) const override;
    bool fitted() const override { return fitted_; }
    std::size_t input_width() const override { return width_; }
    Json to_json() const override;

    static PriorClassifier from_json(const Json& j);
    double probability() const { return probability_; }

private:
    double probability_ = 0.0;
    std::size_t width_ = 0;
    bool fitted_ = false;
};

/// Rebuilds any serialized learner from its schema tag.
std::unique_ptr<BinaryClassifier> classifier_from_json(const Json& j);

void check_fit_input(MatrixView x, std::span<const std::uint8_t> y);
void check_predict_input(const BinaryClassifier& model, MatrixView x);

/// Reads a field and rethrows JSON errors as FormatError.
template <typename T>
T json_field(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model field '") + key + "': " + e.what());
    }
}

void expect_schema(const Json& j, const std::string& schema, int version);

} // namespace wateruse
