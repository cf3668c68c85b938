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

#include "wateruse/boosting.hpp"
#include "wateruse/classifier.hpp"
#include "wateruse/neural.hpp"
#include "wateruse/trees.hpp"

namespace wateruse {

void check_fit_input(MatrixView x, std::span<const std::uint8_t> y) {
    if (x.rows() == 0) {
        throw TrainingError("cannot fit on empty input");
    }
    if (x.rows() != y.size()) {
        throw TrainingError("feature rows and labels differ in length");
    }
    for (auto v : y) {
        if (v > 1) {
            throw TrainingError("labels must be binary");
        }
    }
}

void check_predict_input(const BinaryClassifier& model, MatrixView x) {
    if (!model.fitted()) {
        throw TrainingError(model.kind() + " model used before fit");
    }
    if (x.cols() != model.input_width()) {
        throw FormatError(model.kind() + " model expects " + std::to_string(model.input_width()) +
                          " input columns, got " + std::to_string(x.cols()));
    }
}

void expect_schema(const Json& j, const std::string& schema, int version) {
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema) {
        throw FormatError("expected a '" + schema + "' document");
    }
    if (json_field<int>(j, "version") != version) {
        throw FormatError("unsupported " + schema + " version");
    }
}

void PriorClassifier::fit(MatrixView x, std::span<const std::uint8_t> y) {
    check_fit_input(x, y);
    std::size_t positives = 0;
    for (auto v : y) {
        positives += v;
    }
    probability_ = static_cast<double>(positives) / static_cast<double>(y.size());
    width_ = x.cols();
    fitted_ = true;
}

std::vector<double> PriorClassifier::predict_proba(MatrixView x) const {
    check_predict_input(*this, x);
    return std::vector<double>(x.rows(), probability_);
}

Json PriorClassifier::to_json() const {
    return {{"schema", "wateruse.prior"},
            {"version", 1},
            {"probability", probability_},
            {"input_width", width_}};
}

PriorClassifier PriorClassifier::from_json(const Json& j) {
    expect_schema(j, "wateruse.prior", 1);
    return PriorClassifier(json_field<double>(j, "probability"),
                           json_field<std::size_t>(j, "input_width"));
}

std::unique_ptr<BinaryClassifier> classifier_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
        throw FormatError("model document has no schema tag");
    }
    const auto schema = j["schema"].get<std::string>();
    if (schema == "wateruse.prior") {
        return std::make_unique<PriorClassifier>(PriorClassifier::from_json(j));
    }
    if (schema == "wateruse.forest") {
        return std::make_unique<trees::ForestModel>(trees::ForestModel::from_json(j));
    }
    if (schema == "wateruse.gbt") {
        return std::make_unique<boosting::BoostedModel>(boosting::BoostedModel::from_json(j));
    }
    if (schema == "wateruse.mlp") {
        return std::make_unique<neural::MlpClassifier>(neural::MlpClassifier::from_json(j));
    }
    throw FormatError("unknown model schema '" + schema + "'");
}

} // namespace wateruse
