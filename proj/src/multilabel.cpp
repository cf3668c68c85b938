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

#include "wateruse/multilabel.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace wateruse {

std::string to_string(LearnerKind k) {
    switch (k) {
    case LearnerKind::Forest: return "rf";
    case LearnerKind::Gbt: return "gbt";
    case LearnerKind::Mlp: return "mlp";
    }
    return "rf";
}

std::string to_string(MetaMethod m) { return m == MetaMethod::BinaryRelevance ? "br" : "cc"; }

std::string display_name(LearnerKind k) {
    switch (k) {
    case LearnerKind::Forest: return "Random Forest";
    case LearnerKind::Gbt: return "GBT";
    case LearnerKind::Mlp: return "MLP";
    }
    return "";
}

LearnerKind learner_kind_from_string(const std::string& s) {
    if (s == "rf" || s == "forest") return LearnerKind::Forest;
    if (s == "gbt") return LearnerKind::Gbt;
    if (s == "mlp") return LearnerKind::Mlp;
    throw ConfigError("model kind must be rf, gbt or mlp, got '" + s + "'");
}

MetaMethod meta_method_from_string(const std::string& s) {
    if (s == "br") return MetaMethod::BinaryRelevance;
    if (s == "cc") return MetaMethod::ClassifierChain;
    throw ConfigError("meta method must be br or cc, got '" + s + "'");
}

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* what) {
    if (!j.is_object()) {
        throw ConfigError(std::string(what) + " hyperparameters must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError(std::string(what) + " hyperparameter '" + key + "' is unknown");
        }
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("hyperparameter '") + key + "' has the wrong type");
    }
}

} // namespace

trees::ForestParams forest_params_from_json(const Json& j) {
    reject_unknown(j, {"n_estimators", "criterion", "max_depth", "max_features", "class_weight",
                       "bootstrap"},
                   "rf");
    trees::ForestParams p;
    read(j, "n_estimators", p.n_estimators);
    read(j, "max_depth", p.tree.max_depth);
    read(j, "bootstrap", p.bootstrap);
    std::string s;
    if (j.contains("criterion")) {
        read(j, "criterion", s);
        p.tree.criterion = trees::criterion_from_string(s);
    }
    if (j.contains("max_features")) {
        read(j, "max_features", s);
        p.tree.max_features = trees::max_features_from_string(s);
    }
    if (j.contains("class_weight")) {
        read(j, "class_weight", s);
        p.tree.class_weight = trees::class_weight_from_string(s);
    }
    trees::validate(p);
    return p;
}

boosting::GbtParams gbt_params_from_json(const Json& j) {
    reject_unknown(j, {"n_estimators", "max_depth", "learning_rate", "booster", "subsample",
                       "colsample_bytree", "colsample_bylevel", "colsample_bynode", "alpha",
                       "lambda"},
                   "gbt");
    boosting::GbtParams p;
    read(j, "n_estimators", p.n_estimators);
    read(j, "max_depth", p.max_depth);
    read(j, "learning_rate", p.learning_rate);
    read(j, "subsample", p.subsample);
    read(j, "colsample_bytree", p.colsample_bytree);
    read(j, "colsample_bylevel", p.colsample_bylevel);
    read(j, "colsample_bynode", p.colsample_bynode);
    read(j, "alpha", p.alpha);
    read(j, "lambda", p.lambda);
    if (j.contains("booster")) {
        std::string booster;
        read(j, "booster", booster);
        if (booster != "gbtree") {
            throw ConfigError("only the gbtree booster is supported, got '" + booster + "'");
        }
    }
    boosting::validate(p);
    return p;
}

neural::MlpConfig mlp_config_from_json(const Json& j) {
    reject_unknown(j, {"hidden_layers", "hidden_units", "activation", "epochs", "optimizer",
                       "learning_rate", "batch_size", "l2", "standardize"},
                   "mlp");
    neural::MlpConfig c;
    std::size_t layers = c.hidden.size();
    std::size_t units = c.hidden.front();
    read(j, "hidden_layers", layers);
    read(j, "hidden_units", units);
    if (layers == 0 || units == 0) {
        throw ConfigError("mlp needs at least one hidden layer of nonzero width");
    }
    c.hidden.assign(layers, units);
    if (j.contains("activation") && j.at("activation") != "tanh") {
        throw ConfigError("mlp activation must be tanh");
    }
    read(j, "epochs", c.epochs);
    read(j, "learning_rate", c.learning_rate);
    read(j, "batch_size", c.batch_size);
    read(j, "l2", c.l2);
    read(j, "standardize", c.standardize);
    if (j.contains("optimizer")) {
        std::string s;
        read(j, "optimizer", s);
        c.optimizer = neural::optimizer_from_string(s);
    }
    neural::validate(c);
    return c;
}

Json to_json(const trees::ForestParams& p) {
    return {{"n_estimators", p.n_estimators},
            {"criterion", trees::to_string(p.tree.criterion)},
            {"max_depth", p.tree.max_depth},
            {"max_features", trees::to_string(p.tree.max_features)},
            {"class_weight", trees::to_string(p.tree.class_weight)},
            {"bootstrap", p.bootstrap}};
}

Json to_json(const boosting::GbtParams& p) {
    return {{"n_estimators", p.n_estimators},
            {"max_depth", p.max_depth},
            {"learning_rate", p.learning_rate},
            {"booster", "gbtree"},
            {"subsample", p.subsample},
            {"colsample_bytree", p.colsample_bytree},
            {"colsample_bylevel", p.colsample_bylevel},
            {"colsample_bynode", p.colsample_bynode},
            {"alpha", p.alpha},
            {"lambda", p.lambda}};
}

Json to_json(const neural::MlpConfig& c) {
    return {{"hidden_layers", c.hidden.size()},
            {"hidden_units", c.hidden.front()},
            {"activation", "tanh"},
            {"epochs", c.epochs},
            {"optimizer", neural::to_string(c.optimizer)},
            {"learning_rate", c.learning_rate},
            {"batch_size", c.batch_size},
            {"l2", c.l2},
            {"standardize", c.standardize}};
}

void BaseLearnerSpec::validate() const {
    switch (kind) {
    case LearnerKind::Forest: forest_params_from_json(hyperparameters); break;
    case LearnerKind::Gbt: gbt_params_from_json(hyperparameters); break;
    case LearnerKind::Mlp: mlp_config_from_json(hyperparameters); break;
    }
}

std::unique_ptr<BinaryClassifier> make_learner(const BaseLearnerSpec& spec, std::size_t label) {
    const std::uint64_t seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(label)});
    switch (spec.kind) {
    case LearnerKind::Forest:
        return std::make_unique<trees::ForestModel>(forest_params_from_json(spec.hyperparameters), seed);
    case LearnerKind::Gbt:
        return std::make_unique<boosting::BoostedModel>(gbt_params_from_json(spec.hyperparameters), seed);
    case LearnerKind::Mlp:
        return std::make_unique<neural::MlpClassifier>(mlp_config_from_json(spec.hyperparameters), seed);
    }
    throw ConfigError("unknown learner kind");
}

LabelOrder label_order_from_names(const std::vector<std::string>& names) {
    if (names.size() != kFixtureCount) {
        throw ConfigError("label order must name all 5 fixtures");
    }
    LabelOrder order{};
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        auto f = fixture_from_name(names[k]);
        if (!f) throw ConfigError("unknown fixture '" + names[k] + "' in label order");
        order[k] = index_of(*f);
        seen.insert(order[k]);
    }
    if (seen.size() != kFixtureCount) {
        throw ConfigError("label order must be a permutation of the 5 fixtures");
    }
    return order;
}

MetaModel::MetaModel(MetaMethod method, LabelOrder order, std::size_t window, double threshold,
                     std::vector<std::unique_ptr<BinaryClassifier>> members)
    : method_(method), order_(order), window_(window), threshold_(threshold),
      members_(std::move(members)) {
    if (members_.size() != kFixtureCount) {
        throw ConfigError("a meta model needs exactly 5 members");
    }
    if (!(threshold_ > 0.0 && threshold_ < 1.0)) {
        throw ConfigError("decision threshold must lie in (0, 1)");
    }
    std::array<bool, kFixtureCount> seen{};
    for (auto k : order_) {
        if (k >= kFixtureCount || seen[k]) throw ConfigError("label order is not a permutation");
        seen[k] = true;
    }
    if (method_ == MetaMethod::BinaryRelevance) {
        order_ = kCanonicalOrder;
    }
}

std::size_t MetaModel::member_input_width(std::size_t k) const {
    return method_ == MetaMethod::ClassifierChain ? window_ + k : window_;
}

MultiLabelPrediction MetaModel::predict_wide(Matrix& wide) const {
    const std::size_t n = wide.rows();
    MultiLabelPrediction out{std::vector<LabelVector>(n), Matrix(n, kFixtureCount)};
    const MatrixView view = wide.view();
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        const std::size_t label = order_[k];
        const auto probs = members_[k]->predict_proba(view.leading_cols(member_input_width(k)));
        const bool feed = method_ == MetaMethod::ClassifierChain && k + 1 < kFixtureCount;
        for (std::size_t r = 0; r < n; ++r) {
            const bool bit = probs[r] >= threshold_;
            out.probabilities(r, label) = probs[r];
            out.labels[r].set(label, bit);
            if (feed) {
                wide(r, window_ + k) = bit ? 1.0 : 0.0;
            }
        }
    }
    return out;
}

MultiLabelPrediction MetaModel::predict(MatrixView x) const {
    if (x.cols() != window_) {
        throw FormatError("meta model expects " + std::to_string(window_) + " columns, got " +
                          std::to_string(x.cols()));
    }
    const std::size_t extra = method_ == MetaMethod::ClassifierChain ? kFixtureCount - 1 : 0;
    Matrix wide(x.rows(), window_ + extra);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto src = x.row(r);
        std::copy(src.begin(), src.end(), wide.row(r).begin());
    }
    return predict_wide(wide);
}

MultiLabelPrediction MetaModel::predict(const WindowedDataset& ds, RowRange rows) const {
    if (ds.window() != window_) {
        throw FormatError("dataset window " + std::to_string(ds.window()) +
                          " differs from model window " + std::to_string(window_));
    }
    const std::size_t extra = method_ == MetaMethod::ClassifierChain ? kFixtureCount - 1 : 0;
    Matrix wide = ds.design_matrix(rows, extra);
    return predict_wide(wide);
}

Json MetaModel::to_json() const {
    Json members = Json::array();
    for (const auto& m : members_) {
        members.push_back(m->to_json());
    }
    Json order = Json::array();
    for (auto k : order_) {
        order.push_back(fixture_name(kAllFixtures[k]));
    }
    return {{"schema", "wateruse.meta"},
            {"version", 1},
            {"method", to_string(method_)},
            {"window", window_},
            {"threshold", threshold_},
            {"label_order", order},
            {"members", members}};
}

MetaModel MetaModel::from_json(const Json& j) {
    expect_schema(j, "wateruse.meta", 1);
    const auto method = meta_method_from_string(json_field<std::string>(j, "method"));
    const auto order = label_order_from_names(json_field<std::vector<std::string>>(j, "label_order"));
    std::vector<std::unique_ptr<BinaryClassifier>> members;
    for (const auto& m : j.at("members")) {
        members.push_back(classifier_from_json(m));
    }
    MetaModel model(method, order, json_field<std::size_t>(j, "window"),
                    json_field<double>(j, "threshold"), std::move(members));
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        if (model.members_[k]->input_width() != model.member_input_width(k)) {
            throw FormatError("meta member " + std::to_string(k) + " has input width " +
                              std::to_string(model.members_[k]->input_width()) + ", expected " +
                              std::to_string(model.member_input_width(k)));
        }
    }
    return model;
}

namespace {

std::vector<std::uint8_t> label_column(std::span<const LabelVector> labels, std::size_t k) {
    std::vector<std::uint8_t> y(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        y[r] = labels[r][k] ? 1 : 0;
    }
    return y;
}

std::unique_ptr<BinaryClassifier> fit_member(MatrixView x, std::span<const std::uint8_t> y,
                                             const LearnerFactory& factory, std::size_t label) {
    const bool constant = std::all_of(y.begin(), y.end(), [&](auto v) { return v == y.front(); });
    std::unique_ptr<BinaryClassifier> member;
    if (constant) {
        member = std::make_unique<PriorClassifier>();
    } else {
        member = factory(label);
    }
    member->fit(x, y);
    return member;
}

// `wide` holds the window in its first `window` columns; for chains the
// trailing columns are overwritten with teacher-forced labels.
MetaModel fit_wide(Matrix& wide, std::size_t window, std::span<const LabelVector> labels,
                   MetaMethod method, const LearnerFactory& factory, LabelOrder order,
                   double threshold) {
    if (wide.rows() == 0) {
        throw TrainingError("training split is empty");
    }
    if (method == MetaMethod::BinaryRelevance) {
        order = kCanonicalOrder;
    }
    if (method == MetaMethod::ClassifierChain) {
        for (std::size_t r = 0; r < wide.rows(); ++r) {
            for (std::size_t j = 0; j + 1 < kFixtureCount; ++j) {
                wide(r, window + j) = labels[r][order[j]] ? 1.0 : 0.0;
            }
        }
    }
    std::vector<std::unique_ptr<BinaryClassifier>> members;
    const MatrixView view = wide.view();
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        const std::size_t label = order[k];
        const std::size_t width = method == MetaMethod::ClassifierChain ? window + k : window;
        const auto y = label_column(labels, label);
        members.push_back(fit_member(view.leading_cols(width), y, factory, label));
    }
    return MetaModel(method, order, window, threshold, std::move(members));
}

MetaModel fit_dataset(const WindowedDataset& ds, MetaMethod method, const LearnerFactory& factory,
                      LabelOrder order, double threshold) {
    const RowRange train = ds.rows(Split::Train);
    const std::size_t extra = method == MetaMethod::ClassifierChain ? kFixtureCount - 1 : 0;
    Matrix wide = ds.design_matrix(train, extra);
    std::span<const LabelVector> labels(ds.labels().data() + train.begin, train.size());
    return fit_wide(wide, ds.window(), labels, method, factory, order, threshold);
}

MetaModel fit_matrix(MatrixView x, std::span<const LabelVector> labels, MetaMethod method,
                     const LearnerFactory& factory, LabelOrder order, double threshold) {
    if (x.rows() != labels.size()) {
        throw TrainingError("feature rows and label rows differ");
    }
    const std::size_t extra = method == MetaMethod::ClassifierChain ? kFixtureCount - 1 : 0;
    Matrix wide(x.rows(), x.cols() + extra);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto src = x.row(r);
        std::copy(src.begin(), src.end(), wide.row(r).begin());
    }
    return fit_wide(wide, x.cols(), labels, method, factory, order, threshold);
}

LearnerFactory factory_for(const BaseLearnerSpec& spec) {
    spec.validate();
    return [spec](std::size_t label) { return make_learner(spec, label); };
}

} // namespace

MetaModel fit_br(const WindowedDataset& ds, const LearnerFactory& factory, double threshold) {
    return fit_dataset(ds, MetaMethod::BinaryRelevance, factory, kCanonicalOrder, threshold);
}

MetaModel fit_cc(const WindowedDataset& ds, const LearnerFactory& factory, LabelOrder order,
                 double threshold) {
    return fit_dataset(ds, MetaMethod::ClassifierChain, factory, order, threshold);
}

MetaModel fit_br(const WindowedDataset& ds, const BaseLearnerSpec& spec, double threshold) {
    return fit_br(ds, factory_for(spec), threshold);
}

MetaModel fit_cc(const WindowedDataset& ds, const BaseLearnerSpec& spec, LabelOrder order,
                 double threshold) {
    return fit_cc(ds, factory_for(spec), order, threshold);
}

MetaModel fit_br(MatrixView x, std::span<const LabelVector> labels, const LearnerFactory& factory,
                 double threshold) {
    return fit_matrix(x, labels, MetaMethod::BinaryRelevance, factory, kCanonicalOrder, threshold);
}

MetaModel fit_cc(MatrixView x, std::span<const LabelVector> labels, const LearnerFactory& factory,
                 LabelOrder order, double threshold) {
    return fit_matrix(x, labels, MetaMethod::ClassifierChain, factory, order, threshold);
}

MetaModel fit_meta(const WindowedDataset& ds, MetaMethod method, const BaseLearnerSpec& spec,
                   LabelOrder order, double threshold) {
    return method == MetaMethod::BinaryRelevance ? fit_br(ds, spec, threshold)
                                                 : fit_cc(ds, spec, order, threshold);
}

void save_model(const MetaModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write model " + path.string());
    out << model.to_json().dump() << '\n';
    if (!out) throw FormatError("write failed for " + path.string());
}

MetaModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model " + path.string() + " is not valid JSON: " + e.what());
    }
    return MetaModel::from_json(j);
}

} // namespace wateruse
