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

#include "wateruse/tuning.hpp"

#include "wateruse/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace wateruse {

namespace {

std::vector<Json> int_range(int lo, int hi, int step) {
    std::vector<Json> out;
    for (int v = lo; v <= hi; v += step) out.emplace_back(v);
    return out;
}

// lo..hi in steps of `step`, rounded to the step's decimal places.
std::vector<Json> decimal_range(int lo, int hi, double step) {
    std::vector<Json> out;
    for (int v = lo; v <= hi; ++v) out.emplace_back(std::round(v * step * 1e6) / 1e6);
    return out;
}

// m * 10^e for m = 1..9, e = -4..-2, then 0.1.
std::vector<Json> log_grid() {
    std::vector<Json> out;
    for (int e = -4; e <= -2; ++e) {
        for (int m = 1; m <= 9; ++m) {
            out.emplace_back(std::stod(std::to_string(m) + "e" + std::to_string(e)));
        }
    }
    out.emplace_back(0.1);
    return out;
}

} // namespace

SearchSpace SearchSpace::defaults(LearnerKind kind) {
    SearchSpace s;
    s.kind = kind;
    switch (kind) {
    case LearnerKind::Forest:
        s.dimensions = {
            {"n_estimators", int_range(25, 500, 25)},
            {"criterion", {"gini", "entropy"}},
            {"max_depth", int_range(3, 10, 1)},
            {"max_features", {"auto", "sqrt"}},
            {"class_weight", {"none", "balanced"}},
        };
        break;
    case LearnerKind::Gbt:
        s.dimensions = {
            {"n_estimators", int_range(25, 500, 25)},
            {"max_depth", int_range(3, 10, 1)},
            {"learning_rate", decimal_range(1, 10, 0.01)},
            {"subsample", decimal_range(1, 10, 0.1)},
            {"colsample_bytree", decimal_range(1, 10, 0.1)},
            {"colsample_bylevel", decimal_range(1, 10, 0.1)},
            {"colsample_bynode", decimal_range(1, 10, 0.1)},
            {"alpha", log_grid()},
            {"lambda", log_grid()},
        };
        break;
    case LearnerKind::Mlp:
        s.dimensions = {
            {"hidden_layers", int_range(1, 3, 1)},
            {"hidden_units", {16, 32, 64}},
            {"epochs", int_range(25, 200, 25)},
            {"optimizer", {"sgd", "adam"}},
            {"learning_rate", decimal_range(1, 10, 0.01)},
            {"batch_size", {32, 128, 256}},
            {"l2", log_grid()},
        };
        break;
    }
    return s;
}

Json SearchSpace::sample(Rng& rng) const {
    Json point = Json::object();
    for (const auto& d : dimensions) {
        const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(d.values.size()));
        point[d.name] = d.values[std::min(i, d.values.size() - 1)];
    }
    return point;
}

bool SearchSpace::contains(const Json& point) const {
    if (!point.is_object() || point.size() != dimensions.size()) return false;
    for (const auto& d : dimensions) {
        if (!point.contains(d.name)) return false;
        const Json& v = point.at(d.name);
        if (std::find(d.values.begin(), d.values.end(), v) == d.values.end()) return false;
    }
    return true;
}

void SearchSpace::validate() const {
    for (const auto& d : dimensions) {
        if (d.values.empty()) {
            throw ConfigError("search dimension '" + d.name + "' has no values");
        }
    }
    // Every value of every dimension must validate; checking each value
    // against the first value of the others covers the per-key checks.
    Json base = Json::object();
    for (const auto& d : dimensions) base[d.name] = d.values.front();
    for (const auto& d : dimensions) {
        for (const auto& v : d.values) {
            Json point = base;
            point[d.name] = v;
            BaseLearnerSpec{kind, point, 0}.validate();
        }
    }
}

Json to_json(const SearchSpace& s) {
    Json dims = Json::object();
    for (const auto& d : s.dimensions) dims[d.name] = d.values;
    return {{"kind", to_string(s.kind)}, {"dimensions", dims}};
}

SearchSpace search_space_from_json(const Json& j) {
    SearchSpace s;
    try {
        s.kind = learner_kind_from_string(j.at("kind").get<std::string>());
        for (const auto& [name, values] : j.at("dimensions").items()) {
            if (!values.is_array()) {
                throw ConfigError("search dimension '" + name + "' must be an array");
            }
            s.dimensions.push_back({name, values.get<std::vector<Json>>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed search space: ") + e.what());
    }
    s.validate();
    return s;
}

SearchResult random_search(const SearchSpace& space, const WindowedDataset& ds,
                           const SearchOptions& options) {
    if (options.budget < 1) throw ConfigError("search budget must be at least 1");
    if (!ds.is_split() || ds.rows(Split::Train).size() == 0 || ds.rows(Split::Val).size() == 0) {
        throw ConfigError("tuning needs a dataset with train and validation rows");
    }
    space.validate();

    SearchResult result;
    result.trials.resize(options.budget);
    for (std::size_t i = 0; i < options.budget; ++i) {
        Rng rng = make_rng(options.seed, {0x7E57, i});
        auto& t = result.trials[i];
        t.index = i;
        t.config = space.sample(rng);
        t.seed = derive_seed(options.seed, {0x7A1, i});
    }

    const RowRange val = ds.rows(Split::Val);
    const std::span<const LabelVector> truth(ds.labels().data() + val.begin, val.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < options.budget; i = next++) {
            auto& t = result.trials[i];
            const auto start = std::chrono::steady_clock::now();
            try {
                const BaseLearnerSpec spec{space.kind, t.config, t.seed};
                const MetaModel model =
                    fit_meta(ds, options.method, spec, options.order, options.threshold);
                const auto pred = model.predict(ds, val);
                t.f1_micro = f1_micro(pred.labels, truth);
            } catch (const TrainingError& e) {
                t.f1_micro = 0.0;
                t.error = e.what();
            }
            t.fit_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, options.budget));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (const auto& t : result.trials) {
        if (t.index == 0 || t.f1_micro > result.best_score) {
            result.best_index = t.index;
            result.best_score = t.f1_micro;
        }
    }
    result.best_config = result.trials[result.best_index].config;
    return result;
}

Json to_json(const SearchResult& r, const SearchSpace& space, const SearchOptions& options,
             std::size_t window) {
    Json trials = Json::array();
    for (const auto& t : r.trials) {
        Json rec = {{"index", t.index},
                    {"config", t.config},
                    {"f1_micro", t.f1_micro},
                    {"fit_seconds", t.fit_seconds},
                    {"seed", t.seed}};
        if (!t.error.empty()) rec["error"] = t.error;
        trials.push_back(rec);
    }
    return {{"model", to_string(space.kind)},
            {"meta", to_string(options.method)},
            {"window", window},
            {"budget", options.budget},
            {"seed", options.seed},
            {"space", to_json(space)},
            {"best_index", r.best_index},
            {"best_f1_micro", r.best_score},
            {"best_config", r.best_config},
            {"trials", trials}};
}

} // namespace wateruse
