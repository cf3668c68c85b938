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

#include "wateruse/experiment.hpp"

#include "wateruse/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace wateruse {

namespace {

std::string short_name(LearnerKind k) {
    switch (k) {
    case LearnerKind::Forest: return "RF";
    case LearnerKind::Gbt: return "GBT";
    case LearnerKind::Mlp: return "MLP";
    }
    return "";
}

std::string method_label(MetaMethod m) { return m == MetaMethod::BinaryRelevance ? "BR" : "CC"; }

template <typename T>
T preset_field(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("preset field '") + key + "': " + e.what());
    }
}

std::size_t window_key(const std::string& s) {
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("window key '" + s + "' is not an integer");
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw FormatError("cannot write " + path.string());
}

} // namespace

void ExperimentPreset::validate() const {
    for (auto w : windows) {
        if (w < 1) throw ConfigError("preset windows must be positive");
    }
    if (!dataset && days < 1) throw ConfigError("preset days must be at least 1");
    if (workers < 1) throw ConfigError("preset workers must be at least 1");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
    for (auto kind : models) {
        for (std::size_t w : windows) {
            Json hp = params.count(kind) ? params.at(kind) : Json::object();
            if (window_params.count(kind) && window_params.at(kind).count(w)) {
                hp.update(window_params.at(kind).at(w));
            }
            BaseLearnerSpec{kind, hp, 0}.validate();
        }
    }
}

ExperimentPreset preset_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("preset must be a JSON object");
    static const std::set<std::string> known{
        "name",   "dataset", "sim_config", "days",        "sim_seed",  "windows",
        "models", "metas",   "seeds",      "comparison_windows", "params", "window_params",
        "label_order", "threshold", "workers", "output_dir"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("preset key '" + key + "' is unknown");
    }
    ExperimentPreset p;
    if (j.contains("name")) p.name = preset_field<std::string>(j, "name");
    if (j.contains("dataset")) p.dataset = preset_field<std::string>(j, "dataset");
    if (j.contains("sim_config")) p.sim_config = preset_field<std::string>(j, "sim_config");
    if (j.contains("days")) p.days = preset_field<int>(j, "days");
    if (j.contains("sim_seed")) p.sim_seed = preset_field<std::uint64_t>(j, "sim_seed");
    if (j.contains("windows")) p.windows = preset_field<std::vector<std::size_t>>(j, "windows");
    if (j.contains("models")) {
        for (const auto& s : preset_field<std::vector<std::string>>(j, "models")) {
            p.models.push_back(learner_kind_from_string(s));
        }
    }
    if (j.contains("metas")) {
        for (const auto& s : preset_field<std::vector<std::string>>(j, "metas")) {
            p.metas.push_back(meta_method_from_string(s));
        }
    }
    if (j.contains("seeds")) p.seeds = preset_field<std::vector<std::uint64_t>>(j, "seeds");
    for (const char* key : {"comparison_windows", "params", "window_params"}) {
        if (j.contains(key) && !j.at(key).is_object()) {
            throw ConfigError(std::string("preset field '") + key + "' must be an object");
        }
    }
    if (j.contains("comparison_windows")) {
        for (const auto& [k, v] : j.at("comparison_windows").items()) {
            if (!v.is_number_unsigned()) {
                throw ConfigError("preset field 'comparison_windows': window for '" + k + "' must be a positive integer");
            }
            p.comparison_windows[learner_kind_from_string(k)] = v.get<std::size_t>();
        }
    }
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) {
            p.params[learner_kind_from_string(k)] = v;
        }
    }
    if (j.contains("window_params")) {
        for (const auto& [k, by_window] : j.at("window_params").items()) {
            auto& dst = p.window_params[learner_kind_from_string(k)];
            for (const auto& [w, v] : by_window.items()) dst[window_key(w)] = v;
        }
    }
    if (j.contains("label_order")) {
        p.order = label_order_from_names(preset_field<std::vector<std::string>>(j, "label_order"));
    }
    if (j.contains("threshold")) p.threshold = preset_field<double>(j, "threshold");
    if (j.contains("workers")) p.workers = preset_field<std::size_t>(j, "workers");
    if (j.contains("output_dir")) p.output_dir = preset_field<std::string>(j, "output_dir");
    p.validate();
    return p;
}

Json to_json(const ExperimentPreset& p) {
    Json j = {{"name", p.name}, {"days", p.days}, {"sim_seed", p.sim_seed},
              {"windows", p.windows}, {"seeds", p.seeds}, {"threshold", p.threshold},
              {"workers", p.workers}, {"output_dir", p.output_dir.string()}};
    if (p.dataset) j["dataset"] = p.dataset->string();
    if (p.sim_config) j["sim_config"] = p.sim_config->string();
    j["models"] = Json::array();
    for (auto k : p.models) j["models"].push_back(to_string(k));
    j["metas"] = Json::array();
    for (auto m : p.metas) j["metas"].push_back(to_string(m));
    j["comparison_windows"] = Json::object();
    for (const auto& [k, w] : p.comparison_windows) j["comparison_windows"][to_string(k)] = w;
    j["params"] = Json::object();
    for (const auto& [k, v] : p.params) j["params"][to_string(k)] = v;
    j["window_params"] = Json::object();
    for (const auto& [k, by_window] : p.window_params) {
        for (const auto& [w, v] : by_window) j["window_params"][to_string(k)][std::to_string(w)] = v;
    }
    j["label_order"] = Json::array();
    for (auto k : p.order) j["label_order"].push_back(fixture_name(kAllFixtures[k]));
    return j;
}

std::vector<std::string> builtin_preset_names() { return {"smoke", "desk", "full"}; }

ExperimentPreset builtin_preset(const std::string& name) {
    ExperimentPreset p;
    p.name = name;
    p.models = {LearnerKind::Forest, LearnerKind::Gbt, LearnerKind::Mlp};
    p.metas = {MetaMethod::BinaryRelevance, MetaMethod::ClassifierChain};
    p.output_dir = "experiment_" + name;
    if (name == "smoke") {
        p.days = 3;
        p.windows = {30, 60};
        p.comparison_windows = {
            {LearnerKind::Forest, 30}, {LearnerKind::Gbt, 60}, {LearnerKind::Mlp, 60}};
        p.params[LearnerKind::Forest] = {{"n_estimators", 5}, {"max_depth", 5},
                                         {"max_features", "sqrt"}, {"class_weight", "balanced"}};
        p.params[LearnerKind::Gbt] = {{"n_estimators", 10}, {"max_depth", 3},
                                      {"learning_rate", 0.3}};
        p.params[LearnerKind::Mlp] = {{"hidden_layers", 1}, {"hidden_units", 16},
                                      {"epochs", 3}, {"batch_size", 128}};
    } else if (name == "desk") {
        p.days = 21;
        p.windows = {60, 120, 240, 480};
        p.params[LearnerKind::Forest] = {{"n_estimators", 25}, {"max_depth", 8},
                                         {"max_features", "sqrt"}, {"class_weight", "balanced"}};
        p.params[LearnerKind::Gbt] = {{"n_estimators", 40}, {"max_depth", 4},
                                      {"learning_rate", 0.2}, {"colsample_bytree", 0.5}};
        p.params[LearnerKind::Mlp] = {{"hidden_layers", 2}, {"hidden_units", 32},
                                      {"epochs", 10}, {"batch_size", 256}};
    } else if (name == "full") {
        p.days = 180;
        p.windows = {60, 120, 240, 480};
        auto& rf = p.window_params[LearnerKind::Forest];
        rf[60] = {{"n_estimators", 325}, {"criterion", "gini"}, {"max_depth", 8},
                  {"max_features", "auto"}, {"class_weight", "balanced"}};
        rf[120] = {{"n_estimators", 225}, {"criterion", "gini"}, {"max_depth", 8},
                   {"max_features", "auto"}, {"class_weight", "balanced"}};
        rf[240] = {{"n_estimators", 475}, {"criterion", "gini"}, {"max_depth", 9},
                   {"max_features", "sqrt"}, {"class_weight", "balanced"}};
        rf[480] = {{"n_estimators", 375}, {"criterion", "entropy"}, {"max_depth", 9},
                   {"max_features", "sqrt"}, {"class_weight", "balanced"}};
        auto gbt = [](int n, int depth, double eta, double sub, double tree, double level,
                      double node, double alpha, double lambda) {
            return Json{{"n_estimators", n},        {"max_depth", depth},
                        {"learning_rate", eta},     {"subsample", sub},
                        {"colsample_bytree", tree}, {"colsample_bylevel", level},
                        {"colsample_bynode", node}, {"alpha", alpha},
                        {"lambda", lambda}};
        };
        auto& g = p.window_params[LearnerKind::Gbt];
        g[60] = gbt(275, 3, 0.05, 0.4, 0.3, 0.8, 0.9, 0.03, 0.05);
        g[120] = gbt(100, 10, 0.03, 0.1, 0.7, 0.4, 0.7, 0.06, 0.05);
        g[240] = gbt(275, 3, 0.05, 0.7, 0.7, 0.5, 0.6, 0.02, 0.02);
        g[480] = gbt(125, 6, 0.03, 0.2, 0.7, 0.6, 0.8, 0.03, 0.0006);
        auto mlp = [](int layers, int units, int epochs, const char* opt, double lr, int batch,
                      double l2) {
            return Json{{"hidden_layers", layers}, {"hidden_units", units},
                        {"activation", "tanh"},    {"epochs", epochs},
                        {"optimizer", opt},        {"learning_rate", lr},
                        {"batch_size", batch},     {"l2", l2}};
        };
        auto& m = p.window_params[LearnerKind::Mlp];
        m[60] = mlp(2, 32, 100, "adam", 0.01, 256, 0.04);
        m[120] = mlp(2, 32, 75, "sgd", 0.05, 256, 0.07);
        m[240] = mlp(3, 16, 175, "sgd", 0.09, 128, 0.06);
        m[480] = mlp(2, 64, 125, "sgd", 0.04, 32, 0.01);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return p;
}

ExperimentPreset load_preset(const std::string& name_or_path) {
    const auto names = builtin_preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
        return builtin_preset(name_or_path);
    }
    std::ifstream in(name_or_path);
    if (!in) throw ConfigError("preset '" + name_or_path + "' is neither built in nor a readable file");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("preset " + name_or_path + " is not valid JSON: " + e.what());
    }
    return preset_from_json(j);
}

std::string CellSpec::id() const {
    return to_string(kind) + "_" + to_string(method) + "_w" + std::to_string(window) + "_s" +
           std::to_string(seed);
}

std::size_t ExperimentResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return !c.ok; }));
}

std::vector<CellSpec> plan_cells(const ExperimentPreset& preset) {
    std::set<CellSpec> cells;
    if (preset.empty()) return {};
    for (auto kind : preset.models) {
        for (auto method : preset.metas) {
            for (auto seed : preset.seeds) {
                for (auto w : preset.windows) cells.insert({kind, method, w, seed});
                const auto it = preset.comparison_windows.find(kind);
                if (it != preset.comparison_windows.end()) {
                    cells.insert({kind, method, it->second, seed});
                }
            }
        }
    }
    return {cells.begin(), cells.end()};
}

namespace {

Json cell_hyperparameters(const ExperimentPreset& p, LearnerKind kind, std::size_t window) {
    Json hp = p.params.count(kind) ? p.params.at(kind) : Json::object();
    if (p.window_params.count(kind) && p.window_params.at(kind).count(window)) {
        hp.update(p.window_params.at(kind).at(window));
    }
    return hp;
}

WindowedDataset base_dataset(const ExperimentPreset& p) {
    if (p.dataset) {
        WindowedDataset ds = read_dataset(*p.dataset);
        return ds.is_split() ? ds : split_chronological(std::move(ds));
    }
    const auto cfgs = load_sim_config(p.sim_config ? *p.sim_config : default_config_path());
    const HouseholdSeries series = simulate_household(cfgs, p.days, p.sim_seed);
    return split_chronological(window_series(series, 1));
}

Json report_cell_json(const CellResult& c) {
    Json j = {{"id", c.spec.id()},
              {"model", to_string(c.spec.kind)},
              {"meta", to_string(c.spec.method)},
              {"window", c.spec.window},
              {"seed", c.spec.seed},
              {"hyperparameters", c.hyperparameters},
              {"ok", c.ok}};
    if (c.ok) {
        j["test"] = to_json(c.test);
    } else {
        j["error"] = c.error;
    }
    return j;
}

std::string format_percent(const std::optional<double>& v) {
    if (!v) return "failed";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
    return buf;
}

} // namespace

std::vector<ReportTable> build_tables(const ExperimentPreset& preset,
                                      const std::vector<CellResult>& cells) {
    struct Mean {
        std::optional<double> accuracy, f1, label_accuracy;
    };
    // Mean over seeds; missing if any seed failed.
    auto mean_of = [&](LearnerKind kind, MetaMethod method, std::size_t window) {
        Mean m;
        double acc = 0.0, f1 = 0.0, lab = 0.0;
        std::size_t n = 0;
        for (const auto& c : cells) {
            if (c.spec.kind != kind || c.spec.method != method || c.spec.window != window) continue;
            if (!c.ok) return Mean{};
            acc += c.test.subset_accuracy;
            f1 += c.test.f1_micro;
            lab += c.test.mean_label_accuracy;
            ++n;
        }
        if (n == 0) return Mean{};
        return Mean{acc / n, f1 / n, lab / n};
    };
    auto add_column = [](ReportTable& t, std::string name, const Mean& m) {
        t.columns.push_back(std::move(name));
        t.values[0].push_back(m.accuracy);
        t.values[1].push_back(m.f1);
        t.label_accuracy.push_back(m.label_accuracy);
    };
    auto new_table = [](std::string title) {
        ReportTable t;
        t.title = std::move(title);
        t.row_names = {"Accuracy", "F1-Micro"};
        t.values.resize(2);
        return t;
    };
    auto cmp_window = [&](LearnerKind kind) {
        const auto it = preset.comparison_windows.find(kind);
        return it != preset.comparison_windows.end() ? it->second : preset.windows.front();
    };

    std::vector<ReportTable> tables;
    if (preset.empty()) return tables;
    std::vector<std::size_t> windows = preset.windows;
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());

    for (auto kind : preset.models) {
        for (auto method : preset.metas) {
            auto t = new_table("Performance of " + display_name(kind) + " (" + method_label(method) + ")");
            for (auto w : windows) {
                add_column(t, "Window " + std::to_string(w), mean_of(kind, method, w));
            }
            tables.push_back(std::move(t));
        }
    }
    const bool has_br = std::count(preset.metas.begin(), preset.metas.end(), MetaMethod::BinaryRelevance);
    const bool has_cc = std::count(preset.metas.begin(), preset.metas.end(), MetaMethod::ClassifierChain);
    if (has_br && has_cc) {
        for (auto kind : preset.models) {
            const std::size_t w = cmp_window(kind);
            auto t = new_table("Comparison of multi-task methods with " + short_name(kind));
            for (auto method : {MetaMethod::BinaryRelevance, MetaMethod::ClassifierChain}) {
                add_column(t, display_name(kind) + " (" + method_label(method) + ") - Window " +
                                  std::to_string(w),
                           mean_of(kind, method, w));
            }
            tables.push_back(std::move(t));
        }
    }
    const MetaMethod method = has_cc ? MetaMethod::ClassifierChain : preset.metas.front();
    auto t = new_table("Comparison of different classifiers");
    for (auto kind : preset.models) {
        const std::size_t w = cmp_window(kind);
        add_column(t, display_name(kind) + " (" + method_label(method) + ") - Window " + std::to_string(w),
                   mean_of(kind, method, w));
    }
    tables.push_back(std::move(t));
    return tables;
}

void write_table(const ReportTable& t, std::ostream& out) {
    std::size_t name_width = 0;
    for (const auto& r : t.row_names) name_width = std::max(name_width, r.size());
    std::vector<std::size_t> widths;
    for (const auto& c : t.columns) widths.push_back(std::max<std::size_t>(c.size(), 8));
    auto pad_left = [](const std::string& s, std::size_t w) {
        return std::string(w > s.size() ? w - s.size() : 0, ' ') + s;
    };
    out << t.title << '\n';
    out << std::string(name_width, ' ');
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << "  " << pad_left(t.columns[c], widths[c]);
    out << '\n';
    for (std::size_t r = 0; r < t.row_names.size(); ++r) {
        out << t.row_names[r] << std::string(name_width - t.row_names[r].size(), ' ');
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            out << "  " << pad_left(format_percent(t.values[r][c]), widths[c]);
        }
        out << '\n';
    }
    out << "(Accuracy is subset accuracy. Mean per-label accuracy:";
    for (const auto& v : t.label_accuracy) out << ' ' << format_percent(v);
    out << ")\n";
}

Json to_json(const ReportTable& t) {
    auto cell = [](const std::optional<double>& v) { return v ? Json(100.0 * *v) : Json(nullptr); };
    Json rows = Json::array();
    for (std::size_t r = 0; r < t.row_names.size(); ++r) {
        Json values = Json::array();
        for (const auto& v : t.values[r]) values.push_back(cell(v));
        rows.push_back({{"name", t.row_names[r]}, {"values", values}});
    }
    Json label = Json::array();
    for (const auto& v : t.label_accuracy) label.push_back(cell(v));
    return {{"title", t.title}, {"columns", t.columns}, {"rows", rows},
            {"mean_label_accuracy", label}};
}

ExperimentResult run_experiment(const ExperimentPreset& preset, std::ostream* log) {
    ExperimentResult result;
    if (preset.empty()) return result;
    preset.validate();

    const auto plan = plan_cells(preset);
    const WindowedDataset base = base_dataset(preset);
    std::mutex log_mutex;
    auto say = [&](const std::string& line) {
        if (!log) return;
        std::lock_guard lock(log_mutex);
        *log << line << '\n' << std::flush;
    };
    say("experiment " + preset.name + ": " + std::to_string(plan.size()) + " cells, " +
        std::to_string(base.size()) + " steps");

    result.cells.resize(plan.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < plan.size(); i = next++) {
            auto& cell = result.cells[i];
            cell.spec = plan[i];
            cell.hyperparameters = cell_hyperparameters(preset, cell.spec.kind, cell.spec.window);
            const auto start = std::chrono::steady_clock::now();
            try {
                const WindowedDataset ds = base.with_window(cell.spec.window);
                const BaseLearnerSpec spec{cell.spec.kind, cell.hyperparameters, cell.spec.seed};
                const MetaModel model =
                    fit_meta(ds, cell.spec.method, spec, preset.order, preset.threshold);
                const RowRange test = ds.rows(Split::Test);
                const auto pred = model.predict(ds, test);
                const std::span<const LabelVector> truth(ds.labels().data() + test.begin, test.size());
                cell.test = evaluate_predictions(pred.labels, truth);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cell.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.1fs", cell.seconds);
            say("  " + cell.spec.id() + (cell.ok ? " f1=" + format_percent(cell.test.f1_micro) : " FAILED: " + cell.error) + " (" + buf + ")");
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(preset.workers, plan.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    result.tables = build_tables(preset, result.cells);

    const auto& dir = preset.output_dir;
    std::filesystem::create_directories(dir / "cells");
    write_json(dir / "preset.json", to_json(preset));
    Json cells = Json::array();
    Json timings = Json::object();
    for (const auto& c : result.cells) {
        cells.push_back(report_cell_json(c));
        timings[c.spec.id()] = c.seconds;
        const auto cell_dir = dir / "cells" / c.spec.id();
        std::filesystem::create_directories(cell_dir);
        write_json(cell_dir / "metrics.json", report_cell_json(c));
        if (c.ok) write_confusion_csvs(c.test, cell_dir);
    }
    write_json(dir / "cells.json", cells);
    write_json(dir / "timings.json", timings);
    Json tables = Json::array();
    std::ostringstream text;
    for (const auto& t : result.tables) {
        tables.push_back(to_json(t));
        write_table(t, text);
        text << '\n';
    }
    write_json(dir / "tables.json", tables);
    std::ofstream out(dir / "tables.txt");
    out << text.str();
    if (!out) throw FormatError("cannot write " + (dir / "tables.txt").string());
    return result;
}

} // namespace wateruse
