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

#include "wateruse/dataset.hpp"
#include "wateruse/errors.hpp"
#include "wateruse/experiment.hpp"
#include "wateruse/metrics.hpp"
#include "wateruse/multilabel.hpp"
#include "wateruse/simulator.hpp"
#include "wateruse/stream.hpp"
#include "wateruse/trace_io.hpp"
#include "wateruse/tuning.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace wateruse;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataFormat = 2, kTrainingFailure = 3 };

Json read_json_arg(const std::string& arg) {
    std::string text = arg;
    if (arg.empty() || arg.front() != '{') {
        std::ifstream in(arg);
        if (!in) throw ConfigError("cannot read parameters file " + arg);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("parameters are not valid JSON: " + std::string(e.what()));
    }
}

LabelOrder parse_order(const std::string& arg) {
    std::vector<std::string> names;
    std::stringstream ss(arg);
    for (std::string name; std::getline(ss, name, ',');) names.push_back(name);
    return label_order_from_names(names);
}

void print_split(const WindowedDataset& ds) {
    for (auto s : {Split::Train, Split::Val, Split::Test}) {
        std::cout << split_name(s) << ' ' << ds.rows(s).size() << '\n';
    }
}

std::span<const LabelVector> labels_of(const WindowedDataset& ds, RowRange r) {
    return {ds.labels().data() + r.begin, r.size()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Water end-use simulation and multi-label disaggregation"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a household and write its trace CSV");
    std::string sim_config, sim_out;
    int sim_days = 180;
    int sim_step = kDefaultStepSeconds;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", sim_config, "Fixture configuration (INI)");
    sim->add_option("--days", sim_days, "Simulated days")->check(CLI::PositiveNumber);
    sim->add_option("--step", sim_step, "Step length in seconds")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Random seed")->required();
    sim->add_option("--out", sim_out, "Output trace CSV")->required();

    // window
    auto* win = app.add_subcommand("window", "Turn a trace CSV into a windowed dataset");
    std::string win_in, win_out, win_csv;
    std::size_t win_size = 0;
    win->add_option("--input", win_in, "Trace CSV")->required();
    win->add_option("--size", win_size, "Window size W in steps")->required()->check(CLI::PositiveNumber);
    win->add_option("--out", win_out, "Output dataset file")->required();
    win->add_option("--csv", win_csv, "Also export the samples as CSV");

    // split
    auto* spl = app.add_subcommand("split", "Tag a dataset with chronological train/val/test blocks");
    std::string spl_in, spl_out;
    spl->add_option("--in", spl_in, "Dataset file")->required();
    spl->add_option("--out", spl_out, "Output dataset file (default: overwrite input)");

    // train
    auto* trn = app.add_subcommand("train", "Fit a BR or CC model on the train split");
    std::string trn_data, trn_model = "gbt", trn_meta = "cc", trn_params, trn_out, trn_order;
    std::uint64_t trn_seed = 0;
    double trn_threshold = 0.5;
    trn->add_option("--data", trn_data, "Dataset file")->required();
    trn->add_option("--model", trn_model, "Base learner: rf, gbt or mlp");
    trn->add_option("--meta", trn_meta, "Multi-label method: br or cc");
    trn->add_option("--params", trn_params, "Hyperparameters as a JSON file or inline object");
    trn->add_option("--seed", trn_seed, "Random seed")->required();
    trn->add_option("--out", trn_out, "Output model JSON")->required();
    trn->add_option("--order", trn_order, "Chain order, comma-separated fixture names");
    trn->add_option("--threshold", trn_threshold, "Decision threshold");

    // tune
    auto* tun = app.add_subcommand("tune", "Random search scored on the validation split");
    std::string tun_data, tun_model = "gbt", tun_meta = "cc", tun_out, tun_space;
    std::size_t tun_window = 0, tun_budget = 20, tun_workers = 1;
    std::uint64_t tun_seed = 0;
    tun->add_option("--data", tun_data, "Split dataset file")->required();
    tun->add_option("--model", tun_model, "Base learner: rf, gbt or mlp");
    tun->add_option("--meta", tun_meta, "Multi-label method: br or cc");
    tun->add_option("--window", tun_window, "Window size (default: the dataset's)");
    tun->add_option("--budget", tun_budget, "Number of trials")->check(CLI::PositiveNumber);
    tun->add_option("--seed", tun_seed, "Random seed")->required();
    tun->add_option("--workers", tun_workers, "Parallel trials")->check(CLI::PositiveNumber);
    tun->add_option("--space", tun_space, "Search space JSON file (default: built-in)");
    tun->add_option("--out", tun_out, "Trial log JSON")->required();

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "Score a model on one split");
    std::string evl_model, evl_data, evl_split = "test", evl_json, evl_conf;
    evl->add_option("--model", evl_model, "Model JSON")->required();
    evl->add_option("--data", evl_data, "Dataset file")->required();
    evl->add_option("--split", evl_split, "train, val or test");
    evl->add_option("--json", evl_json, "Write the report as JSON");
    evl->add_option("--confusion-dir", evl_conf, "Write confusion CSVs to this directory");

    // predict
    auto* prd = app.add_subcommand("predict", "Stream predictions: one flow per stdin line");
    std::string prd_model;
    prd->add_option("--model", prd_model, "Model JSON")->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a preset and write comparison tables");
    std::string exp_preset, exp_out;
    std::size_t exp_workers = 0;
    exp->add_option("--preset", exp_preset, "smoke, desk, full or a JSON file")->required();
    exp->add_option("--out", exp_out, "Output directory (overrides the preset)");
    exp->add_option("--workers", exp_workers, "Parallel cells (overrides the preset)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            const auto cfgs = load_sim_config(sim_config.empty() ? default_config_path() : std::filesystem::path(sim_config));
            const auto series = simulate_household(cfgs, sim_days, sim_seed, sim_step);
            write_trace_csv(series, sim_out);
            const auto sizes = class_sizes(series);
            std::printf("steps %zu\nnone_active %zu\nany_active %zu\n", sizes.total_steps,
                        sizes.none_active, sizes.any_active);
            for (auto f : kAllFixtures) {
                std::printf("%s %zu (%.2f%% of active steps)\n", std::string(fixture_name(f)).c_str(),
                            sizes.per_fixture[index_of(f)], 100.0 * sizes.share_of_active(f));
            }
        } else if (*win) {
            const auto series = read_trace_csv(win_in);
            const auto ds = window_series(series, win_size);
            write_dataset(ds, win_out);
            if (!win_csv.empty()) {
                std::ofstream out(win_csv);
                export_dataset_csv(ds, out);
                if (!out) throw FormatError("cannot write " + win_csv);
            }
            std::cout << "rows " << ds.size() << " window " << ds.window() << '\n';
        } else if (*spl) {
            const auto ds = split_chronological(read_dataset(spl_in));
            write_dataset(ds, spl_out.empty() ? spl_in : spl_out);
            print_split(ds);
        } else if (*trn) {
            const auto ds = read_dataset(trn_data);
            BaseLearnerSpec spec{learner_kind_from_string(trn_model),
                                 trn_params.empty() ? Json::object() : read_json_arg(trn_params),
                                 trn_seed};
            const auto method = meta_method_from_string(trn_meta);
            const auto order = trn_order.empty() ? kCanonicalOrder : parse_order(trn_order);
            const auto model = fit_meta(ds, method, spec, order, trn_threshold);
            save_model(model, trn_out);
            std::cout << "trained " << display_name(spec.kind) << " (" << to_string(method)
                      << ") on " << ds.rows(Split::Train).size() << " rows, window "
                      << ds.window() << '\n';
        } else if (*tun) {
            auto ds = read_dataset(tun_data);
            if (tun_window != 0) ds = ds.with_window(tun_window);
            const SearchSpace space = tun_space.empty()
                                          ? SearchSpace::defaults(learner_kind_from_string(tun_model))
                                          : search_space_from_json(read_json_arg(tun_space));
            SearchOptions opt;
            opt.method = meta_method_from_string(tun_meta);
            opt.budget = tun_budget;
            opt.seed = tun_seed;
            opt.workers = tun_workers;
            const auto result = random_search(space, ds, opt);
            std::ofstream out(tun_out);
            out << to_json(result, space, opt, ds.window()).dump(2) << '\n';
            if (!out) throw FormatError("cannot write " + tun_out);
            std::cout << "best trial " << result.best_index << " f1_micro " << result.best_score
                      << '\n' << result.best_config.dump() << '\n';
        } else if (*evl) {
            const auto model = load_model(evl_model);
            auto ds = read_dataset(evl_data);
            if (ds.window() != model.window()) ds = ds.with_window(model.window());
            const RowRange rows = ds.rows(split_from_name(evl_split));
            const auto pred = model.predict(ds, rows);
            const auto report = evaluate_predictions(pred.labels, labels_of(ds, rows));
            write_text_report(report, std::cout);
            if (!evl_json.empty()) {
                std::ofstream out(evl_json);
                out << to_json(report).dump(2) << '\n';
                if (!out) throw FormatError("cannot write " + evl_json);
            }
            if (!evl_conf.empty()) write_confusion_csvs(report, evl_conf);
        } else if (*prd) {
            const auto model = load_model(prd_model);
            std::ios::sync_with_stdio(false);
            run_stream(model, std::cin, std::cout, std::cerr);
        } else if (*exp) {
            auto preset = load_preset(exp_preset);
            if (!exp_out.empty()) preset.output_dir = exp_out;
            if (exp_workers != 0) preset.workers = exp_workers;
            if (preset.empty()) {
                std::cout << "preset " << preset.name << " has no cells\n";
                return kOk;
            }
            const auto result = run_experiment(preset, &std::cerr);
            for (const auto& t : result.tables) {
                write_table(t, std::cout);
                std::cout << '\n';
            }
            if (result.failures() > 0) {
                std::cerr << result.failures() << " cell(s) failed\n";
                return kTrainingFailure;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const TrainingError& e) {
        std::cerr << "training failed: " << e.what() << '\n';
        return kTrainingFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataFormat;
    }
    return kOk;
}
