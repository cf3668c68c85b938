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

#include "wateruse/metrics.hpp"
#include "wateruse/multilabel.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wateruse {

/// A grid of (model, meta method, window, seed) cells over one simulated or
/// loaded dataset, and the files reporting it.
struct ExperimentPreset {
    std::string name = "custom";
    // Data: an existing dataset file, or a simulation of `days` days.
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> sim_config;
    int days = 21;
    std::uint64_t sim_seed = 1;

    std::vector<std::size_t> windows;
    std::vector<LearnerKind> models;
    std::vector<MetaMethod> metas;
    std::vector<std::uint64_t> seeds{1};
    /// Window used for the method and classifier comparisons per model.
    std::map<LearnerKind, std::size_t> comparison_windows{
        {LearnerKind::Forest, 60}, {LearnerKind::Gbt, 240}, {LearnerKind::Mlp, 120}};
    std::map<LearnerKind, Json> params;
    /// Per-window overrides merged over `params`.
    std::map<LearnerKind, std::map<std::size_t, Json>> window_params;
    LabelOrder order = kCanonicalOrder;
    double threshold = 0.5;
    std::size_t workers = 1;
    std::filesystem::path output_dir = "experiment_out";

    bool empty() const { return windows.empty() || models.empty() || metas.empty() || seeds.empty(); }
    void validate() const;
};

ExperimentPreset preset_from_json(const Json& j);
Json to_json(const ExperimentPreset& p);
/// `desk`, `smoke` or `full`.
ExperimentPreset builtin_preset(const std::string& name);
std::vector<std::string> builtin_preset_names();
/// A built-in name or a path to a JSON preset file.
ExperimentPreset load_preset(const std::string& name_or_path);

struct CellSpec {
    LearnerKind kind = LearnerKind::Gbt;
    MetaMethod method = MetaMethod::ClassifierChain;
    std::size_t window = 0;
    std::uint64_t seed = 0;

    std::string id() const; // e.g. gbt_cc_w120_s1
    friend auto operator<=>(const CellSpec&, const CellSpec&) = default;
};

struct CellResult {
    CellSpec spec;
    Json hyperparameters;
    bool ok = false;
    std::string error;
    MetricsReport test;
    double seconds = 0.0;
};

/// Columns of a report table; rows are Accuracy and F1-Micro, in percent.
struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::string> row_names;
    std::vector<std::vector<std::optional<double>>> values; // [row][column]
    std::vector<std::optional<double>> label_accuracy;       // per column
};

struct ExperimentResult {
    std::vector<CellResult> cells; // sorted by spec
    std::vector<ReportTable> tables;
    std::size_t failures() const;
};

/// Cells implied by a preset: every model x meta x window x seed, plus both
/// methods at each model's comparison window.
std::vector<CellSpec> plan_cells(const ExperimentPreset& preset);

/// Runs every cell, writes the reports under preset.output_dir and returns
/// the results. A failing cell is recorded and the run continues. An empty
/// preset does nothing.
ExperimentResult run_experiment(const ExperimentPreset& preset, std::ostream* log = nullptr);

std::vector<ReportTable> build_tables(const ExperimentPreset& preset,
                                      const std::vector<CellResult>& cells);
void write_table(const ReportTable& t, std::ostream& out);
Json to_json(const ReportTable& t);

} // namespace wateruse
