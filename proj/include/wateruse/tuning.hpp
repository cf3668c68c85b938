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

#include "wateruse/multilabel.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wateruse {

/// One hyperparameter and the finite set of values it may take.
struct Dimension {
    std::string name;
    std::vector<Json> values;
};

/// Product space of discrete dimensions; a point is a flat JSON object in
/// the hyperparameter format of `kind`.
struct SearchSpace {
    LearnerKind kind = LearnerKind::Gbt;
    std::vector<Dimension> dimensions;

    /// Default ranges for each learner kind.
    static SearchSpace defaults(LearnerKind kind);

    Json sample(Rng& rng) const;
    bool contains(const Json& point) const;
    /// Throws ConfigError on an empty dimension or a point that fails validation.
    void validate() const;
};

Json to_json(const SearchSpace& s);
SearchSpace search_space_from_json(const Json& j);

struct TrialRecord {
    std::size_t index = 0;
    Json config;
    double f1_micro = 0.0;
    double fit_seconds = 0.0;
    std::uint64_t seed = 0;
    std::string error; // empty unless the trial failed
};

struct SearchResult {
    std::size_t best_index = 0;
    Json best_config;
    double best_score = 0.0;
    std::vector<TrialRecord> trials; // by trial index
};

struct SearchOptions {
    MetaMethod method = MetaMethod::ClassifierChain;
    std::size_t budget = 20;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    LabelOrder order = kCanonicalOrder;
    double threshold = 0.5;
};

/// Samples `budget` points, fits each on the train split and scores F1-micro
/// on the validation split. Ties go to the earliest trial; a trial whose
/// training fails scores 0.
SearchResult random_search(const SearchSpace& space, const WindowedDataset& ds,
                           const SearchOptions& options);

Json to_json(const SearchResult& r, const SearchSpace& space, const SearchOptions& options,
             std::size_t window);

} // namespace wateruse
