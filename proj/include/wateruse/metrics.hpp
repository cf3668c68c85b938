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
#include "wateruse/fixtures.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wateruse {

/// Counts pooled over every (row, label) cell.
struct MicroCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const MicroCounts&, const MicroCounts&) = default;
};

/// One-vs-rest 2x2 matrix. Rows are actual {active, inactive}, columns are
/// predicted {active, inactive}: counts[0][0] = TP, [0][1] = FN,
/// [1][0] = FP, [1][1] = TN.
struct BinaryConfusion {
    std::array<std::array<std::uint64_t, 2>, 2> counts{};

    std::uint64_t tp() const { return counts[0][0]; }
    std::uint64_t fn() const { return counts[0][1]; }
    std::uint64_t fp() const { return counts[1][0]; }
    std::uint64_t tn() const { return counts[1][1]; }
    std::uint64_t total() const { return tp() + fn() + fp() + tn(); }
    friend bool operator==(const BinaryConfusion&, const BinaryConfusion&) = default;
};

MicroCounts micro_counts(std::span<const LabelVector> pred, std::span<const LabelVector> truth);

/// 0/0 is taken as 0.
double precision(const MicroCounts& c);
double recall(const MicroCounts& c);
/// Harmonic mean of precision and recall, 0 when both are 0.
double f1_from_counts(const MicroCounts& c);

double precision(std::span<const LabelVector> pred, std::span<const LabelVector> truth);
double recall(std::span<const LabelVector> pred, std::span<const LabelVector> truth);
double f1_micro(std::span<const LabelVector> pred, std::span<const LabelVector> truth);
double subset_accuracy(std::span<const LabelVector> pred, std::span<const LabelVector> truth);
std::array<double, kFixtureCount> per_label_accuracy(std::span<const LabelVector> pred,
                                                     std::span<const LabelVector> truth);
std::array<BinaryConfusion, kFixtureCount> one_vs_rest_confusions(
    std::span<const LabelVector> pred, std::span<const LabelVector> truth);

/// Single-class view of a label vector: the first active fixture in
/// canonical order, or kNoneClass when nothing is active.
inline constexpr std::size_t kNoneClass = kFixtureCount;
inline constexpr std::size_t kDominantClasses = kFixtureCount + 1;
std::size_t dominant_class(LabelVector v);
std::string dominant_class_name(std::size_t c);

using MulticlassConfusion =
    std::array<std::array<std::uint64_t, kDominantClasses>, kDominantClasses>;
/// Rows actual, columns predicted, classes as in dominant_class().
MulticlassConfusion dominant_confusion(std::span<const LabelVector> pred,
                                       std::span<const LabelVector> truth);

struct MetricsReport {
    std::size_t rows = 0;
    double f1_micro = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double subset_accuracy = 0.0;
    std::array<double, kFixtureCount> per_label_accuracy{};
    double mean_label_accuracy = 0.0;
    MicroCounts counts;
    std::array<BinaryConfusion, kFixtureCount> per_class_confusion{};
    MulticlassConfusion dominant{};
};

MetricsReport evaluate_predictions(std::span<const LabelVector> pred,
                                   std::span<const LabelVector> truth);

Json to_json(const MetricsReport& r);
void write_text_report(const MetricsReport& r, std::ostream& out);

/// Writes confusion_<fixture>.csv for every label plus confusion_dominant.csv.
void write_confusion_csvs(const MetricsReport& r, const std::filesystem::path& dir);

} // namespace wateruse
