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

#include "wateruse/fixtures.hpp"
#include "wateruse/matrix.hpp"
#include "wateruse/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

namespace wateruse {

enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

/// Half-open row range [begin, end).
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

/// Sliding-window samples over an aggregate meter series.
///
/// Row t holds the aggregate at steps t-W+1 .. t (oldest first), with zeros
/// for steps before the series starts, so there is one sample per step. The
/// feature matrix is not stored: it is read through `feature()` or
/// materialized for a row range with `design_matrix()`.
///
/// Split tags are chronological blocks train -> val -> test. A dataset that
/// was never split tags every row as train.
class WindowedDataset {
public:
    WindowedDataset() = default;
    WindowedDataset(std::vector<double> aggregate, std::vector<LabelVector> labels,
                    std::size_t window, int step_seconds = kDefaultStepSeconds,
                    std::uint64_t seed = 0);

    std::size_t size() const { return aggregate_->size(); }
    std::size_t window() const { return window_; }
    int step_seconds() const { return step_seconds_; }
    std::uint64_t seed() const { return seed_; }

    double feature(std::size_t row, std::size_t col) const {
        const std::size_t back = window_ - 1 - col;
        return row >= back ? (*aggregate_)[row - back] : 0.0;
    }
    void fill_row(std::size_t row, std::span<double> out) const;

    const std::vector<double>& aggregate() const { return *aggregate_; }
    const std::vector<LabelVector>& labels() const { return *labels_; }
    LabelVector label(std::size_t row) const { return (*labels_)[row]; }

    Split split_of(std::size_t row) const;
    RowRange rows(Split s) const;
    bool is_split() const { return split_; }
    void set_split_bounds(std::size_t train_end, std::size_t val_end);

    /// Features of `range` in a rows x (W + extra_cols) matrix; the extra
    /// trailing columns are zero-filled for callers to augment.
    Matrix design_matrix(RowRange range, std::size_t extra_cols = 0) const;

    /// Same series and split, different window size.
    WindowedDataset with_window(std::size_t window) const;

private:
    // Shared so re-windowing reuses the series without a copy.
    std::shared_ptr<const std::vector<double>> aggregate_ =
        std::make_shared<const std::vector<double>>();
    std::shared_ptr<const std::vector<LabelVector>> labels_ =
        std::make_shared<const std::vector<LabelVector>>();
    std::size_t window_ = 1;
    int step_seconds_ = kDefaultStepSeconds;
    std::uint64_t seed_ = 0;
    bool split_ = false;
    std::size_t train_end_ = 0;
    std::size_t val_end_ = 0;
};

WindowedDataset window_series(const HouseholdSeries& series, std::size_t window);

/// Chronological split: first floor(N/2) rows train, next floor(N/4) val,
/// the remainder test.
WindowedDataset split_chronological(WindowedDataset ds);

/// Binary container, little-endian:
///   "WUDS" | u32 version | u64 N | u32 W | u32 step_seconds | u64 seed
///   | u32 label count | per label: u8 length + name bytes
///   | u8 split flag | u64 train_end | u64 val_end
///   | f64[N] aggregate | u8[N] label bits (bit k = label k)
void write_dataset(const WindowedDataset& ds, const std::filesystem::path& path);
WindowedDataset read_dataset(const std::filesystem::path& path);

/// CSV export: x0..x{W-1}, the five labels and the split tag per row.
void export_dataset_csv(const WindowedDataset& ds, std::ostream& out);

/// Per-column mean and standard deviation, for MLP inputs.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(MatrixView x);
    void apply(std::span<const double> in, std::span<double> out) const;
};

} // namespace wateruse
