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
#include "wateruse/trace_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

namespace wateruse {

static_assert(std::endian::native == std::endian::little,
              "dataset container assumes a little-endian host");

std::string_view split_name(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    }
    return "train";
}

Split split_from_name(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw ConfigError("unknown split '" + std::string(name) + "'");
}

WindowedDataset::WindowedDataset(std::vector<double> aggregate, std::vector<LabelVector> labels,
                                 std::size_t window, int step_seconds, std::uint64_t seed)
    : window_(window), step_seconds_(step_seconds), seed_(seed) {
    if (aggregate.size() != labels.size()) {
        throw FormatError("aggregate and labels differ in length");
    }
    if (window < 1) {
        throw ConfigError("window size must be >= 1");
    }
    if (window > aggregate.size()) {
        throw ConfigError("window size " + std::to_string(window) + " exceeds series length " +
                          std::to_string(aggregate.size()));
    }
    train_end_ = val_end_ = aggregate.size();
    aggregate_ = std::make_shared<const std::vector<double>>(std::move(aggregate));
    labels_ = std::make_shared<const std::vector<LabelVector>>(std::move(labels));
}

void WindowedDataset::fill_row(std::size_t row, std::span<double> out) const {
    const auto& agg = *aggregate_;
    // Leading zeros for steps before the series start, then a contiguous copy.
    const std::size_t available = std::min(window_, row + 1);
    const std::size_t pad = window_ - available;
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(pad), 0.0);
    std::memcpy(out.data() + pad, agg.data() + (row + 1 - available), available * sizeof(double));
}

Split WindowedDataset::split_of(std::size_t row) const {
    if (row < train_end_) return Split::Train;
    if (row < val_end_) return Split::Val;
    return Split::Test;
}

RowRange WindowedDataset::rows(Split s) const {
    switch (s) {
    case Split::Train: return {0, train_end_};
    case Split::Val: return {train_end_, val_end_};
    case Split::Test: return {val_end_, size()};
    }
    return {};
}

void WindowedDataset::set_split_bounds(std::size_t train_end, std::size_t val_end) {
    if (train_end > val_end || val_end > size()) {
        throw FormatError("split bounds out of order");
    }
    train_end_ = train_end;
    val_end_ = val_end;
    split_ = true;
}

Matrix WindowedDataset::design_matrix(RowRange range, std::size_t extra_cols) const {
    if (range.end > size() || range.begin > range.end) {
        throw FormatError("row range out of bounds");
    }
    Matrix m(range.size(), window_ + extra_cols);
    for (std::size_t i = 0; i < range.size(); ++i) {
        fill_row(range.begin + i, m.row(i).first(window_));
    }
    return m;
}

WindowedDataset WindowedDataset::with_window(std::size_t window) const {
    if (window < 1 || window > size()) {
        throw ConfigError("window size " + std::to_string(window) + " out of range");
    }
    WindowedDataset ds = *this;
    ds.window_ = window;
    return ds;
}

WindowedDataset window_series(const HouseholdSeries& series, std::size_t window) {
    return WindowedDataset(series.aggregate, series.labels, window, series.step_seconds,
                           series.seed);
}

WindowedDataset split_chronological(WindowedDataset ds) {
    const std::size_t n = ds.size();
    const std::size_t train = n / 2;
    const std::size_t val = n / 4;
    if (train == 0 || val == 0 || n - train - val == 0) {
        throw ConfigError("dataset of " + std::to_string(n) + " rows is too small to split");
    }
    ds.set_split_bounds(train, train + val);
    return ds;
}

namespace {

constexpr char kMagic[4] = {'W', 'U', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) {
        throw FormatError("dataset file truncated");
    }
    return v;
}

} // namespace

void write_dataset(const WindowedDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::uint64_t>(out, ds.size());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.window()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.step_seconds()));
    put<std::uint64_t>(out, ds.seed());
    put<std::uint32_t>(out, kFixtureCount);
    for (Fixture f : kAllFixtures) {
        const auto name = fixture_name(f);
        put<std::uint8_t>(out, static_cast<std::uint8_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    put<std::uint8_t>(out, ds.is_split() ? 1 : 0);
    put<std::uint64_t>(out, ds.rows(Split::Train).end);
    put<std::uint64_t>(out, ds.rows(Split::Val).end);
    out.write(reinterpret_cast<const char*>(ds.aggregate().data()),
              static_cast<std::streamsize>(ds.size() * sizeof(double)));
    std::vector<std::uint8_t> bits(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        bits[i] = ds.label(i).bits();
    }
    out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (!out) {
        throw FormatError("write failed for " + path.string());
    }
}

WindowedDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open dataset " + path.string());
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError(path.string() + " is not a dataset file");
    }
    if (get<std::uint32_t>(in) != kVersion) {
        throw FormatError("unsupported dataset version");
    }
    const auto n = get<std::uint64_t>(in);
    const auto window = get<std::uint32_t>(in);
    const auto step_seconds = get<std::uint32_t>(in);
    const auto seed = get<std::uint64_t>(in);
    if (get<std::uint32_t>(in) != kFixtureCount) {
        throw FormatError("dataset label count must be 5");
    }
    for (Fixture f : kAllFixtures) {
        const auto len = get<std::uint8_t>(in);
        std::string name(len, '\0');
        in.read(name.data(), len);
        if (!in || name != fixture_name(f)) {
            throw FormatError("dataset label order differs from canonical order");
        }
    }
    const bool is_split = get<std::uint8_t>(in) != 0;
    const auto train_end = get<std::uint64_t>(in);
    const auto val_end = get<std::uint64_t>(in);

    std::vector<double> aggregate(n);
    in.read(reinterpret_cast<char*>(aggregate.data()), static_cast<std::streamsize>(n * sizeof(double)));
    std::vector<std::uint8_t> bits(n);
    in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(n));
    if (!in) {
        throw FormatError("dataset file truncated");
    }
    std::vector<LabelVector> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (bits[i] >> kFixtureCount) {
            throw FormatError("dataset row " + std::to_string(i + 1) + ": invalid label bits");
        }
        labels[i] = LabelVector(bits[i]);
    }
    WindowedDataset ds(std::move(aggregate), std::move(labels), window,
                       static_cast<int>(step_seconds), seed);
    if (is_split) {
        ds.set_split_bounds(train_end, val_end);
    }
    return ds;
}

void export_dataset_csv(const WindowedDataset& ds, std::ostream& out) {
    for (std::size_t c = 0; c < ds.window(); ++c) {
        out << 'x' << c << ',';
    }
    for (Fixture f : kAllFixtures) {
        out << fixture_name(f) << ',';
    }
    out << "split\n";
    std::vector<double> row(ds.window());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        ds.fill_row(i, row);
        for (double v : row) {
            out << format_double(v) << ',';
        }
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            out << (ds.label(i)[k] ? '1' : '0') << ',';
        }
        out << split_name(ds.split_of(i)) << '\n';
    }
}

Standardizer Standardizer::fit(MatrixView x) {
    Standardizer s;
    const std::size_t n = x.rows();
    s.mean.assign(x.cols(), 0.0);
    s.scale.assign(x.cols(), 1.0);
    if (n == 0) {
        return s;
    }
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            sum += x(r, c);
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = x(r, c) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        s.mean[c] = mean;
        // Constant columns pass through centred but unscaled.
        s.scale[c] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t c = 0; c < in.size(); ++c) {
        out[c] = (in[c] - mean[c]) / scale[c];
    }
}

} // namespace wateruse
