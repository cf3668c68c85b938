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

#include "wateruse/errors.hpp"
#include "wateruse/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace wateruse {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_trace_csv(const HouseholdSeries& series, std::ostream& out) {
    out << kTraceHeader << '\n';
    const std::size_t T = series.size();
    std::string line;
    for (std::size_t t = 0; t < T; ++t) {
        line.clear();
        line += std::to_string(static_cast<std::uint64_t>(t) * series.step_seconds);
        for (const auto& trace : series.traces) {
            line += ',';
            line += format_double(trace.flow[t]);
        }
        line += ',';
        line += format_double(series.aggregate[t]);
        line += '\n';
        out << line;
    }
}

void write_trace_csv(const HouseholdSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    write_trace_csv(series, out);
    if (!out) {
        throw FormatError("write failed for " + path.string());
    }
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t row, const char* what) {
    T value{};
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw FormatError("trace row " + std::to_string(row) + ": bad " + what + " '" +
                          std::string(field) + "'");
    }
    return value;
}

} // namespace

HouseholdSeries read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("trace CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kTraceHeader) {
        throw FormatError(std::string("trace CSV header must be '") + kTraceHeader + "'");
    }

    HouseholdSeries series;
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        series.traces[k].fixture = kAllFixtures[k];
    }
    std::vector<std::uint64_t> times;
    std::size_t row = 0;
    std::array<double, kFixtureCount> flows{};
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        ++row;
        std::array<std::string_view, kFixtureCount + 2> fields;
        std::size_t n = 0;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            if (n == fields.size()) {
                throw FormatError("trace row " + std::to_string(row) + ": too many columns");
            }
            fields[n++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (n != fields.size()) {
            throw FormatError("trace row " + std::to_string(row) + ": expected 7 columns");
        }
        const auto t = parse_field<std::uint64_t>(fields[0], row, "timestamp");
        if (!times.empty() && t <= times.back()) {
            throw FormatError("trace row " + std::to_string(row) + ": non-monotone timestamps");
        }
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            flows[k] = parse_field<double>(fields[k + 1], row, "flow");
            if (!(flows[k] >= 0.0) || !std::isfinite(flows[k])) {
                throw FormatError("trace row " + std::to_string(row) + ": negative flow");
            }
            series.traces[k].flow.push_back(flows[k]);
        }
        const double total = parse_field<double>(fields[kFixtureCount + 1], row, "total");
        if (!(std::abs(total - sum_flows(flows)) <= 1e-9)) {
            throw FormatError("trace row " + std::to_string(row) + ": total differs from row sum");
        }
        series.aggregate.push_back(total);
        times.push_back(t);
    }
    if (times.empty()) {
        throw FormatError("trace CSV has no rows");
    }

    std::uint64_t step = kDefaultStepSeconds;
    if (times.size() > 1) {
        step = times[1] - times[0];
        for (std::size_t i = 2; i < times.size(); ++i) {
            if (times[i] - times[i - 1] != step) {
                throw FormatError("trace row " + std::to_string(i + 1) + ": irregular timestamps");
            }
        }
    }
    series.step_seconds = static_cast<int>(step);

    series.labels.resize(series.aggregate.size());
    for (std::size_t t = 0; t < series.aggregate.size(); ++t) {
        LabelVector label;
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            label.set(k, series.traces[k].flow[t] > 0.0);
        }
        series.labels[t] = label;
    }
    return series;
}

HouseholdSeries read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open trace " + path.string());
    }
    return read_trace_csv(in);
}

} // namespace wateruse
