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

#include "wateruse/stream.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace wateruse {

StreamPredictor::StreamPredictor(const MetaModel& model)
    : model_(model), ring_(model.window(), 0.0), window_(model.window(), 0.0) {}

LabelVector StreamPredictor::push(double flow) {
    const std::size_t w = ring_.size();
    ring_[head_] = flow;
    head_ = (head_ + 1) % w;
    ++seen_;
    // Oldest reading first, as in a dataset row.
    for (std::size_t i = 0; i < w; ++i) {
        window_[i] = ring_[(head_ + i) % w];
    }
    const MatrixView x(window_.data(), 1, w, w);
    return model_.predict(x).labels.front();
}

std::optional<double> parse_flow(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return std::nullopt;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

StreamStats run_stream(const MetaModel& model, std::istream& in, std::ostream& out,
                       std::ostream& diag) {
    StreamPredictor predictor(model);
    StreamStats stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto flow = parse_flow(line);
        if (!flow) {
            diag << "line " << line_no << ": not a number: '" << line << "'\n";
            ++stats.rejected;
            continue;
        }
        const LabelVector bits = predictor.push(*flow);
        out << stats.predicted;
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            out << ',' << (bits[k] ? '1' : '0');
        }
        out << '\n';
        ++stats.predicted;
    }
    out.flush();
    return stats;
}

} // namespace wateruse
