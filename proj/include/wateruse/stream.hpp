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

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace wateruse {

/// Online predictor over a ring buffer of the last W readings. Before W
/// readings have arrived the missing history is zero, matching the
/// left-padding of WindowedDataset, so a replayed series reproduces batch
/// predictions exactly.
class StreamPredictor {
public:
    explicit StreamPredictor(const MetaModel& model);

    /// Appends a reading and predicts the labels for the window ending at it.
    LabelVector push(double flow);
    std::size_t steps_seen() const { return seen_; }

private:
    const MetaModel& model_;
    std::vector<double> ring_;
    std::vector<double> window_;
    std::size_t head_ = 0;
    std::size_t seen_ = 0;
};

/// Parses one `flow` line; nullopt if it is not a finite number.
std::optional<double> parse_flow(std::string_view line);

struct StreamStats {
    std::size_t predicted = 0;
    std::size_t rejected = 0;
};

/// Reads one reading per line from `in` and writes `t,b0,b1,b2,b3,b4` per
/// accepted reading, where t counts accepted readings from 0. Blank lines
/// are skipped; other unparsable lines are reported on `diag` and skipped.
StreamStats run_stream(const MetaModel& model, std::istream& in, std::ostream& out,
                       std::ostream& diag);

} // namespace wateruse
