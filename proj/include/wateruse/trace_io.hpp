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

#include "wateruse/simulator.hpp"

#include <filesystem>
#include <iosfwd>

namespace wateruse {

/// Header of the trace CSV: t in seconds, five fixture flows, total.
inline constexpr const char* kTraceHeader = "t,toilet,shower,faucet,clothes_washer,dishwasher,total";

/// Shortest decimal literal that parses back to exactly `v`.
std::string format_double(double v);

void write_trace_csv(const HouseholdSeries& series, std::ostream& out);
void write_trace_csv(const HouseholdSeries& series, const std::filesystem::path& path);

/// Reads and validates a trace CSV. Rejects a malformed header, non-monotone
/// or irregular timestamps, negative flows and totals that differ from the
/// row sum by more than 1e-9. Errors name the 1-based data row.
HouseholdSeries read_trace_csv(std::istream& in);
HouseholdSeries read_trace_csv(const std::filesystem::path& path);

} // namespace wateruse
