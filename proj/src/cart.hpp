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

#include "presort.hpp"
#include "wateruse/trees.hpp"

namespace wateruse::trees::detail {

/// Grows one tree on presorted columns. Rows with zero sample weight are
/// ignored, which is how bootstrap resamples reuse one presort.
DecisionTree grow_tree(MatrixView x, std::span<const std::uint8_t> y,
                       std::span<const double> sample_weights,
                       const wateruse::detail::SortedColumns& sorted, const TreeParams& params,
                       std::uint64_t seed);

} // namespace wateruse::trees::detail
