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

#include "wateruse/matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace wateruse::detail {

/// Per-column row order by ascending value (ties by row index), with the
/// values stored alongside so split scans stay sequential in memory.
struct SortedColumns {
    struct Entry {
        double value;
        std::uint32_t row;
    };
    std::vector<std::vector<Entry>> columns;

    static SortedColumns build(MatrixView x) {
        SortedColumns s;
        s.columns.resize(x.cols());
        std::vector<std::uint32_t> idx(x.rows());
        std::vector<double> col(x.rows());
        for (std::size_t c = 0; c < x.cols(); ++c) {
            for (std::size_t r = 0; r < x.rows(); ++r) {
                col[r] = x(r, c);
            }
            std::iota(idx.begin(), idx.end(), 0U);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
            auto& out = s.columns[c];
            out.resize(x.rows());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                out[i] = {col[idx[i]], idx[i]};
            }
        }
        return s;
    }
};

/// Split point strictly between two distinct sorted values such that
/// `lo <= t < hi`.
inline double midpoint_threshold(double lo, double hi) {
    const double mid = lo + (hi - lo) * 0.5;
    return mid < hi ? mid : lo;
}

} // namespace wateruse::detail
