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

// Central-difference gradient of the MLP loss, one parameter at a time.

#include "wateruse/neural.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

inline wateruse::neural::MlpParams numeric_gradient(const wateruse::neural::MlpParams& params,
                                                    wateruse::MatrixView x,
                                                    std::span<const std::uint8_t> y, double l2,
                                                    double eps) {
    using wateruse::neural::loss;
    auto grad = params;
    auto probe = params;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& w = probe.layers[l].weights.data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double saved = w[i];
            w[i] = saved + eps;
            const double up = loss(probe, x, y, l2);
            w[i] = saved - eps;
            const double down = loss(probe, x, y, l2);
            w[i] = saved;
            grad.layers[l].weights.data()[i] = (up - down) / (2.0 * eps);
        }
        auto& b = probe.layers[l].bias;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double saved = b[i];
            b[i] = saved + eps;
            const double up = loss(probe, x, y, l2);
            b[i] = saved - eps;
            const double down = loss(probe, x, y, l2);
            b[i] = saved;
            grad.layers[l].bias[i] = (up - down) / (2.0 * eps);
        }
    }
    return grad;
}

/// max |a - n| / max(|a|, |n|, floor) over every parameter.
inline double max_relative_error(const wateruse::neural::MlpParams& analytic,
                                 const wateruse::neural::MlpParams& numeric, double floor) {
    double worst = 0.0;
    auto visit = [&](double a, double n) {
        worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}));
    };
    for (std::size_t l = 0; l < analytic.layers.size(); ++l) {
        const auto& wa = analytic.layers[l].weights.data();
        const auto& wn = numeric.layers[l].weights.data();
        for (std::size_t i = 0; i < wa.size(); ++i) visit(wa[i], wn[i]);
        for (std::size_t i = 0; i < analytic.layers[l].bias.size(); ++i) {
            visit(analytic.layers[l].bias[i], numeric.layers[l].bias[i]);
        }
    }
    return worst;
}

} // namespace oracle
