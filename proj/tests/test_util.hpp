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

#include "wateruse/dataset.hpp"
#include "wateruse/matrix.hpp"
#include "wateruse/rng.hpp"
#include "wateruse/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace testutil {

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::path(WATERUSE_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct Toy {
    wateruse::Matrix x;
    std::vector<std::uint8_t> y;
};

/// Two uniform features on [0,1); label = x0 + x1 > 1, so the classes are
/// separable by a diagonal.
inline Toy diagonal_toy(std::size_t n, std::uint64_t seed) {
    auto rng = wateruse::make_rng(seed, {1});
    Toy t{wateruse::Matrix(n, 2), std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        t.x(i, 0) = wateruse::uniform01(rng);
        t.x(i, 1) = wateruse::uniform01(rng);
        t.y[i] = t.x(i, 0) + t.x(i, 1) > 1.0;
    }
    return t;
}

/// Same layout, labelled by quadrant parity.
inline Toy xor_toy(std::size_t n, std::uint64_t seed) {
    auto rng = wateruse::make_rng(seed, {2});
    Toy t{wateruse::Matrix(n, 2), std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        t.x(i, 0) = wateruse::uniform01(rng);
        t.x(i, 1) = wateruse::uniform01(rng);
        t.y[i] = (t.x(i, 0) > 0.5) != (t.x(i, 1) > 0.5);
    }
    return t;
}

inline std::vector<wateruse::FixtureConfig> default_configs() {
    return wateruse::load_sim_config(wateruse::default_config_path());
}

/// Split dataset over a short default-config simulation.
inline wateruse::WindowedDataset small_dataset(int days, std::size_t window, std::uint64_t seed) {
    const auto series = wateruse::simulate_household(default_configs(), days, seed);
    return wateruse::split_chronological(wateruse::window_series(series, window));
}

} // namespace testutil
