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

#include "wateruse/fixtures.hpp"

namespace wateruse {

namespace {
constexpr std::array<std::string_view, kFixtureCount> kNames{
    "toilet", "shower", "faucet", "clothes_washer", "dishwasher"};
}

std::string_view fixture_name(Fixture f) { return kNames[index_of(f)]; }

std::optional<Fixture> fixture_from_name(std::string_view name) {
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        if (kNames[k] == name) {
            return static_cast<Fixture>(k);
        }
    }
    return std::nullopt;
}

} // namespace wateruse
