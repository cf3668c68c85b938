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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace wateruse {

inline constexpr std::size_t kFixtureCount = 5;

/// Water end-use fixtures in canonical column order.
enum class Fixture : std::uint8_t {
    Toilet = 0,
    Shower = 1,
    Faucet = 2,
    ClothesWasher = 3,
    Dishwasher = 4,
};

inline constexpr std::array<Fixture, kFixtureCount> kAllFixtures{
    Fixture::Toilet, Fixture::Shower, Fixture::Faucet, Fixture::ClothesWasher,
    Fixture::Dishwasher};

std::string_view fixture_name(Fixture f);
std::optional<Fixture> fixture_from_name(std::string_view name);

constexpr std::size_t index_of(Fixture f) { return static_cast<std::size_t>(f); }

/// Activity bits for the five fixtures, bit k for fixture k.
class LabelVector {
public:
    constexpr LabelVector() = default;
    constexpr explicit LabelVector(std::uint8_t bits) : bits_(bits & kMask) {}

    constexpr bool operator[](std::size_t k) const { return (bits_ >> k) & 1U; }
    constexpr void set(std::size_t k, bool on) {
        bits_ = on ? static_cast<std::uint8_t>(bits_ | (1U << k))
                   : static_cast<std::uint8_t>(bits_ & ~(1U << k));
    }
    constexpr bool any() const { return bits_ != 0; }
    constexpr std::uint8_t bits() const { return bits_; }

    friend constexpr bool operator==(LabelVector, LabelVector) = default;

private:
    static constexpr std::uint8_t kMask = (1U << kFixtureCount) - 1;
    std::uint8_t bits_ = 0;
};

} // namespace wateruse
