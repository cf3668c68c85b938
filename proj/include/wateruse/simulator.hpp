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

#include "wateruse/fixtures.hpp"
#include "wateruse/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wateruse {

inline constexpr int kSecondsPerDay = 86400;
inline constexpr int kDefaultStepSeconds = 10;

struct LogNormal {
    double mu = 0.0;
    double sigma = 0.0;
};

/// One phase of a multi-phase appliance cycle. Phases with zero flow model
/// the idle gaps of intermittent appliances.
struct CyclePhase {
    int duration_steps = 1;
    double flow_fraction = 1.0;
};

/// Generative parameters of one fixture.
///
/// Durations are log-normal in seconds, intensities log-normal in liters per
/// step. When a cycle template is present an event's drawn duration is split
/// across the phases in proportion to their template lengths.
struct FixtureConfig {
    Fixture fixture = Fixture::Toilet;
    double uses_per_day = 0.0;
    std::array<double, 24> diurnal_weights{};
    LogNormal duration;
    LogNormal intensity;
    std::vector<CyclePhase> cycle_template;
    int min_duration_steps = 1;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

struct FixtureTrace {
    Fixture fixture = Fixture::Toilet;
    std::vector<double> flow; // liters per step
};

/// Per-fixture traces plus the aggregate meter signal and activity labels.
struct HouseholdSeries {
    int step_seconds = kDefaultStepSeconds;
    std::array<FixtureTrace, kFixtureCount> traces;
    std::vector<double> aggregate;
    std::vector<LabelVector> labels;
    std::uint64_t seed = 0;

    std::size_t size() const { return aggregate.size(); }
};

/// Sum of the five fixture flows, always accumulated in canonical order so
/// every producer and checker of an aggregate gets bit-identical values.
inline double sum_flows(std::span<const double, kFixtureCount> flows) {
    double total = flows[0];
    for (std::size_t k = 1; k < kFixtureCount; ++k) {
        total += flows[k];
    }
    return total;
}

std::size_t steps_for(int days, int step_seconds);

/// Parses the INI-style simulator config. Returns the five fixtures in
/// canonical order.
std::vector<FixtureConfig> load_sim_config(const std::filesystem::path& path);
std::vector<FixtureConfig> parse_sim_config(const std::string& text);
std::string format_sim_config(std::span<const FixtureConfig> cfgs);

/// Path of the config shipped with the project.
std::filesystem::path default_config_path();

FixtureTrace simulate_fixture(const FixtureConfig& cfg, int days, int step_seconds, Rng& rng);

HouseholdSeries simulate_household(std::span<const FixtureConfig> cfgs, int days,
                                   std::uint64_t seed,
                                   int step_seconds = kDefaultStepSeconds);

/// Rebuilds aggregate and labels from the traces.
void recompute_aggregate(HouseholdSeries& series);

/// Steps per class, as used for class-size summaries.
struct ClassSizes {
    std::size_t total_steps = 0;
    std::size_t none_active = 0;
    std::size_t any_active = 0;
    std::array<std::size_t, kFixtureCount> per_fixture{};

    /// Share of fixture k's active steps among steps with any fixture active.
    double share_of_active(Fixture f) const;
};

ClassSizes class_sizes(const HouseholdSeries& series);

} // namespace wateruse
