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

#include "wateruse/errors.hpp"
#include "wateruse/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace wateruse {

std::size_t steps_for(int days, int step_seconds) {
    if (days < 1) {
        throw ConfigError("days must be >= 1");
    }
    if (step_seconds < 1 || 3600 % step_seconds != 0) {
        throw ConfigError("step_seconds must be a positive divisor of 3600");
    }
    return static_cast<std::size_t>(days) * (kSecondsPerDay / step_seconds);
}

namespace {

// Lengths of the template phases after stretching the template to
// `event_steps` steps. Every phase keeps at least one step.
std::vector<std::size_t> scaled_phase_lengths(const std::vector<CyclePhase>& phases,
                                              std::size_t event_steps) {
    double template_steps = 0.0;
    for (const auto& p : phases) {
        template_steps += p.duration_steps;
    }
    std::vector<std::size_t> lengths;
    lengths.reserve(phases.size());
    const double scale = static_cast<double>(event_steps) / template_steps;
    for (const auto& p : phases) {
        const auto len = std::llround(p.duration_steps * scale);
        lengths.push_back(static_cast<std::size_t>(std::max<long long>(1, len)));
    }
    return lengths;
}

void add_event(std::vector<double>& flow, std::size_t start, std::size_t steps, double intensity,
               const std::vector<CyclePhase>& phases) {
    const std::size_t T = flow.size();
    if (phases.empty()) {
        const std::size_t end = std::min(T, start + steps);
        for (std::size_t t = start; t < end; ++t) {
            flow[t] += intensity;
        }
        return;
    }
    const auto lengths = scaled_phase_lengths(phases, steps);
    std::size_t t = start;
    for (std::size_t p = 0; p < phases.size() && t < T; ++p) {
        const std::size_t end = std::min(T, t + lengths[p]);
        const double rate = intensity * phases[p].flow_fraction;
        if (rate > 0.0) {
            for (std::size_t s = t; s < end; ++s) {
                flow[s] += rate;
            }
        }
        t = end;
    }
}

} // namespace

FixtureTrace simulate_fixture(const FixtureConfig& cfg, int days, int step_seconds, Rng& rng) {
    cfg.validate();
    const std::size_t T = steps_for(days, step_seconds);
    FixtureTrace trace{cfg.fixture, std::vector<double>(T, 0.0)};
    if (cfg.uses_per_day == 0.0) {
        return trace;
    }

    // Thinning: candidates arrive at the peak hourly rate and are kept with
    // probability weight(hour) / peak weight, which yields the hour-of-day
    // modulated rate uses_per_day * weight(hour) / sum(weights) per hour.
    const auto& w = cfg.diurnal_weights;
    double weight_sum = 0.0;
    double weight_max = 0.0;
    for (double x : w) {
        weight_sum += x;
        weight_max = std::max(weight_max, x);
    }
    const double peak_rate_per_hour = cfg.uses_per_day * weight_max / weight_sum;
    const double horizon_hours = static_cast<double>(days) * 24.0;
    const double steps_per_hour = 3600.0 / step_seconds;

    std::exponential_distribution<double> gap(peak_rate_per_hour);
    std::lognormal_distribution<double> duration(cfg.duration.mu, cfg.duration.sigma);
    std::lognormal_distribution<double> intensity(cfg.intensity.mu, cfg.intensity.sigma);

    std::size_t last_launch = T; // sentinel: nothing launched yet
    double hours = 0.0;
    while (true) {
        hours += gap(rng);
        if (hours >= horizon_hours) {
            break;
        }
        const auto hour_of_day = static_cast<std::size_t>(std::fmod(hours, 24.0));
        if (uniform01(rng) * weight_max >= w[std::min<std::size_t>(hour_of_day, 23)]) {
            continue;
        }
        const auto step = std::min(T - 1, static_cast<std::size_t>(hours * steps_per_hour));
        // At most one launch per fixture per step.
        if (step == last_launch) {
            continue;
        }
        last_launch = step;

        const double seconds = duration(rng);
        const auto drawn = static_cast<long long>(std::llround(seconds / step_seconds));
        const auto steps =
            static_cast<std::size_t>(std::max<long long>(cfg.min_duration_steps, drawn));
        add_event(trace.flow, step, steps, intensity(rng), cfg.cycle_template);
    }
    return trace;
}

void recompute_aggregate(HouseholdSeries& series) {
    const std::size_t T = series.traces[0].flow.size();
    for (const auto& tr : series.traces) {
        if (tr.flow.size() != T) {
            throw FormatError("fixture traces differ in length");
        }
    }
    series.aggregate.assign(T, 0.0);
    series.labels.assign(T, LabelVector{});
    std::array<double, kFixtureCount> row{};
    for (std::size_t t = 0; t < T; ++t) {
        LabelVector label;
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            row[k] = series.traces[k].flow[t];
            label.set(k, row[k] > 0.0);
        }
        series.aggregate[t] = sum_flows(row);
        series.labels[t] = label;
    }
}

HouseholdSeries simulate_household(std::span<const FixtureConfig> cfgs, int days,
                                   std::uint64_t seed, int step_seconds) {
    if (cfgs.size() != kFixtureCount) {
        throw ConfigError("expected 5 fixture configs, got " + std::to_string(cfgs.size()));
    }
    HouseholdSeries series;
    series.step_seconds = step_seconds;
    series.seed = seed;
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        if (cfgs[k].fixture != kAllFixtures[k]) {
            throw ConfigError("fixture configs must be in canonical order");
        }
        Rng rng = make_rng(seed, {0x5349ULL, k});
        series.traces[k] = simulate_fixture(cfgs[k], days, step_seconds, rng);
    }
    recompute_aggregate(series);
    return series;
}

double ClassSizes::share_of_active(Fixture f) const {
    if (any_active == 0) {
        return 0.0;
    }
    return static_cast<double>(per_fixture[index_of(f)]) / static_cast<double>(any_active);
}

ClassSizes class_sizes(const HouseholdSeries& series) {
    ClassSizes sizes;
    sizes.total_steps = series.size();
    for (const auto& label : series.labels) {
        if (label.any()) {
            ++sizes.any_active;
        } else {
            ++sizes.none_active;
        }
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            sizes.per_fixture[k] += label[k] ? 1 : 0;
        }
    }
    return sizes;
}

} // namespace wateruse
