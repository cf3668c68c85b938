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

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace wateruse {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

double parse_real(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError("config key " + key + ": not a number '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(const std::string& key, std::string_view text) {
    int v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key " + key + ": not an integer '" + std::string(text) + "'");
    }
    return v;
}

using Section = std::map<std::string, std::string>;

const std::string& require(const Section& section, const std::string& fixture,
                           const std::string& key) {
    auto it = section.find(key);
    if (it == section.end()) {
        throw ConfigError("config key " + fixture + "." + key + " missing");
    }
    return it->second;
}

FixtureConfig build_fixture(Fixture f, const Section& section) {
    static const std::vector<std::string> known{
        "uses_per_day",    "diurnal_weights", "duration_mu",        "duration_sigma",
        "intensity_mu",    "intensity_sigma", "min_duration_steps", "cycle_template"};
    const std::string name(fixture_name(f));
    for (const auto& [key, value] : section) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("config key " + name + "." + key + " unknown");
        }
    }

    FixtureConfig cfg;
    cfg.fixture = f;
    cfg.uses_per_day = parse_real(name + ".uses_per_day", require(section, name, "uses_per_day"));

    const auto weights = split_tokens(require(section, name, "diurnal_weights"));
    if (weights.size() != 24) {
        throw ConfigError("config key " + name + ".diurnal_weights needs 24 values, got " +
                          std::to_string(weights.size()));
    }
    for (std::size_t h = 0; h < 24; ++h) {
        cfg.diurnal_weights[h] = parse_real(name + ".diurnal_weights", weights[h]);
    }
    cfg.duration.mu = parse_real(name + ".duration_mu", require(section, name, "duration_mu"));
    cfg.duration.sigma =
        parse_real(name + ".duration_sigma", require(section, name, "duration_sigma"));
    cfg.intensity.mu = parse_real(name + ".intensity_mu", require(section, name, "intensity_mu"));
    cfg.intensity.sigma =
        parse_real(name + ".intensity_sigma", require(section, name, "intensity_sigma"));
    cfg.min_duration_steps =
        parse_int(name + ".min_duration_steps", require(section, name, "min_duration_steps"));

    if (auto it = section.find("cycle_template"); it != section.end()) {
        for (const auto& phase : split_tokens(it->second)) {
            const auto colon = phase.find(':');
            if (colon == std::string::npos) {
                throw ConfigError("config key " + name +
                                  ".cycle_template: phase must be steps:fraction, got '" +
                                  phase + "'");
            }
            cfg.cycle_template.push_back(
                {parse_int(name + ".cycle_template", std::string_view(phase).substr(0, colon)),
                 parse_real(name + ".cycle_template",
                            std::string_view(phase).substr(colon + 1))});
        }
    }
    cfg.validate();
    return cfg;
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

void FixtureConfig::validate() const {
    const std::string name(fixture_name(fixture));
    auto fail = [&](const std::string& key, const std::string& what) {
        throw ConfigError("config key " + name + "." + key + " " + what);
    };
    if (!(uses_per_day >= 0.0) || !std::isfinite(uses_per_day)) {
        fail("uses_per_day", "must be a nonnegative number");
    }
    double weight_sum = 0.0;
    for (double w : diurnal_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            fail("diurnal_weights", "must be nonnegative");
        }
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) {
        fail("diurnal_weights", "must have a positive sum");
    }
    if (!std::isfinite(duration.mu)) {
        fail("duration_mu", "must be finite");
    }
    if (!(duration.sigma >= 0.0) || !std::isfinite(duration.sigma)) {
        fail("duration_sigma", "must be nonnegative");
    }
    if (!std::isfinite(intensity.mu)) {
        fail("intensity_mu", "must be finite");
    }
    if (!(intensity.sigma >= 0.0) || !std::isfinite(intensity.sigma)) {
        fail("intensity_sigma", "must be nonnegative");
    }
    if (min_duration_steps < 1) {
        fail("min_duration_steps", "must be a positive integer");
    }
    if (!cycle_template.empty()) {
        bool any_flow = false;
        for (const auto& phase : cycle_template) {
            if (phase.duration_steps < 1) {
                fail("cycle_template", "phase durations must be >= 1");
            }
            if (!(phase.flow_fraction >= 0.0 && phase.flow_fraction <= 1.0)) {
                fail("cycle_template", "flow fractions must lie in [0,1]");
            }
            any_flow = any_flow || phase.flow_fraction > 0.0;
        }
        if (!any_flow) {
            fail("cycle_template", "needs at least one phase with positive flow");
        }
    }
}

std::vector<FixtureConfig> parse_sim_config(const std::string& text) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string line;
    std::string current;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string s = trim(line);
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            }
            current = trim(std::string_view(s).substr(1, s.size() - 2));
            if (!fixture_from_name(current)) {
                throw ConfigError("config section [" + current + "] is not a known fixture");
            }
            if (sections.contains(current)) {
                throw ConfigError("fixture " + current + " defined twice");
            }
            sections[current];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos || current.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value inside a fixture section");
        }
        const std::string key = trim(std::string_view(s).substr(0, eq));
        if (sections[current].contains(key)) {
            throw ConfigError("config key " + current + "." + key + " repeated");
        }
        sections[current][key] = trim(std::string_view(s).substr(eq + 1));
    }

    std::vector<FixtureConfig> cfgs;
    for (Fixture f : kAllFixtures) {
        auto it = sections.find(std::string(fixture_name(f)));
        if (it == sections.end()) {
            throw ConfigError("fixture " + std::string(fixture_name(f)) + " absent");
        }
        cfgs.push_back(build_fixture(f, it->second));
    }
    return cfgs;
}

std::vector<FixtureConfig> load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open simulator config " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sim_config(ss.str());
}

std::string format_sim_config(std::span<const FixtureConfig> cfgs) {
    std::ostringstream out;
    out << "# flow unit: liters per step\n";
    for (const auto& cfg : cfgs) {
        out << "\n[" << fixture_name(cfg.fixture) << "]\n";
        out << "uses_per_day = " << format_real(cfg.uses_per_day) << "\n";
        out << "diurnal_weights =";
        for (double w : cfg.diurnal_weights) {
            out << ' ' << format_real(w);
        }
        out << "\n";
        out << "duration_mu = " << format_real(cfg.duration.mu) << "\n";
        out << "duration_sigma = " << format_real(cfg.duration.sigma) << "\n";
        out << "intensity_mu = " << format_real(cfg.intensity.mu) << "\n";
        out << "intensity_sigma = " << format_real(cfg.intensity.sigma) << "\n";
        out << "min_duration_steps = " << cfg.min_duration_steps << "\n";
        if (!cfg.cycle_template.empty()) {
            out << "cycle_template =";
            for (const auto& phase : cfg.cycle_template) {
                out << ' ' << phase.duration_steps << ':' << format_real(phase.flow_fraction);
            }
            out << "\n";
        }
    }
    return out.str();
}

std::filesystem::path default_config_path() { return WATERUSE_DEFAULT_CONFIG; }

} // namespace wateruse
