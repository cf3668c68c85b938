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

#include "wateruse/metrics.hpp"

#include "wateruse/errors.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace wateruse {

namespace {

void check_shapes(std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    if (pred.size() != truth.size()) {
        throw FormatError("prediction has " + std::to_string(pred.size()) +
                          " rows but truth has " + std::to_string(truth.size()));
    }
}

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

MicroCounts micro_counts(std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    check_shapes(pred, truth);
    MicroCounts c;
    for (std::size_t r = 0; r < pred.size(); ++r) {
        const unsigned p = pred[r].bits();
        const unsigned t = truth[r].bits();
        c.tp += std::popcount(p & t);
        c.fp += std::popcount(p & ~t & 0x1FU);
        c.fn += std::popcount(~p & t & 0x1FU);
    }
    c.tn = kFixtureCount * pred.size() - c.tp - c.fp - c.fn;
    return c;
}

double precision(const MicroCounts& c) { return ratio(c.tp, c.tp + c.fp); }
double recall(const MicroCounts& c) { return ratio(c.tp, c.tp + c.fn); }

double f1_from_counts(const MicroCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double precision(std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    return precision(micro_counts(pred, truth));
}

double recall(std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    return recall(micro_counts(pred, truth));
}

double f1_micro(std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    return f1_from_counts(micro_counts(pred, truth));
}

double subset_accuracy(std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    check_shapes(pred, truth);
    std::uint64_t hits = 0;
    for (std::size_t r = 0; r < pred.size(); ++r) {
        hits += pred[r] == truth[r];
    }
    return ratio(hits, pred.size());
}

std::array<double, kFixtureCount> per_label_accuracy(std::span<const LabelVector> pred,
                                                     std::span<const LabelVector> truth) {
    check_shapes(pred, truth);
    std::array<std::uint64_t, kFixtureCount> hits{};
    for (std::size_t r = 0; r < pred.size(); ++r) {
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            hits[k] += pred[r][k] == truth[r][k];
        }
    }
    std::array<double, kFixtureCount> out{};
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        out[k] = ratio(hits[k], pred.size());
    }
    return out;
}

std::array<BinaryConfusion, kFixtureCount> one_vs_rest_confusions(
    std::span<const LabelVector> pred, std::span<const LabelVector> truth) {
    check_shapes(pred, truth);
    std::array<BinaryConfusion, kFixtureCount> out{};
    for (std::size_t r = 0; r < pred.size(); ++r) {
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            ++out[k].counts[truth[r][k] ? 0 : 1][pred[r][k] ? 0 : 1];
        }
    }
    return out;
}

std::size_t dominant_class(LabelVector v) {
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        if (v[k]) return k;
    }
    return kNoneClass;
}

std::string dominant_class_name(std::size_t c) {
    return c == kNoneClass ? "none" : std::string(fixture_name(kAllFixtures.at(c)));
}

MulticlassConfusion dominant_confusion(std::span<const LabelVector> pred,
                                       std::span<const LabelVector> truth) {
    check_shapes(pred, truth);
    MulticlassConfusion m{};
    for (std::size_t r = 0; r < pred.size(); ++r) {
        ++m[dominant_class(truth[r])][dominant_class(pred[r])];
    }
    return m;
}

MetricsReport evaluate_predictions(std::span<const LabelVector> pred,
                                   std::span<const LabelVector> truth) {
    MetricsReport r;
    r.rows = pred.size();
    r.counts = micro_counts(pred, truth);
    r.precision = precision(r.counts);
    r.recall = recall(r.counts);
    r.f1_micro = f1_from_counts(r.counts);
    r.subset_accuracy = subset_accuracy(pred, truth);
    r.per_label_accuracy = per_label_accuracy(pred, truth);
    r.mean_label_accuracy = ratio(r.counts.tp + r.counts.tn, r.counts.total());
    r.per_class_confusion = one_vs_rest_confusions(pred, truth);
    r.dominant = dominant_confusion(pred, truth);
    return r;
}

Json to_json(const MetricsReport& r) {
    Json per_label = Json::object();
    Json confusions = Json::object();
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        const std::string name(fixture_name(kAllFixtures[k]));
        per_label[name] = r.per_label_accuracy[k];
        const auto& c = r.per_class_confusion[k];
        confusions[name] = {{"tp", c.tp()}, {"fn", c.fn()}, {"fp", c.fp()}, {"tn", c.tn()}};
    }
    Json classes = Json::array();
    for (std::size_t c = 0; c < kDominantClasses; ++c) {
        classes.push_back(dominant_class_name(c));
    }
    return {{"rows", r.rows},
            {"f1_micro", r.f1_micro},
            {"precision", r.precision},
            {"recall", r.recall},
            {"subset_accuracy", r.subset_accuracy},
            {"mean_label_accuracy", r.mean_label_accuracy},
            {"per_label_accuracy", per_label},
            {"micro_counts",
             {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}}},
            {"confusion", confusions},
            {"dominant_label", {{"classes", classes}, {"matrix", r.dominant}}}};
}

void write_text_report(const MetricsReport& r, std::ostream& out) {
    char line[160];
    auto emit = [&](const char* name, double v) {
        std::snprintf(line, sizeof line, "%-22s %8.2f\n", name, 100.0 * v);
        out << line;
    };
    std::snprintf(line, sizeof line, "%-22s %8zu\n", "rows", r.rows);
    out << line;
    emit("F1-Micro", r.f1_micro);
    emit("Precision", r.precision);
    emit("Recall", r.recall);
    emit("Subset accuracy", r.subset_accuracy);
    emit("Mean label accuracy", r.mean_label_accuracy);
    out << '\n';
    std::snprintf(line, sizeof line, "%-16s %10s %10s %10s %10s %9s\n", "label", "TP", "FN", "FP",
                  "TN", "accuracy");
    out << line;
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        const auto& c = r.per_class_confusion[k];
        const std::string name(fixture_name(kAllFixtures[k]));
        std::snprintf(line, sizeof line, "%-16s %10llu %10llu %10llu %10llu %9.2f\n", name.c_str(),
                      static_cast<unsigned long long>(c.tp()), static_cast<unsigned long long>(c.fn()),
                      static_cast<unsigned long long>(c.fp()), static_cast<unsigned long long>(c.tn()),
                      100.0 * r.per_label_accuracy[k]);
        out << line;
    }
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw FormatError("cannot write " + path.string());
}

} // namespace

void write_confusion_csvs(const MetricsReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < kFixtureCount; ++k) {
        const auto& c = r.per_class_confusion[k];
        const std::string name(fixture_name(kAllFixtures[k]));
        std::string text = "actual,predicted_active,predicted_inactive\n";
        text += "active," + std::to_string(c.tp()) + ',' + std::to_string(c.fn()) + '\n';
        text += "inactive," + std::to_string(c.fp()) + ',' + std::to_string(c.tn()) + '\n';
        write_file(dir / ("confusion_" + name + ".csv"), text);
    }
    std::string text = "actual";
    for (std::size_t c = 0; c < kDominantClasses; ++c) {
        text += ',' + dominant_class_name(c);
    }
    text += '\n';
    for (std::size_t a = 0; a < kDominantClasses; ++a) {
        text += dominant_class_name(a);
        for (std::size_t p = 0; p < kDominantClasses; ++p) {
            text += ',' + std::to_string(r.dominant[a][p]);
        }
        text += '\n';
    }
    write_file(dir / "confusion_dominant.csv", text);
}

} // namespace wateruse
