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

#include "wateruse/trees.hpp"

#include <cmath>

namespace wateruse::trees {

double impurity(double negative, double positive, Criterion criterion) {
    const double total = negative + positive;
    if (!(total > 0.0)) {
        return 0.0;
    }
    const double p0 = negative / total;
    const double p1 = positive / total;
    if (criterion == Criterion::Gini) {
        return 1.0 - (p0 * p0 + p1 * p1);
    }
    double h = 0.0;
    if (p0 > 0.0) h -= p0 * std::log2(p0);
    if (p1 > 0.0) h -= p1 * std::log2(p1);
    return h;
}

std::string to_string(Criterion c) { return c == Criterion::Gini ? "gini" : "entropy"; }
std::string to_string(MaxFeatures m) { return m == MaxFeatures::Auto ? "auto" : "sqrt"; }
std::string to_string(ClassWeight w) { return w == ClassWeight::None ? "none" : "balanced"; }

Criterion criterion_from_string(const std::string& s) {
    if (s == "gini") return Criterion::Gini;
    if (s == "entropy") return Criterion::Entropy;
    throw ConfigError("criterion must be gini or entropy, got '" + s + "'");
}

MaxFeatures max_features_from_string(const std::string& s) {
    if (s == "auto") return MaxFeatures::Auto;
    if (s == "sqrt") return MaxFeatures::Sqrt;
    throw ConfigError("max_features must be auto or sqrt, got '" + s + "'");
}

ClassWeight class_weight_from_string(const std::string& s) {
    if (s == "none") return ClassWeight::None;
    if (s == "balanced") return ClassWeight::Balanced;
    throw ConfigError("class_weight must be none or balanced, got '" + s + "'");
}

} // namespace wateruse::trees
