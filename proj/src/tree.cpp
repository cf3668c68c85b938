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

#include "cart.hpp"
#include "wateruse/rng.hpp"

#include <cmath>
#include <numeric>

namespace wateruse::trees {

namespace detail {

namespace {

struct FrontierNode {
    int node = 0;
    int depth = 0;
    double negative = 0.0; // class-weighted
    double positive = 0.0;
    double support = 0.0;  // sample-weighted
    std::size_t count = 0; // rows with nonzero weight
};

struct BestSplit {
    double decrease = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

constexpr double kMinRelativeDecrease = 1e-12;

std::size_t features_per_node(MaxFeatures mf, std::size_t width) {
    if (mf == MaxFeatures::Auto) {
        return width;
    }
    const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width))));
    return std::min(width, std::max<std::size_t>(1, k));
}

} // namespace

DecisionTree grow_tree(MatrixView x, std::span<const std::uint8_t> y,
                       std::span<const double> sample_weights,
                       const wateruse::detail::SortedColumns& sorted, const TreeParams& params,
                       std::uint64_t seed) {
    const std::size_t n = x.rows();
    const std::size_t width = x.cols();
    if (n == 0 || y.size() != n || sample_weights.size() != n) {
        throw TrainingError("tree fit needs matching, nonempty inputs");
    }

    double total_weight = 0.0;
    std::array<double, 2> class_total{0.0, 0.0};
    for (std::size_t r = 0; r < n; ++r) {
        if (sample_weights[r] < 0.0) {
            throw TrainingError("sample weights must be nonnegative");
        }
        total_weight += sample_weights[r];
        class_total[y[r]] += sample_weights[r];
    }
    if (!(total_weight > 0.0)) {
        throw TrainingError("cannot fit a tree on empty input");
    }
    std::array<double, 2> class_weight{1.0, 1.0};
    if (params.class_weight == ClassWeight::Balanced) {
        for (int c = 0; c < 2; ++c) {
            if (class_total[c] > 0.0) {
                class_weight[c] = total_weight / (2.0 * class_total[c]);
            }
        }
    }

    std::vector<double> row_weight(n);
    std::vector<int> slot(n, -1);
    FrontierNode root;
    for (std::size_t r = 0; r < n; ++r) {
        if (sample_weights[r] == 0.0) {
            continue;
        }
        row_weight[r] = sample_weights[r] * class_weight[y[r]];
        (y[r] ? root.positive : root.negative) += row_weight[r];
        root.support += sample_weights[r];
        ++root.count;
        slot[r] = 0;
    }

    std::vector<TreeNode> nodes(1);
    std::vector<FrontierNode> frontier{root};
    const std::size_t per_node = features_per_node(params.max_features, width);
    std::vector<std::size_t> perm(width);

    while (!frontier.empty()) {
        const std::size_t m = frontier.size();
        std::vector<char> splittable(m, 0);
        bool any_splittable = false;
        for (std::size_t s = 0; s < m; ++s) {
            const auto& fr = frontier[s];
            auto& node = nodes[static_cast<std::size_t>(fr.node)];
            node.probability = fr.positive / (fr.negative + fr.positive);
            node.support = fr.support;
            splittable[s] = (params.max_depth == 0 || fr.depth < params.max_depth) &&
                            fr.support >= 2.0 && fr.negative > 0.0 && fr.positive > 0.0;
            any_splittable = any_splittable || splittable[s];
        }
        if (!any_splittable) {
            break;
        }

        // Per-node feature subsets.
        std::vector<std::uint8_t> selected(m * width, 0);
        std::vector<char> feature_used(width, 0);
        for (std::size_t s = 0; s < m; ++s) {
            if (!splittable[s]) {
                continue;
            }
            auto* sel = selected.data() + s * width;
            if (per_node == width) {
                std::fill(sel, sel + width, 1);
                std::fill(feature_used.begin(), feature_used.end(), 1);
                continue;
            }
            Rng rng = make_rng(seed, {static_cast<std::uint64_t>(frontier[s].node)});
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            for (std::size_t i = 0; i < per_node; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, width - 1);
                std::swap(perm[i], perm[pick(rng)]);
                sel[perm[i]] = 1;
                feature_used[perm[i]] = 1;
            }
        }

        std::vector<double> parent_term(m);
        for (std::size_t s = 0; s < m; ++s) {
            const auto& fr = frontier[s];
            parent_term[s] =
                (fr.negative + fr.positive) * impurity(fr.negative, fr.positive, params.criterion);
        }

        std::vector<BestSplit> best(m);
        std::vector<double> left_neg(m), left_pos(m), last(m);
        std::vector<std::size_t> left_count(m);
        for (std::size_t f = 0; f < width; ++f) {
            if (!feature_used[f]) {
                continue;
            }
            std::fill(left_neg.begin(), left_neg.end(), 0.0);
            std::fill(left_pos.begin(), left_pos.end(), 0.0);
            std::fill(left_count.begin(), left_count.end(), 0);
            for (const auto& e : sorted.columns[f]) {
                const int si = slot[e.row];
                if (si < 0) {
                    continue;
                }
                const auto s = static_cast<std::size_t>(si);
                if (!selected[s * width + f]) {
                    continue;
                }
                if (left_count[s] > 0 && e.value != last[s]) {
                    const auto& fr = frontier[s];
                    const double rn = fr.negative - left_neg[s];
                    const double rp = fr.positive - left_pos[s];
                    const double lw = left_neg[s] + left_pos[s];
                    const double rw = rn + rp;
                    const double decrease =
                        parent_term[s] -
                        (lw * impurity(left_neg[s], left_pos[s], params.criterion) +
                         rw * impurity(rn, rp, params.criterion));
                    if (decrease > kMinRelativeDecrease * (fr.negative + fr.positive) &&
                        decrease > best[s].decrease) {
                        best[s] = {decrease, static_cast<int>(f),
                                   wateruse::detail::midpoint_threshold(last[s], e.value)};
                    }
                }
                (y[e.row] ? left_pos[s] : left_neg[s]) += row_weight[e.row];
                ++left_count[s];
                last[s] = e.value;
            }
        }

        // Materialize children and route rows.
        std::vector<FrontierNode> next;
        std::vector<int> child_slot(m, -1);
        for (std::size_t s = 0; s < m; ++s) {
            if (!splittable[s] || best[s].feature < 0) {
                continue;
            }
            auto& fr = frontier[s];
            const int left = static_cast<int>(nodes.size());
            nodes.emplace_back();
            nodes.emplace_back();
            auto& node = nodes[static_cast<std::size_t>(fr.node)];
            node.feature = best[s].feature;
            node.threshold = best[s].threshold;
            node.left = left;
            node.right = left + 1;
            child_slot[s] = static_cast<int>(next.size());
            next.push_back({left, fr.depth + 1});
            next.push_back({left + 1, fr.depth + 1});
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (slot[r] < 0) {
                continue;
            }
            const auto s = static_cast<std::size_t>(slot[r]);
            if (child_slot[s] < 0) {
                slot[r] = -1;
                continue;
            }
            const bool go_left =
                x(r, static_cast<std::size_t>(best[s].feature)) <= best[s].threshold;
            const int c = child_slot[s] + (go_left ? 0 : 1);
            auto& child = next[static_cast<std::size_t>(c)];
            (y[r] ? child.positive : child.negative) += row_weight[r];
            child.support += sample_weights[r];
            ++child.count;
            slot[r] = c;
        }
        frontier = std::move(next);
    }
    return DecisionTree(std::move(nodes), width);
}

} // namespace detail

DecisionTree fit_tree(MatrixView x, std::span<const std::uint8_t> y,
                      std::span<const double> sample_weights, const TreeParams& params,
                      std::uint64_t seed) {
    check_fit_input(x, y);
    const auto sorted = wateruse::detail::SortedColumns::build(x);
    return detail::grow_tree(x, y, sample_weights, sorted, params, seed);
}

double DecisionTree::predict_one(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                         ? node.left
                                         : node.right);
    }
    return nodes_[i].probability;
}

std::vector<double> DecisionTree::predict_proba(MatrixView x) const {
    if (nodes_.empty()) {
        throw TrainingError("tree used before fit");
    }
    if (x.cols() != width_) {
        throw FormatError("tree expects " + std::to_string(width_) + " columns");
    }
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        out[r] = predict_one(x.row(r));
    }
    return out;
}

int DecisionTree::depth() const {
    if (nodes_.empty()) {
        return 0;
    }
    std::vector<int> d(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!nodes_[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
        deepest = std::max(deepest, d[i]);
    }
    return deepest;
}

namespace {

Json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) {
        return {{"probability", n.probability}, {"support", n.support}};
    }
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", node_to_json(nodes, static_cast<std::size_t>(n.left))},
            {"right", node_to_json(nodes, static_cast<std::size_t>(n.right))}};
}

int node_from_json(const Json& j, std::vector<TreeNode>& nodes, std::size_t width) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (j.contains("feature")) {
        const int feature = json_field<int>(j, "feature");
        const double threshold = json_field<double>(j, "threshold");
        if (feature < 0 || static_cast<std::size_t>(feature) >= width || !std::isfinite(threshold)) {
            throw FormatError("tree node has an invalid split");
        }
        const int left = node_from_json(j.at("left"), nodes, width);
        const int right = node_from_json(j.at("right"), nodes, width);
        auto& n = nodes[static_cast<std::size_t>(index)];
        n.feature = feature;
        n.threshold = threshold;
        n.left = left;
        n.right = right;
    } else {
        auto& n = nodes[static_cast<std::size_t>(index)];
        n.probability = json_field<double>(j, "probability");
        n.support = json_field<double>(j, "support");
        if (!(n.probability >= 0.0 && n.probability <= 1.0)) {
            throw FormatError("tree leaf probability outside [0,1]");
        }
    }
    return index;
}

} // namespace

Json DecisionTree::to_json() const {
    if (nodes_.empty()) {
        return nullptr;
    }
    return node_to_json(nodes_, 0);
}

DecisionTree DecisionTree::from_json(const Json& j, std::size_t width) {
    std::vector<TreeNode> nodes;
    node_from_json(j, nodes, width);
    return DecisionTree(std::move(nodes), width);
}

} // namespace wateruse::trees
