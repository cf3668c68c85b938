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

#include "presort.hpp"
#include "wateruse/boosting.hpp"
#include "wateruse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wateruse::boosting {

void validate(const GbtParams& p) {
    if (p.n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
    if (p.max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (!(p.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    auto unit = [](double v, const char* name) {
        if (!(v > 0.0 && v <= 1.0)) {
            throw ConfigError(std::string(name) + " must lie in (0, 1]");
        }
    };
    unit(p.subsample, "subsample");
    unit(p.colsample_bytree, "colsample_bytree");
    unit(p.colsample_bylevel, "colsample_bylevel");
    unit(p.colsample_bynode, "colsample_bynode");
    if (!(p.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(p.lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
}

double soft_threshold(double g, double alpha) {
    if (g > alpha) return g - alpha;
    if (g < -alpha) return g + alpha;
    return 0.0;
}

double leaf_value(double grad_sum, double hess_sum, double alpha, double lambda) {
    return -soft_threshold(grad_sum, alpha) / (hess_sum + lambda);
}

double split_gain(double gl, double hl, double gr, double hr, double lambda) {
    const double g = gl + gr;
    const double h = hl + hr;
    return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda));
}

double sigmoid(double margin) {
    const double m = std::clamp(margin, -35.0, 35.0);
    return 1.0 / (1.0 + std::exp(-m));
}

double RegressionTree::predict_one(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& n = nodes_[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold
                                         ? n.left
                                         : n.right);
    }
    return nodes_[i].value;
}

namespace {

Json node_to_json(const std::vector<RegressionNode>& nodes, std::size_t i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) {
        return {{"value", n.value}};
    }
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", node_to_json(nodes, static_cast<std::size_t>(n.left))},
            {"right", node_to_json(nodes, static_cast<std::size_t>(n.right))}};
}

int node_from_json(const Json& j, std::vector<RegressionNode>& nodes, std::size_t width) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (j.contains("feature")) {
        const int feature = json_field<int>(j, "feature");
        if (feature < 0 || static_cast<std::size_t>(feature) >= width) {
            throw FormatError("boosted tree node has an invalid feature");
        }
        const double threshold = json_field<double>(j, "threshold");
        const int left = node_from_json(j.at("left"), nodes, width);
        const int right = node_from_json(j.at("right"), nodes, width);
        auto& n = nodes[static_cast<std::size_t>(index)];
        n.feature = feature;
        n.threshold = threshold;
        n.left = left;
        n.right = right;
    } else {
        nodes[static_cast<std::size_t>(index)].value = json_field<double>(j, "value");
    }
    return index;
}

/// k = max(1, floor(fraction * |from|)) features drawn without replacement,
/// returned in ascending order. A fraction of 1 keeps everything and draws
/// nothing from the stream.
std::vector<std::size_t> sample_features(const std::vector<std::size_t>& from, double fraction,
                                         Rng& rng) {
    if (fraction >= 1.0 || from.size() <= 1) {
        return from;
    }
    const auto k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(from.size()) + 1e-9)));
    std::vector<std::size_t> pool = from;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

struct FrontierNode {
    int node = 0;
    int depth = 0;
    double grad = 0.0;
    double hess = 0.0;
    std::size_t count = 0;
};

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

/// Level-wise exact greedy growth over the presorted columns.
RegressionTree grow(MatrixView x, std::span<const double> grad, std::span<const double> hess,
                    const std::vector<char>& in_sample, const detail::SortedColumns& sorted,
                    const GbtParams& params, Rng& rng) {
    const std::size_t n = x.rows();
    const std::size_t width = x.cols();

    std::vector<std::size_t> all(width);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto tree_features = sample_features(all, params.colsample_bytree, rng);

    std::vector<int> slot(n, -1);
    FrontierNode root;
    for (std::size_t r = 0; r < n; ++r) {
        if (!in_sample[r]) continue;
        slot[r] = 0;
        root.grad += grad[r];
        root.hess += hess[r];
        ++root.count;
    }

    std::vector<RegressionNode> nodes(1);
    std::vector<FrontierNode> frontier{root};
    while (!frontier.empty()) {
        const std::size_t m = frontier.size();
        std::vector<char> splittable(m, 0);
        bool any = false;
        for (std::size_t s = 0; s < m; ++s) {
            const auto& fr = frontier[s];
            nodes[static_cast<std::size_t>(fr.node)].value =
                leaf_value(fr.grad, fr.hess, params.alpha, params.lambda);
            splittable[s] = fr.depth < params.max_depth && fr.count >= 2 &&
                            fr.hess >= 2.0 * kMinChildWeight;
            any = any || splittable[s];
        }
        if (!any) break;

        const auto level_features = sample_features(tree_features, params.colsample_bylevel, rng);
        std::vector<std::uint8_t> selected(m * width, 0);
        std::vector<char> used(width, 0);
        for (std::size_t s = 0; s < m; ++s) {
            if (!splittable[s]) continue;
            for (std::size_t f : sample_features(level_features, params.colsample_bynode, rng)) {
                selected[s * width + f] = 1;
                used[f] = 1;
            }
        }

        std::vector<BestSplit> best(m);
        std::vector<double> left_grad(m), left_hess(m), last(m);
        std::vector<std::size_t> left_count(m);
        for (std::size_t f : level_features) {
            if (!used[f]) continue;
            std::fill(left_grad.begin(), left_grad.end(), 0.0);
            std::fill(left_hess.begin(), left_hess.end(), 0.0);
            std::fill(left_count.begin(), left_count.end(), 0);
            for (const auto& e : sorted.columns[f]) {
                const int si = slot[e.row];
                if (si < 0) continue;
                const auto s = static_cast<std::size_t>(si);
                if (!selected[s * width + f]) continue;
                if (left_count[s] > 0 && e.value != last[s]) {
                    const auto& fr = frontier[s];
                    const double hl = left_hess[s];
                    const double hr = fr.hess - hl;
                    if (hl >= kMinChildWeight && hr >= kMinChildWeight) {
                        const double gl = left_grad[s];
                        const double gain = split_gain(gl, hl, fr.grad - gl, hr, params.lambda);
                        if (gain > 0.0 && gain > best[s].gain) {
                            best[s] = {gain, static_cast<int>(f),
                                       detail::midpoint_threshold(last[s], e.value)};
                        }
                    }
                }
                left_grad[s] += grad[e.row];
                left_hess[s] += hess[e.row];
                ++left_count[s];
                last[s] = e.value;
            }
        }

        std::vector<FrontierNode> next;
        std::vector<int> child_slot(m, -1);
        for (std::size_t s = 0; s < m; ++s) {
            if (!splittable[s] || best[s].feature < 0) continue;
            const auto& fr = frontier[s];
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
            if (slot[r] < 0) continue;
            const auto s = static_cast<std::size_t>(slot[r]);
            if (child_slot[s] < 0) {
                slot[r] = -1;
                continue;
            }
            const bool go_left =
                x(r, static_cast<std::size_t>(best[s].feature)) <= best[s].threshold;
            const int c = child_slot[s] + (go_left ? 0 : 1);
            auto& child = next[static_cast<std::size_t>(c)];
            child.grad += grad[r];
            child.hess += hess[r];
            ++child.count;
            slot[r] = c;
        }
        frontier = std::move(next);
    }
    return RegressionTree(std::move(nodes));
}

double mean_log_loss(std::span<const double> margin, std::span<const std::uint8_t> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < margin.size(); ++i) {
        // log(1 + e^-m) for positives, log(1 + e^m) for negatives, computed stably.
        const double z = y[i] ? -margin[i] : margin[i];
        total += z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    return total / static_cast<double>(margin.size());
}

} // namespace

Json RegressionTree::to_json() const { return node_to_json(nodes_, 0); }

RegressionTree RegressionTree::from_json(const Json& j, std::size_t width) {
    std::vector<RegressionNode> nodes;
    node_from_json(j, nodes, width);
    return RegressionTree(std::move(nodes));
}

void BoostedModel::fit(MatrixView x, std::span<const std::uint8_t> y) {
    validate(params_);
    check_fit_input(x, y);
    const std::size_t n = x.rows();
    width_ = x.cols();
    trees_.clear();
    training_loss_.clear();

    std::size_t positives = 0;
    for (auto v : y) positives += v;
    const double rate = static_cast<double>(positives) / static_cast<double>(n);
    base_margin_ = std::clamp(std::log(rate / (1.0 - rate)), -kBaseMarginClamp, kBaseMarginClamp);
    fitted_ = true;

    std::vector<double> margin(n, base_margin_);
    training_loss_.push_back(mean_log_loss(margin, y));
    // A single-class target has nothing to learn beyond the prior.
    if (positives == 0 || positives == n) {
        return;
    }

    const auto sorted = detail::SortedColumns::build(x);
    Rng rng = make_rng(seed_, {0x6B7ULL});
    std::vector<double> grad(n), hess(n);
    std::vector<char> in_sample(n, 1);
    for (int round = 0; round < params_.n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - static_cast<double>(y[i]);
            hess[i] = p * (1.0 - p);
        }
        if (params_.subsample < 1.0) {
            for (std::size_t i = 0; i < n; ++i) {
                in_sample[i] = uniform01(rng) < params_.subsample ? 1 : 0;
            }
        }
        trees_.push_back(grow(x, grad, hess, in_sample, sorted, params_, rng));
        const auto& tree = trees_.back();
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += params_.learning_rate * tree.predict_one(x.row(i));
        }
        training_loss_.push_back(mean_log_loss(margin, y));
    }
}

std::vector<double> BoostedModel::predict_margin(MatrixView x) const {
    check_predict_input(*this, x);
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        double sum = 0.0;
        for (const auto& tree : trees_) {
            sum += tree.predict_one(row);
        }
        out[r] = base_margin_ + params_.learning_rate * sum;
    }
    return out;
}

std::vector<double> BoostedModel::predict_proba(MatrixView x) const {
    auto out = predict_margin(x);
    for (auto& v : out) {
        v = sigmoid(v);
    }
    return out;
}

Json BoostedModel::to_json() const {
    Json trees = Json::array();
    for (const auto& t : trees_) {
        trees.push_back(t.to_json());
    }
    return {{"schema", "wateruse.gbt"},
            {"version", 1},
            {"input_width", width_},
            {"seed", seed_},
            {"base_margin", base_margin_},
            {"params",
             {{"n_estimators", params_.n_estimators},
              {"max_depth", params_.max_depth},
              {"learning_rate", params_.learning_rate},
              {"subsample", params_.subsample},
              {"colsample_bytree", params_.colsample_bytree},
              {"colsample_bylevel", params_.colsample_bylevel},
              {"colsample_bynode", params_.colsample_bynode},
              {"alpha", params_.alpha},
              {"lambda", params_.lambda}}},
            {"trees", trees}};
}

BoostedModel BoostedModel::from_json(const Json& j) {
    expect_schema(j, "wateruse.gbt", 1);
    const auto& p = j.at("params");
    GbtParams params;
    params.n_estimators = json_field<int>(p, "n_estimators");
    params.max_depth = json_field<int>(p, "max_depth");
    params.learning_rate = json_field<double>(p, "learning_rate");
    params.subsample = json_field<double>(p, "subsample");
    params.colsample_bytree = json_field<double>(p, "colsample_bytree");
    params.colsample_bylevel = json_field<double>(p, "colsample_bylevel");
    params.colsample_bynode = json_field<double>(p, "colsample_bynode");
    params.alpha = json_field<double>(p, "alpha");
    params.lambda = json_field<double>(p, "lambda");
    validate(params);
    BoostedModel model(params, json_field<std::uint64_t>(j, "seed"));
    model.width_ = json_field<std::size_t>(j, "input_width");
    model.base_margin_ = json_field<double>(j, "base_margin");
    for (const auto& t : j.at("trees")) {
        model.trees_.push_back(RegressionTree::from_json(t, model.width_));
    }
    if (model.trees_.size() > static_cast<std::size_t>(params.n_estimators)) {
        throw FormatError("boosted model has more trees than n_estimators");
    }
    model.fitted_ = true;
    return model;
}

BoostedModel BoostedModel::from_parts(GbtParams params, double base_margin,
                                      std::vector<RegressionTree> trees, std::size_t width) {
    BoostedModel model(params, 0);
    model.base_margin_ = base_margin;
    model.trees_ = std::move(trees);
    model.width_ = width;
    model.fitted_ = true;
    return model;
}

BoostedModel fit_gbt(MatrixView x, std::span<const std::uint8_t> y, const GbtParams& params,
                     std::uint64_t seed) {
    BoostedModel model(params, seed);
    model.fit(x, y);
    return model;
}

} // namespace wateruse::boosting
