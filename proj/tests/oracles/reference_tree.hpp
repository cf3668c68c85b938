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

// Exhaustive CART used as an oracle: every feature, every midpoint between
// distinct values, child impurities recomputed by a full scan of the node.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

namespace oracle {

enum class Impurity { Gini, Entropy };

inline double node_impurity(double neg, double pos, Impurity kind) {
    const double w = neg + pos;
    double out = kind == Impurity::Gini ? 1.0 : 0.0;
    for (double c : {neg, pos}) {
        const double p = c / w;
        if (kind == Impurity::Gini) {
            out -= p * p;
        } else if (p > 0.0) {
            out -= p * std::log2(p);
        }
    }
    return out;
}

struct RefNode {
    int feature = -1;
    double threshold = 0.0;
    double probability = 0.0;
    std::unique_ptr<RefNode> left, right;
};

class ReferenceTree {
public:
    ReferenceTree(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                  Impurity kind, int max_depth)
        : x_(x), y_(y), kind_(kind), max_depth_(max_depth) {
        std::vector<std::size_t> all(x.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        root_ = build(all, 0);
    }

    double predict(const std::vector<double>& row) const {
        const RefNode* n = root_.get();
        while (n->feature >= 0) {
            n = row[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left.get()
                                                                           : n->right.get();
        }
        return n->probability;
    }

private:
    std::pair<double, double> counts(const std::vector<std::size_t>& rows) const {
        double neg = 0, pos = 0;
        for (auto r : rows) (y_[r] ? pos : neg) += 1.0;
        return {neg, pos};
    }

    std::unique_ptr<RefNode> build(const std::vector<std::size_t>& rows, int depth) {
        auto node = std::make_unique<RefNode>();
        const auto [neg, pos] = counts(rows);
        node->probability = pos / (neg + pos);
        if ((max_depth_ > 0 && depth >= max_depth_) || rows.size() < 2 || neg == 0 || pos == 0) {
            return node;
        }
        const double parent = (neg + pos) * node_impurity(neg, pos, kind_);
        double best = 0.0;
        int best_f = -1;
        double best_t = 0.0;
        for (std::size_t f = 0; f < x_.front().size(); ++f) {
            std::vector<double> values;
            for (auto r : rows) values.push_back(x_[r][f]);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                const double t = (values[i] + values[i + 1]) / 2.0;
                std::vector<std::size_t> l, r;
                for (auto row : rows) (x_[row][f] <= t ? l : r).push_back(row);
                const auto [ln, lp] = counts(l);
                const auto [rn, rp] = counts(r);
                const double d = parent - ((ln + lp) * node_impurity(ln, lp, kind_) +
                                           (rn + rp) * node_impurity(rn, rp, kind_));
                if (d > 1e-12 * (neg + pos) && d > best) {
                    best = d;
                    best_f = static_cast<int>(f);
                    best_t = t;
                }
            }
        }
        if (best_f < 0) return node;
        node->feature = best_f;
        node->threshold = best_t;
        std::vector<std::size_t> l, r;
        for (auto row : rows) (x_[row][static_cast<std::size_t>(best_f)] <= best_t ? l : r).push_back(row);
        node->left = build(l, depth + 1);
        node->right = build(r, depth + 1);
        return node;
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<int>& y_;
    Impurity kind_;
    int max_depth_;
    std::unique_ptr<RefNode> root_;
};

} // namespace oracle
