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

#include "wateruse/neural.hpp"
#include "wateruse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wateruse::neural {

std::string to_string(Optimizer o) { return o == Optimizer::Sgd ? "sgd" : "adam"; }

Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd") return Optimizer::Sgd;
    if (s == "adam") return Optimizer::Adam;
    throw ConfigError("optimizer must be sgd or adam, got '" + s + "'");
}

void validate(const MlpConfig& c) {
    if (c.hidden.empty()) throw ConfigError("mlp needs at least one hidden layer");
    for (auto h : c.hidden) {
        if (h == 0) throw ConfigError("mlp hidden layers must have at least one unit");
    }
    if (!(c.l2 >= 0.0)) throw ConfigError("mlp l2 must be >= 0");
    if (!(c.learning_rate > 0.0)) throw ConfigError("mlp learning_rate must be > 0");
    if (c.batch_size == 0) throw ConfigError("mlp batch_size must be >= 1");
    if (c.epochs < 1) throw ConfigError("mlp epochs must be >= 1");
}

bool MlpParams::all_finite() const {
    for (const auto& l : layers) {
        for (double w : l.weights.data()) {
            if (!std::isfinite(w)) return false;
        }
        for (double b : l.bias) {
            if (!std::isfinite(b)) return false;
        }
    }
    return true;
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 3) {
        throw ConfigError("mlp needs an input, at least one hidden layer and an output");
    }
    if (layer_sizes.back() != 1) {
        throw ConfigError("mlp output layer must have exactly one unit");
    }
    for (auto s : layer_sizes) {
        if (s == 0) throw ConfigError("mlp layers must have nonzero width");
    }
    Rng rng = make_rng(seed, {0x1417ULL});
    MlpParams params;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t in = layer_sizes[l];
        const std::size_t out = layer_sizes[l + 1];
        const double scale = 1.0 / std::sqrt(static_cast<double>(in));
        DenseLayer layer{Matrix(out, in), std::vector<double>(out, 0.0)};
        for (double& w : layer.weights.data()) {
            w = (2.0 * uniform01(rng) - 1.0) * scale;
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Workspace {
    std::vector<std::vector<double>> act;   // post-activation per layer; last = logit
    std::vector<std::vector<double>> delta; // dLoss/dpre-activation per layer
};

// Returns the output logit; fills ws.act.
double forward_logit(const MlpParams& params, std::span<const double> x, Workspace& ws) {
    const std::size_t L = params.layers.size();
    ws.act.resize(L);
    std::span<const double> in = x;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = params.layers[l];
        auto& out = ws.act[l];
        out.resize(layer.weights.rows());
        const bool hidden = l + 1 < L;
        for (std::size_t o = 0; o < out.size(); ++o) {
            const auto w = layer.weights.row(o);
            double s = layer.bias[o];
            for (std::size_t i = 0; i < w.size(); ++i) {
                s += w[i] * in[i];
            }
            out[o] = hidden ? std::tanh(s) : s;
        }
        in = out;
    }
    return ws.act.back()[0];
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    for (const auto& l : p.layers) {
        z.layers.push_back({Matrix(l.weights.rows(), l.weights.cols()),
                            std::vector<double>(l.bias.size(), 0.0)});
    }
    return z;
}

// Adds (1/scale_count) * gradient of the per-row loss over `rows` into
// `grad` and returns the mean data loss over those rows.
double accumulate(const MlpParams& params, MatrixView x, std::span<const std::uint8_t> y,
                  std::span<const std::size_t> rows, MlpParams& grad, Workspace& ws) {
    const std::size_t L = params.layers.size();
    const double inv = 1.0 / static_cast<double>(rows.size());
    ws.delta.resize(L);
    double total = 0.0;
    for (std::size_t r : rows) {
        const auto xr = x.row(r);
        const double z = forward_logit(params, xr, ws);
        const double target = static_cast<double>(y[r]);
        total += softplus(z) - target * z;

        ws.delta[L - 1].assign(1, (logistic(z) - target) * inv);
        for (std::size_t l = L; l-- > 0;) {
            const auto& layer = params.layers[l];
            auto& g = grad.layers[l];
            const auto& d = ws.delta[l];
            std::span<const double> in = l == 0 ? xr : std::span<const double>(ws.act[l - 1]);
            for (std::size_t o = 0; o < d.size(); ++o) {
                auto grow = g.weights.row(o);
                for (std::size_t i = 0; i < in.size(); ++i) {
                    grow[i] += d[o] * in[i];
                }
                g.bias[o] += d[o];
            }
            if (l == 0) break;
            auto& prev = ws.delta[l - 1];
            prev.assign(in.size(), 0.0);
            for (std::size_t o = 0; o < d.size(); ++o) {
                const auto w = layer.weights.row(o);
                for (std::size_t i = 0; i < in.size(); ++i) {
                    prev[i] += w[i] * d[o];
                }
            }
            for (std::size_t i = 0; i < in.size(); ++i) {
                prev[i] *= 1.0 - in[i] * in[i]; // tanh'
            }
        }
    }
    return total * inv;
}

double weight_penalty(const MlpParams& params, double l2) {
    double sq = 0.0;
    for (const auto& l : params.layers) {
        for (double w : l.weights.data()) sq += w * w;
    }
    return 0.5 * l2 * sq;
}

void add_weight_decay(const MlpParams& params, double l2, MlpParams& grad) {
    if (l2 == 0.0) return;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& w = params.layers[l].weights.data();
        auto& g = grad.layers[l].weights.data();
        for (std::size_t i = 0; i < w.size(); ++i) g[i] += l2 * w[i];
    }
}

void check_shapes(const MlpParams& params, MatrixView x, std::span<const std::uint8_t> y) {
    if (params.layers.empty()) throw TrainingError("mlp used before initialization");
    if (x.cols() != params.input_width()) {
        throw FormatError("mlp expects " + std::to_string(params.input_width()) + " inputs, got " +
                          std::to_string(x.cols()));
    }
    if (x.rows() != y.size() || x.rows() == 0) {
        throw TrainingError("mlp needs matching, nonempty inputs and labels");
    }
}

template <typename Fn>
void for_each_param(MlpParams& a, MlpParams& b, Fn&& fn) {
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        auto& wa = a.layers[l].weights.data();
        auto& wb = b.layers[l].weights.data();
        for (std::size_t i = 0; i < wa.size(); ++i) fn(wa[i], wb[i], l, i, false);
        auto& ba = a.layers[l].bias;
        auto& bb = b.layers[l].bias;
        for (std::size_t i = 0; i < ba.size(); ++i) fn(ba[i], bb[i], l, i, true);
    }
}

} // namespace

double forward(const MlpParams& params, std::span<const double> x) {
    if (x.size() != params.input_width()) {
        throw FormatError("mlp input width mismatch");
    }
    Workspace ws;
    return logistic(forward_logit(params, x, ws));
}

double loss(const MlpParams& params, MatrixView x, std::span<const std::uint8_t> y, double l2) {
    check_shapes(params, x, y);
    Workspace ws;
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double z = forward_logit(params, x.row(r), ws);
        total += softplus(z) - static_cast<double>(y[r]) * z;
    }
    return total / static_cast<double>(x.rows()) + weight_penalty(params, l2);
}

MlpParams backward(const MlpParams& params, MatrixView x, std::span<const std::uint8_t> y,
                   double l2) {
    check_shapes(params, x, y);
    MlpParams grad = zeros_like(params);
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Workspace ws;
    accumulate(params, x, y, rows, grad, ws);
    add_weight_decay(params, l2, grad);
    return grad;
}

MlpParams train(MlpParams params, MatrixView x, std::span<const std::uint8_t> y,
                const MlpConfig& config, std::uint64_t seed) {
    validate(config);
    check_shapes(params, x, y);
    const std::size_t n = x.rows();
    const std::size_t batch = std::min(config.batch_size, n);

    Rng rng = make_rng(seed, {0x5EEDULL});
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    MlpParams grad = zeros_like(params);
    MlpParams m = zeros_like(params);
    MlpParams v = zeros_like(params);
    Workspace ws;
    std::uint64_t step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += batch, ++batch_index) {
            const std::span<const std::size_t> rows(order.data() + start, std::min(batch, n - start));
            for (auto& l : grad.layers) {
                std::fill(l.weights.data().begin(), l.weights.data().end(), 0.0);
                std::fill(l.bias.begin(), l.bias.end(), 0.0);
            }
            const double batch_loss =
                accumulate(params, x, y, rows, grad, ws) + weight_penalty(params, config.l2);
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "mlp loss became non-finite at epoch " << epoch + 1 << ", batch "
                    << batch_index + 1;
                throw TrainingError(msg.str());
            }
            add_weight_decay(params, config.l2, grad);

            ++step;
            if (config.optimizer == Optimizer::Sgd) {
                for_each_param(params, grad, [&](double& p, double& g, std::size_t, std::size_t, bool) {
                    p -= config.learning_rate * g;
                });
            } else {
                const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
                for_each_param(params, grad, [&](double& p, double& g, std::size_t l, std::size_t i, bool is_bias) {
                    double& mi = is_bias ? m.layers[l].bias[i] : m.layers[l].weights.data()[i];
                    double& vi = is_bias ? v.layers[l].bias[i] : v.layers[l].weights.data()[i];
                    mi = kAdamBeta1 * mi + (1.0 - kAdamBeta1) * g;
                    vi = kAdamBeta2 * vi + (1.0 - kAdamBeta2) * g * g;
                    p -= config.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + kAdamEpsilon);
                });
            }
        }
        if (!params.all_finite()) {
            throw TrainingError("mlp parameters became non-finite in epoch " + std::to_string(epoch + 1));
        }
    }
    return params;
}

void MlpClassifier::fit(MatrixView x, std::span<const std::uint8_t> y) {
    validate(config_);
    check_fit_input(x, y);
    std::vector<std::size_t> sizes{x.cols()};
    sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
    sizes.push_back(1);
    auto params = init_mlp(sizes, seed_);

    if (config_.standardize) {
        standardizer_ = Standardizer::fit(x);
    } else {
        standardizer_.mean.assign(x.cols(), 0.0);
        standardizer_.scale.assign(x.cols(), 1.0);
    }
    Matrix scaled(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        standardizer_.apply(x.row(r), scaled.row(r));
    }
    params_ = train(std::move(params), scaled, y, config_, derive_seed(seed_, {0x7A11ULL}));
    fitted_ = true;
}

std::vector<double> MlpClassifier::predict_proba(MatrixView x) const {
    check_predict_input(*this, x);
    std::vector<double> out(x.rows());
    std::vector<double> buf(x.cols());
    Workspace ws;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        standardizer_.apply(x.row(r), buf);
        out[r] = logistic(forward_logit(params_, buf, ws));
    }
    return out;
}

Json MlpClassifier::to_json() const {
    Json layers = Json::array();
    for (const auto& l : params_.layers) {
        layers.push_back({{"outputs", l.weights.rows()},
                          {"inputs", l.weights.cols()},
                          {"weights", l.weights.data()},
                          {"bias", l.bias}});
    }
    return {{"schema", "wateruse.mlp"},
            {"version", 1},
            {"input_width", input_width()},
            {"seed", seed_},
            {"activation", "tanh"},
            {"output", "sigmoid"},
            {"config",
             {{"hidden", config_.hidden},
              {"l2", config_.l2},
              {"optimizer", to_string(config_.optimizer)},
              {"learning_rate", config_.learning_rate},
              {"batch_size", config_.batch_size},
              {"epochs", config_.epochs},
              {"standardize", config_.standardize}}},
            {"standardizer", {{"mean", standardizer_.mean}, {"scale", standardizer_.scale}}},
            {"layers", layers}};
}

MlpClassifier MlpClassifier::from_json(const Json& j) {
    expect_schema(j, "wateruse.mlp", 1);
    const auto& c = j.at("config");
    MlpConfig config;
    config.hidden = json_field<std::vector<std::size_t>>(c, "hidden");
    config.l2 = json_field<double>(c, "l2");
    config.optimizer = optimizer_from_string(json_field<std::string>(c, "optimizer"));
    config.learning_rate = json_field<double>(c, "learning_rate");
    config.batch_size = json_field<std::size_t>(c, "batch_size");
    config.epochs = json_field<int>(c, "epochs");
    config.standardize = json_field<bool>(c, "standardize");
    MlpClassifier model(config, json_field<std::uint64_t>(j, "seed"));
    const auto& s = j.at("standardizer");
    model.standardizer_.mean = json_field<std::vector<double>>(s, "mean");
    model.standardizer_.scale = json_field<std::vector<double>>(s, "scale");

    std::size_t expected_in = json_field<std::size_t>(j, "input_width");
    if (model.standardizer_.mean.size() != expected_in || model.standardizer_.scale.size() != expected_in) {
        throw FormatError("mlp standardizer width mismatch");
    }
    for (const auto& lj : j.at("layers")) {
        const auto outputs = json_field<std::size_t>(lj, "outputs");
        const auto inputs = json_field<std::size_t>(lj, "inputs");
        if (inputs != expected_in) {
            throw FormatError("mlp layer shapes do not chain");
        }
        DenseLayer layer{Matrix(outputs, inputs), json_field<std::vector<double>>(lj, "bias")};
        layer.weights.data() = json_field<std::vector<double>>(lj, "weights");
        if (layer.weights.data().size() != outputs * inputs || layer.bias.size() != outputs) {
            throw FormatError("mlp layer size mismatch");
        }
        model.params_.layers.push_back(std::move(layer));
        expected_in = outputs;
    }
    if (model.params_.layers.size() < 2 || expected_in != 1) {
        throw FormatError("mlp must end in a single output unit");
    }
    model.fitted_ = true;
    return model;
}

} // namespace wateruse::neural
