// mlp.hpp — small feedforward network with logistic activations throughout,
// trained by mini-batch gradient descent with momentum on binary cross-entropy.
// The sizes are fixed by the caller at creation; the last layer must be 1 wide.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rudetect/common.hpp"

namespace rudetect {

inline constexpr int kMlpBatch = 32;
inline constexpr double kMlpMomentum = 0.9;
inline constexpr double kProbClamp = 1e-12;  // keeps BCE finite at saturation

struct MlpModel {
    std::vector<int> sizes;      // e.g. {240, 64, 32, 1}
    std::vector<Mat> weights;    // weights[l][out][in]
    std::vector<Vec> biases;     // biases[l][out]
};

inline MlpModel mlp_init(const std::vector<int>& sizes, long long seed) {
    if (sizes.size() < 2) throw DataError("mlp_init: need at least input and output layers");
    for (int s : sizes)
        if (s < 1) throw DataError("mlp_init: layer sizes must be positive");
    if (sizes.back() != 1) throw DataError("mlp_init: output layer must have size 1");
    std::seed_seq seq{seed};
    std::mt19937 rng(seq);
    MlpModel m;
    m.sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l], fan_out = sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Mat W(fan_out, Vec(fan_in));
        Vec b(fan_out);
        for (auto& row : W)
            for (auto& v : row) v = dist(rng);
        for (auto& v : b) v = dist(rng);
        m.weights.push_back(std::move(W));
        m.biases.push_back(std::move(b));
    }
    return m;
}

namespace mlp_detail {

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Activations per layer, input included; activations.back()[0] is the output.
inline std::vector<Vec> forward_pass(const MlpModel& m, const Vec& x) {
    if (static_cast<int>(x.size()) != m.sizes.front())
        throw DataError("mlp forward: input dimension mismatch");
    std::vector<Vec> acts{x};
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const Vec& in = acts.back();
        Vec out(m.sizes[l + 1]);
        for (std::size_t o = 0; o < out.size(); ++o) {
            double z = m.biases[l][o];
            const Vec& row = m.weights[l][o];
            for (std::size_t i = 0; i < in.size(); ++i) z += row[i] * in[i];
            out[o] = logistic(z);
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

inline double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

inline double bce(double p, double y) {
    p = clamp_prob(p);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

struct Gradients {
    std::vector<Mat> weights;
    std::vector<Vec> biases;
};

inline Gradients zero_like(const MlpModel& m) {
    Gradients g;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        g.weights.emplace_back(m.weights[l].size(), Vec(m.weights[l][0].size(), 0.0));
        g.biases.emplace_back(m.biases[l].size(), 0.0);
    }
    return g;
}

// Accumulates d(BCE)/d(params) for one sample into g. With a logistic output
// and cross-entropy loss the output delta is simply (p - y).
inline void backprop(const MlpModel& m, const Vec& x, double y, Gradients& g) {
    const auto acts = forward_pass(m, x);
    Vec delta{acts.back()[0] - y};
    for (int l = static_cast<int>(m.weights.size()) - 1; l >= 0; --l) {
        const Vec& in = acts[l];
        for (std::size_t o = 0; o < delta.size(); ++o) {
            g.biases[l][o] += delta[o];
            for (std::size_t i = 0; i < in.size(); ++i) g.weights[l][o][i] += delta[o] * in[i];
        }
        if (l == 0) break;
        Vec prev(in.size(), 0.0);
        for (std::size_t i = 0; i < in.size(); ++i) {
            double acc = 0.0;
            for (std::size_t o = 0; o < delta.size(); ++o) acc += m.weights[l][o][i] * delta[o];
            prev[i] = acc * in[i] * (1.0 - in[i]);  // logistic derivative
        }
        delta = std::move(prev);
    }
}

}  // namespace mlp_detail

// Output in (0,1): the probability attached to label 1.
inline double mlp_forward(const MlpModel& m, const Vec& x) {
    return mlp_detail::clamp_prob(mlp_detail::forward_pass(m, x).back()[0]);
}

inline double mlp_loss(const MlpModel& m, const Mat& X, const Vec& y) {
    if (X.empty() || X.size() != y.size()) throw DataError("mlp_loss: need |X| = |y| > 0");
    double total = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i)
        total += mlp_detail::bce(mlp_detail::forward_pass(m, X[i]).back()[0], y[i]);
    return total / static_cast<double>(X.size());
}

// Mean-over-batch gradient of the BCE loss; shared by training and the
// finite-difference checks in the tests.
inline mlp_detail::Gradients mlp_gradient(const MlpModel& m, const Mat& X, const Vec& y) {
    if (X.empty() || X.size() != y.size()) throw DataError("mlp_gradient: need |X| = |y| > 0");
    auto g = mlp_detail::zero_like(m);
    for (std::size_t i = 0; i < X.size(); ++i) mlp_detail::backprop(m, X[i], y[i], g);
    const double inv = 1.0 / static_cast<double>(X.size());
    for (auto& layer : g.weights)
        for (auto& row : layer)
            for (auto& v : row) v *= inv;
    for (auto& layer : g.biases)
        for (auto& v : layer) v *= inv;
    return g;
}

// Mini-batch SGD with momentum. The parameters returned are the snapshot with
// the lowest full-training-set loss seen at any epoch boundary, so the final
// loss never exceeds the initial one.
inline MlpModel mlp_train(MlpModel model, const Mat& X, const Vec& y, int epochs,
                          double learning_rate, long long seed) {
    if (X.empty() || X.size() != y.size()) throw DataError("mlp_train: need |X| = |y| > 0");
    if (epochs < 0) throw DataError("mlp_train: epochs must be >= 0");
    std::seed_seq seq{seed, static_cast<long long>(0x6d6c70)};
    std::mt19937 rng(seq);

    auto vel = mlp_detail::zero_like(model);
    MlpModel best = model;
    double best_loss = mlp_loss(model, X, y);
    if (!std::isfinite(best_loss)) throw NumericError("mlp_train: non-finite initial loss");

    std::vector<std::size_t> order(X.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += kMlpBatch) {
            const std::size_t end = std::min(order.size(), start + kMlpBatch);
            Mat Xb;
            Vec yb;
            for (std::size_t i = start; i < end; ++i) {
                Xb.push_back(X[order[i]]);
                yb.push_back(y[order[i]]);
            }
            const auto g = mlp_gradient(model, Xb, yb);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                for (std::size_t o = 0; o < model.weights[l].size(); ++o) {
                    for (std::size_t i = 0; i < model.weights[l][o].size(); ++i) {
                        vel.weights[l][o][i] =
                            kMlpMomentum * vel.weights[l][o][i] - learning_rate * g.weights[l][o][i];
                        model.weights[l][o][i] += vel.weights[l][o][i];
                    }
                    vel.biases[l][o] = kMlpMomentum * vel.biases[l][o] - learning_rate * g.biases[l][o];
                    model.biases[l][o] += vel.biases[l][o];
                }
            }
        }
        const double loss = mlp_loss(model, X, y);
        if (!std::isfinite(loss)) throw NumericError("mlp_train: non-finite loss at epoch " +
                                                     std::to_string(epoch));
        if (loss < best_loss) {
            best_loss = loss;
            best = model;
        }
    }
    return best;
}

inline void save_mlp_model(const std::string& path, const MlpModel& m) {
    std::string s;
    for (std::size_t i = 0; i < m.sizes.size(); ++i)
        s += (i ? "," : "") + std::to_string(m.sizes[i]);
    s += "\n";
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (const auto& row : m.weights[l]) {
            for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + fmt9(row[i]);
            s += "\n";
        }
        for (std::size_t i = 0; i < m.biases[l].size(); ++i)
            s += (i ? "," : "") + fmt9(m.biases[l][i]);
        s += "\n";
    }
    write_text(path, s);
}

inline MlpModel load_mlp_model(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError("empty MLP model file " + path);
    MlpModel m;
    for (const auto& f : split(lines[0], ','))
        m.sizes.push_back(static_cast<int>(parse_int(f, path)));
    if (m.sizes.size() < 2 || m.sizes.back() != 1)
        throw DataError("bad MLP layer sizes in " + path);
    std::size_t ln = 1;
    auto next_row = [&](std::size_t want) {
        if (ln >= lines.size()) throw DataError("truncated MLP model file " + path);
        const auto f = split(lines[ln], ',');
        if (f.size() != want)
            throw DataError("bad row width at " + path + ":" + std::to_string(ln + 1));
        Vec row(want);
        for (std::size_t i = 0; i < want; ++i) row[i] = parse_real(f[i], path);
        ++ln;
        return row;
    };
    for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
        Mat W;
        for (int o = 0; o < m.sizes[l + 1]; ++o) W.push_back(next_row(m.sizes[l]));
        m.weights.push_back(std::move(W));
        m.biases.push_back(next_row(m.sizes[l + 1]));
    }
    return m;
}

}  // namespace rudetect
