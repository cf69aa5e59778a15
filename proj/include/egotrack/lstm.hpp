// lstm.hpp: stacked LSTM sequence classifier written from scratch.
// Gated recurrence per layer, linear read-out on the last valid hidden
// state, softmax cross-entropy, and exact backpropagation through time.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace egotrack {

struct ClassifierConfig {
  int input_dim = 4;
  int hidden_units = 32;
  int num_layers = 2;
  int num_classes = 125;
};

// Gate blocks are stacked [input; forget; cell; output], each of size H.
struct LstmLayerParams {
  Eigen::MatrixXd w_input;      // 4H x D_in
  Eigen::MatrixXd w_recurrent;  // 4H x H
  Eigen::VectorXd bias;         // 4H
};

struct LstmModel {
  ClassifierConfig config;
  std::vector<LstmLayerParams> layers;
  Eigen::MatrixXd head_weight;  // C x H
  Eigen::VectorXd head_bias;    // C
};

struct LstmGradients {
  std::vector<LstmLayerParams> layers;
  Eigen::MatrixXd head_weight;
  Eigen::VectorXd head_bias;
};

namespace detail {

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) {
  return 1.0 / (1.0 + (-x).exp());
}

}  // namespace detail

// Uniform +-1/sqrt(fan_in) with the forget-gate bias raised to +1.
inline LstmModel init_model(const ClassifierConfig& config, uint64_t seed) {
  if (config.input_dim < 1 || config.hidden_units < 1 ||
      config.num_layers < 1 || config.num_classes < 2) {
    throw std::invalid_argument("init_model: invalid configuration");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](Eigen::Index rows, Eigen::Index cols, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
  };

  LstmModel model;
  model.config = config;
  const int h = config.hidden_units;
  for (int l = 0; l < config.num_layers; ++l) {
    const int d_in = l == 0 ? config.input_dim : h;
    LstmLayerParams p;
    p.w_input = uniform(4 * h, d_in, 1.0 / std::sqrt(static_cast<double>(d_in)));
    p.w_recurrent = uniform(4 * h, h, 1.0 / std::sqrt(static_cast<double>(h)));
    p.bias = Eigen::VectorXd::Zero(4 * h);
    p.bias.segment(h, h).setOnes();  // forget gate
    model.layers.push_back(std::move(p));
  }
  model.head_weight = uniform(config.num_classes, h,
                              1.0 / std::sqrt(static_cast<double>(h)));
  model.head_bias = Eigen::VectorXd::Zero(config.num_classes);
  return model;
}

inline LstmGradients zero_gradients(const LstmModel& model) {
  LstmGradients g;
  for (const auto& p : model.layers) {
    g.layers.push_back({Eigen::MatrixXd::Zero(p.w_input.rows(), p.w_input.cols()),
                        Eigen::MatrixXd::Zero(p.w_recurrent.rows(),
                                              p.w_recurrent.cols()),
                        Eigen::VectorXd::Zero(p.bias.size())});
  }
  g.head_weight = Eigen::MatrixXd::Zero(model.head_weight.rows(),
                                        model.head_weight.cols());
  g.head_bias = Eigen::VectorXd::Zero(model.head_bias.size());
  return g;
}

// Per-step activations of one layer, kept for the backward pass.
struct LayerCache {
  std::vector<Eigen::ArrayXd> gate_i, gate_f, gate_g, gate_o;
  std::vector<Eigen::VectorXd> cell, hidden, input;
  std::vector<Eigen::ArrayXd> cell_tanh;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::VectorXd scores;
  int64_t length = 0;
};

// Run the recurrence over the first `true_length` rows of `sequence` and
// apply the head to the top layer's final hidden state. Rows beyond
// true_length (zero padding) are never touched.
inline ForwardCache forward(const LstmModel& model,
                            const Eigen::MatrixXd& sequence,
                            int64_t true_length) {
  if (true_length < 1 || true_length > sequence.rows()) {
    throw std::invalid_argument("forward: true_length outside [1, T]");
  }
  if (sequence.cols() != model.config.input_dim) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  const int h = model.config.hidden_units;
  ForwardCache cache;
  cache.length = true_length;
  cache.layers.resize(model.layers.size());

  for (size_t l = 0; l < model.layers.size(); ++l) {
    const auto& p = model.layers[l];
    auto& lc = cache.layers[l];
    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
    for (int64_t t = 0; t < true_length; ++t) {
      const Eigen::VectorXd x =
          l == 0 ? Eigen::VectorXd(sequence.row(t).transpose())
                 : cache.layers[l - 1].hidden[t];
      const Eigen::VectorXd pre = p.w_input * x + p.w_recurrent * h_prev + p.bias;
      const Eigen::ArrayXd gi = detail::sigmoid(pre.segment(0, h).array());
      const Eigen::ArrayXd gf = detail::sigmoid(pre.segment(h, h).array());
      const Eigen::ArrayXd gg = pre.segment(2 * h, h).array().tanh();
      const Eigen::ArrayXd go = detail::sigmoid(pre.segment(3 * h, h).array());
      const Eigen::VectorXd c = (gf * c_prev.array() + gi * gg).matrix();
      const Eigen::ArrayXd ct = c.array().tanh();
      const Eigen::VectorXd hid = (go * ct).matrix();
      lc.input.push_back(x);
      lc.gate_i.push_back(gi);
      lc.gate_f.push_back(gf);
      lc.gate_g.push_back(gg);
      lc.gate_o.push_back(go);
      lc.cell.push_back(c);
      lc.cell_tanh.push_back(ct);
      lc.hidden.push_back(hid);
      h_prev = hid;
      c_prev = c;
    }
  }
  cache.scores = model.head_weight * cache.layers.back().hidden.back() +
                 model.head_bias;
  return cache;
}

inline Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  const Eigen::ArrayXd shifted = scores.array() - scores.maxCoeff();
  const Eigen::ArrayXd e = shifted.exp();
  return (e / e.sum()).matrix();
}

inline double cross_entropy(const Eigen::VectorXd& scores, int label) {
  if (label < 0 || label >= scores.size()) {
    throw std::out_of_range("cross_entropy: label outside score range");
  }
  const double max = scores.maxCoeff();
  const double logsum = std::log((scores.array() - max).exp().sum()) + max;
  return logsum - scores(label);
}

// Exact gradients of cross_entropy(forward(...), label) for every
// parameter, by backpropagation through time.
inline void backward(const LstmModel& model, const ForwardCache& cache,
                     int label, LstmGradients& grads) {
  const int h = model.config.hidden_units;
  const int64_t len = cache.length;

  Eigen::VectorXd dscores = softmax(cache.scores);
  dscores(label) -= 1.0;
  grads.head_weight += dscores * cache.layers.back().hidden.back().transpose();
  grads.head_bias += dscores;

  // dh injected into the layer below from each layer's dx, per step.
  std::vector<Eigen::VectorXd> dx_from_above(
      len, Eigen::VectorXd::Zero(h));
  bool have_above = false;

  for (size_t li = model.layers.size(); li-- > 0;) {
    const auto& p = model.layers[li];
    const auto& lc = cache.layers[li];
    auto& g = grads.layers[li];

    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
    std::vector<Eigen::VectorXd> dx(len);

    for (int64_t t = len - 1; t >= 0; --t) {
      Eigen::VectorXd dh = dh_next;
      if (have_above) dh += dx_from_above[t];
      if (li + 1 == model.layers.size() && t == len - 1) {
        dh += model.head_weight.transpose() * dscores;
      }

      const Eigen::ArrayXd dha = dh.array();
      const Eigen::ArrayXd d_o = dha * lc.cell_tanh[t];
      Eigen::ArrayXd dc = dha * lc.gate_o[t] * (1.0 - lc.cell_tanh[t].square());
      dc += dc_next.array();

      const Eigen::ArrayXd c_prev =
          t > 0 ? lc.cell[t - 1].array()
                : Eigen::ArrayXd(Eigen::ArrayXd::Zero(h));
      const Eigen::ArrayXd d_i = dc * lc.gate_g[t];
      const Eigen::ArrayXd d_f = dc * c_prev;
      const Eigen::ArrayXd d_g = dc * lc.gate_i[t];

      Eigen::VectorXd da(4 * h);
      da.segment(0, h) = (d_i * lc.gate_i[t] * (1.0 - lc.gate_i[t])).matrix();
      da.segment(h, h) = (d_f * lc.gate_f[t] * (1.0 - lc.gate_f[t])).matrix();
      da.segment(2 * h, h) = (d_g * (1.0 - lc.gate_g[t].square())).matrix();
      da.segment(3 * h, h) = (d_o * lc.gate_o[t] * (1.0 - lc.gate_o[t])).matrix();

      const Eigen::VectorXd h_prev =
          t > 0 ? lc.hidden[t - 1] : Eigen::VectorXd(Eigen::VectorXd::Zero(h));
      g.w_input += da * lc.input[t].transpose();
      g.w_recurrent += da * h_prev.transpose();
      g.bias += da;

      dx[t] = p.w_input.transpose() * da;
      dh_next = p.w_recurrent.transpose() * da;
      dc_next = (dc * lc.gate_f[t]).matrix();
    }

    dx_from_above = std::move(dx);
    have_above = true;
  }
}

// Flat views over every parameter, used by optimizers and checkpoints.
inline std::vector<Eigen::Map<Eigen::VectorXd>> parameter_views(LstmModel& m) {
  std::vector<Eigen::Map<Eigen::VectorXd>> views;
  for (auto& p : m.layers) {
    views.emplace_back(p.w_input.data(), p.w_input.size());
    views.emplace_back(p.w_recurrent.data(), p.w_recurrent.size());
    views.emplace_back(p.bias.data(), p.bias.size());
  }
  views.emplace_back(m.head_weight.data(), m.head_weight.size());
  views.emplace_back(m.head_bias.data(), m.head_bias.size());
  return views;
}

inline std::vector<Eigen::Map<Eigen::VectorXd>> gradient_views(LstmGradients& g) {
  std::vector<Eigen::Map<Eigen::VectorXd>> views;
  for (auto& p : g.layers) {
    views.emplace_back(p.w_input.data(), p.w_input.size());
    views.emplace_back(p.w_recurrent.data(), p.w_recurrent.size());
    views.emplace_back(p.bias.data(), p.bias.size());
  }
  views.emplace_back(g.head_weight.data(), g.head_weight.size());
  views.emplace_back(g.head_bias.data(), g.head_bias.size());
  return views;
}

}  // namespace egotrack
