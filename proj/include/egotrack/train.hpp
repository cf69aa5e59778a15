// train.hpp: mini-batch SGD training of the LSTM classifier with the
// triangular cyclical learning rate. Keeps the epoch with the best
// held-out top-1.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "egotrack/clr.hpp"
#include "egotrack/eval.hpp"
#include "egotrack/features.hpp"
#include "egotrack/lstm.hpp"

namespace egotrack {

struct TrainConfig {
  int batch_size = 128;
  int epochs = 1000;
  double momentum = 0.0;  // plain SGD by default
  uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double top1 = 0.0;
  double top5 = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  LstmModel model;          // parameters from the best epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_top1 = 0.0;
};

// Class scores for every sequence in a set.
inline Eigen::MatrixXd score_all(const LstmModel& model,
                                 const std::vector<FeatureSequence>& set) {
  Eigen::MatrixXd scores(set.size(), model.config.num_classes);
  for (size_t i = 0; i < set.size(); ++i) {
    scores.row(i) =
        forward(model, set[i].steps, set[i].steps.rows()).scores.transpose();
  }
  return scores;
}

inline std::vector<int> predict_all(const LstmModel& model,
                                    const std::vector<FeatureSequence>& set) {
  const Eigen::MatrixXd scores = score_all(model, set);
  std::vector<int> out(set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    Eigen::Index best;
    scores.row(i).maxCoeff(&best);
    out[i] = static_cast<int>(best);
  }
  return out;
}

inline TrainResult train(const std::vector<FeatureSequence>& train_set,
                         const std::vector<FeatureSequence>& test_set,
                         const ClassifierConfig& classifier_config,
                         const CLRConfig& clr_config,
                         const TrainConfig& train_config) {
  if (train_set.empty()) throw std::invalid_argument("train: empty train set");
  for (const auto& s : train_set) {
    if (s.kind != train_set.front().kind ||
        s.steps.cols() != classifier_config.input_dim) {
      throw std::invalid_argument("train: inconsistent feature kind/dimension");
    }
  }

  TrainResult result;
  LstmModel model = init_model(classifier_config, train_config.seed);
  LstmGradients velocity = zero_gradients(model);
  std::mt19937_64 rng(train_config.seed + 1);

  std::vector<int> test_labels;
  for (const auto& s : test_set) test_labels.push_back(s.label);

  std::vector<size_t> indices(train_set.size());
  std::iota(indices.begin(), indices.end(), 0);

  const int64_t batches_per_epoch =
      (static_cast<int64_t>(train_set.size()) + train_config.batch_size - 1) /
      train_config.batch_size;
  int64_t iteration = 0;
  result.best_top1 = -1.0;

  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    std::shuffle(indices.begin(), indices.end(), rng);
    double epoch_loss = 0.0;
    double last_lr = 0.0;

    for (int64_t b = 0; b < batches_per_epoch; ++b, ++iteration) {
      const size_t begin = static_cast<size_t>(b) * train_config.batch_size;
      const size_t end =
          std::min(begin + train_config.batch_size, train_set.size());
      const double inv_count = 1.0 / static_cast<double>(end - begin);

      LstmGradients grads = zero_gradients(model);
      for (size_t i = begin; i < end; ++i) {
        const auto& seq = train_set[indices[i]];
        const ForwardCache cache = forward(model, seq.steps, seq.steps.rows());
        epoch_loss += cross_entropy(cache.scores, seq.label);
        backward(model, cache, seq.label, grads);
      }

      const double t_epochs =
          static_cast<double>(iteration) / static_cast<double>(batches_per_epoch);
      const double lr = clr(t_epochs, clr_config);
      last_lr = lr;

      auto params = parameter_views(model);
      auto gviews = gradient_views(grads);
      auto vviews = gradient_views(velocity);
      for (size_t p = 0; p < params.size(); ++p) {
        if (train_config.momentum > 0.0) {
          vviews[p] = train_config.momentum * vviews[p] - lr * inv_count * gviews[p];
          params[p] += vviews[p];
        } else {
          params[p] -= lr * inv_count * gviews[p];
        }
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = epoch_loss / static_cast<double>(train_set.size());
    rec.lr = last_lr;
    if (!test_set.empty()) {
      const Eigen::MatrixXd scores = score_all(model, test_set);
      rec.top1 = topk(scores, test_labels, 1);
      rec.top5 = topk(scores, test_labels, 5);
    }
    result.history.push_back(rec);

    if (rec.top1 > result.best_top1 ||
        (test_set.empty() && epoch + 1 == train_config.epochs)) {
      result.best_top1 = rec.top1;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  if (result.history.empty()) result.model = model;
  return result;
}

}  // namespace egotrack
