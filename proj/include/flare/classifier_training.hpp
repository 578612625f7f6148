#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flare/classifier.hpp"
#include "flare/corpus_store.hpp"
#include "flare/strategy_labeler.hpp"

namespace flare {

struct TrainingExample {
  FeatureVector x;
  Eigen::Index label = 0;
};

struct TrainingOptions {
  double learning_rate = 0.1;
  /// lr_t = learning_rate / sqrt(t) with t the 1-based step count.
  bool inverse_sqrt_decay = true;
  double l2 = 1e-4;
  std::size_t batch_size = 64;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;
  /// Classes that may have no training examples. Their rows only see the
  /// L2 penalty and the softmax push-down.
  std::vector<Strategy> allow_missing;
};

struct TrainingResult {
  ClassifierWeights weights;
  /// Batch objective evaluated before each update.
  std::vector<double> step_loss;
  /// Full-data objective after each epoch.
  std::vector<double> epoch_loss;
};

struct LossGradient {
  double loss = 0.0;
  ClassifierWeights::Matrix grad_weights;
  ClassifierWeights::Vector grad_bias;
};

/// Mean cross-entropy + (l2 / 2) * ||W||_F^2 (bias unpenalized).
double objective(const ClassifierWeights& w, std::span<const TrainingExample> data, double l2);

/// Objective and its analytic gradient.
LossGradient loss_and_gradient(const ClassifierWeights& w, std::span<const TrainingExample> data, double l2);

/// Mini-batch gradient descent on the objective, deterministic in
/// options.seed. Throws ValidationError when a class outside
/// options.allow_missing has no examples.
TrainingResult train(std::span<const TrainingExample> data, std::size_t num_classes,
                     const FeatureConfig& config, const TrainingOptions& options = {});

/// Joins labels with their question text. Labels whose query_id is not in
/// `qa` are a ValidationError.
std::vector<TrainingExample> make_training_set(std::span<const LabeledExample> labels, const QADataset& qa,
                                               const FeatureConfig& config);

/// Fraction of examples whose argmax matches the label.
double training_accuracy(const ClassifierWeights& w, std::span<const TrainingExample> data);

}  // namespace flare
