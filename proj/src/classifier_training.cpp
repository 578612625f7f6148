#include "flare/classifier_training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace flare {

namespace {

using Vector = ClassifierWeights::Vector;

/// log-sum-exp based cross-entropy of one example; fills probabilities.
double example_loss(const ClassifierWeights& w, const TrainingExample& ex, Vector& probs) {
  Vector z = logits(w, ex.x);
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  probs = (z.array() - lse).exp().matrix();
  return lse - z(ex.label);
}

void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  // Fisher-Yates with a plain modulo draw; std::shuffle's output is not
  // portable across standard libraries.
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
}

}  // namespace

double objective(const ClassifierWeights& w, std::span<const TrainingExample> data, double l2) {
  double ce = 0.0;
  Vector probs;
  for (const auto& ex : data) ce += example_loss(w, ex, probs);
  const double n = static_cast<double>(std::max<std::size_t>(data.size(), 1));
  return ce / n + 0.5 * l2 * w.weights.squaredNorm();
}

LossGradient loss_and_gradient(const ClassifierWeights& w, std::span<const TrainingExample> data, double l2) {
  LossGradient g;
  g.grad_weights = l2 * w.weights;
  g.grad_bias = Vector::Zero(w.num_classes());
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(data.size(), 1));

  double ce = 0.0;
  Vector probs;
  for (const auto& ex : data) {
    ce += example_loss(w, ex, probs);
    Vector residual = probs;
    residual(ex.label) -= 1.0;
    g.grad_bias += inv_n * residual;
    for (FeatureVector::InnerIterator it(ex.x); it; ++it) {
      g.grad_weights.col(it.index()) += (inv_n * it.value()) * residual;
    }
  }
  g.loss = ce * inv_n + 0.5 * l2 * w.weights.squaredNorm();
  return g;
}

TrainingResult train(std::span<const TrainingExample> data, std::size_t num_classes,
                     const FeatureConfig& config, const TrainingOptions& options) {
  if (data.empty()) throw ValidationError("no training examples");
  if (options.batch_size == 0) throw UsageError("batch size must be positive");
  if (!(options.learning_rate > 0.0)) throw UsageError("learning rate must be positive");

  TrainingResult result{ClassifierWeights(num_classes, config), {}, {}};
  ClassifierWeights& w = result.weights;
  const auto k = static_cast<Eigen::Index>(num_classes);

  std::vector<std::size_t> per_class(num_classes, 0);
  for (const auto& ex : data) {
    if (ex.label < 0 || ex.label >= k) throw ValidationError("label index out of range for the class order");
    if (ex.x.size() != w.dimension()) throw ValidationError("feature vector dimension does not match config");
    ++per_class[static_cast<std::size_t>(ex.label)];
  }
  std::string missing;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto s = static_cast<Strategy>(c);
    const bool allowed = std::find(options.allow_missing.begin(), options.allow_missing.end(), s) !=
                         options.allow_missing.end();
    if (per_class[c] == 0 && !allowed) missing += (missing.empty() ? "" : ", ") + std::string(to_string(s));
  }
  if (!missing.empty()) throw ValidationError("missing classes: " + missing);

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<TrainingExample const*> batch;
  std::vector<Vector> residuals;
  Vector probs;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      ++step;
      const double lr = options.inverse_sqrt_decay
                            ? options.learning_rate / std::sqrt(static_cast<double>(step))
                            : options.learning_rate;

      // Residuals are computed against the pre-update weights.
      double ce = 0.0;
      residuals.clear();
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = data[order[i]];
        ce += example_loss(w, ex, probs);
        probs(ex.label) -= 1.0;
        residuals.push_back(probs);
      }
      result.step_loss.push_back(ce * inv_b + 0.5 * options.l2 * w.weights.squaredNorm());

      if (options.l2 != 0.0) w.weights *= (1.0 - lr * options.l2);
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = data[order[i]];
        const Vector& r = residuals[i - start];
        w.bias.noalias() -= (lr * inv_b) * r;
        for (FeatureVector::InnerIterator it(ex.x); it; ++it) {
          w.weights.col(it.index()).noalias() -= (lr * inv_b * it.value()) * r;
        }
      }
    }
    result.epoch_loss.push_back(objective(w, data, options.l2));
  }
  if (!w.all_finite()) throw ValidationError("training diverged (non-finite weights)");
  return result;
}

std::vector<TrainingExample> make_training_set(std::span<const LabeledExample> labels, const QADataset& qa,
                                               const FeatureConfig& config) {
  std::vector<TrainingExample> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    const QAExample* ex = qa.find(l.query_id);
    if (ex == nullptr) throw ValidationError(l.query_id + ": label for unknown query");
    out.push_back({featurize(config, ex->question), static_cast<Eigen::Index>(l.label)});
  }
  return out;
}

double training_accuracy(const ClassifierWeights& w, std::span<const TrainingExample> data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : data) {
    if (argmax_cheapest(logits(w, ex.x)) == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace flare
