#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "flare/errors.hpp"
#include "flare/features.hpp"
#include "flare/strategy.hpp"

namespace flare {

/// K x D linear softmax classifier over hashed query features. Row k of
/// `weights` scores class k; class order is the cost order
/// [no_retrieval, single_step, multi_step(, unanswerable)].
template <typename Scalar>
struct BasicClassifierWeights {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weights;
  Vector bias;
  FeatureConfig features;

  BasicClassifierWeights() = default;

  BasicClassifierWeights(std::size_t num_classes, const FeatureConfig& config) : features(config) {
    class_order(num_classes);
    config.validate();
    weights =
        Matrix::Zero(static_cast<Eigen::Index>(num_classes), static_cast<Eigen::Index>(config.dimension));
    bias = Vector::Zero(static_cast<Eigen::Index>(num_classes));
  }

  Eigen::Index num_classes() const { return weights.rows(); }
  Eigen::Index dimension() const { return weights.cols(); }
  std::vector<Strategy> classes() const { return class_order(static_cast<std::size_t>(num_classes())); }

  bool all_finite() const { return weights.allFinite() && bias.allFinite(); }

  template <typename Other>
  BasicClassifierWeights<Other> cast() const {
    BasicClassifierWeights<Other> out;
    out.weights = weights.template cast<Other>();
    out.bias = bias.template cast<Other>();
    out.features = features;
    return out;
  }

  friend bool operator==(const BasicClassifierWeights& a, const BasicClassifierWeights& b) {
    return a.features == b.features && a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.weights == b.weights && a.bias == b.bias;
  }
};

using ClassifierWeights = BasicClassifierWeights<double>;

/// W x + b.
template <typename Scalar>
typename BasicClassifierWeights<Scalar>::Vector logits(const BasicClassifierWeights<Scalar>& w,
                                                       const FeatureVector& x) {
  if (x.size() != w.dimension()) throw ValidationError("feature vector dimension does not match classifier");
  typename BasicClassifierWeights<Scalar>::Vector out = w.bias;
  for (FeatureVector::InnerIterator it(x); it; ++it) {
    out.noalias() += w.weights.col(it.index()) * static_cast<Scalar>(it.value());
  }
  return out;
}

/// Numerically stable softmax.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p = (z.array() - z.maxCoeff()).exp().matrix();
  p /= p.sum();
  return p;
}

/// Index of the largest logit; ties go to the lowest index (cheapest class).
template <typename Derived>
Eigen::Index argmax_cheapest(const Eigen::MatrixBase<Derived>& z) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < z.size(); ++k) {
    if (z(k) > z(best)) best = k;
  }
  return best;
}

/// (1 - alpha) * coc + alpha * roc on weights and bias. alpha = 0 and 1
/// return exact copies of the endpoints.
template <typename Scalar>
BasicClassifierWeights<Scalar> interpolate(const BasicClassifierWeights<Scalar>& coc,
                                           const BasicClassifierWeights<Scalar>& roc, Scalar alpha) {
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) throw UsageError("alpha must be in [0,1]");
  if (coc.features != roc.features)
    throw ValidationError("cannot interpolate classifiers with different feature configs");
  if (coc.num_classes() != roc.num_classes() || coc.dimension() != roc.dimension()) {
    throw ValidationError("cannot interpolate classifiers with different shapes");
  }
  if (alpha == Scalar(0)) return coc;
  if (alpha == Scalar(1)) return roc;

  BasicClassifierWeights<Scalar> out;
  out.features = coc.features;
  out.weights = (Scalar(1) - alpha) * coc.weights + alpha * roc.weights;
  out.bias = (Scalar(1) - alpha) * coc.bias + alpha * roc.bias;
  return out;
}

template <typename Scalar>
struct BasicRouteDecision {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// argmax class; may be unanswerable for a 4-class model.
  Strategy predicted = Strategy::no_retrieval;
  /// What to run. Unanswerable falls back to the cheapest strategy.
  Strategy execute = Strategy::no_retrieval;
  Vector logits;
  Vector probabilities;
};

using RouteDecision = BasicRouteDecision<double>;

template <typename Scalar>
BasicRouteDecision<Scalar> route(const BasicClassifierWeights<Scalar>& w, const FeatureVector& x) {
  BasicRouteDecision<Scalar> d;
  d.logits = logits(w, x);
  d.probabilities = softmax(d.logits);
  d.predicted = static_cast<Strategy>(argmax_cheapest(d.logits));
  d.execute = is_executable(d.predicted) ? d.predicted : Strategy::no_retrieval;
  return d;
}

template <typename Scalar>
BasicRouteDecision<Scalar> route(const BasicClassifierWeights<Scalar>& w, std::string_view query) {
  return route(w, featurize(w.features, query));
}

/// W_coc / W_roc pair plus the effective weights for one alpha. The
/// endpoint weights are shared, so sweeping alpha does not copy them.
template <typename Scalar>
class BasicInterpolatedClassifier {
 public:
  using Weights = BasicClassifierWeights<Scalar>;

  BasicInterpolatedClassifier(std::shared_ptr<const Weights> coc, std::shared_ptr<const Weights> roc,
                              Scalar alpha)
      : coc_(std::move(coc)),
        roc_(std::move(roc)),
        alpha_(alpha),
        effective_(interpolate(*coc_, *roc_, alpha)) {}

  Scalar alpha() const { return alpha_; }
  const Weights& coc() const { return *coc_; }
  const Weights& roc() const { return *roc_; }
  const Weights& effective() const { return effective_; }

  BasicRouteDecision<Scalar> route(std::string_view query) const { return flare::route(effective_, query); }
  BasicRouteDecision<Scalar> route(const FeatureVector& x) const { return flare::route(effective_, x); }

 private:
  std::shared_ptr<const Weights> coc_;
  std::shared_ptr<const Weights> roc_;
  Scalar alpha_;
  Weights effective_;
};

using InterpolatedClassifier = BasicInterpolatedClassifier<double>;

}  // namespace flare
