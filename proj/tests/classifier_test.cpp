#include "flare/classifier.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "flare/weights_io.hpp"
#include "support/temp_dir.hpp"

namespace flare {

inline void PrintTo(WeightFormat format, std::ostream* os) {
  *os << (format == WeightFormat::binary ? "binary" : "json");
}

namespace {

FeatureConfig tiny_config(std::uint64_t dim = 2) {
  FeatureConfig c;
  c.dimension = dim;
  return c;
}

ClassifierWeights random_weights(std::size_t k, const FeatureConfig& config, std::uint64_t seed) {
  ClassifierWeights w(k, config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < w.weights.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.weights.rows(); ++i) w.weights(i, j) = normal(rng);
  }
  for (Eigen::Index i = 0; i < w.bias.size(); ++i) w.bias(i) = normal(rng);
  return w;
}

FeatureVector dense_to_sparse(std::initializer_list<double> values) {
  FeatureVector x(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    if (v != 0.0) x.insert(i) = v;
    ++i;
  }
  return x;
}

TEST(Route, ToyExample) {
  ClassifierWeights w(3, tiny_config());
  w.weights << 0.3, -0.1, 0.5, 0.2, 0.1, 0.1;
  w.bias << -0.4, -0.3, 0.0;
  auto decision = route(w, dense_to_sparse({2.0, 1.0}));
  EXPECT_NEAR(decision.logits(0), 0.1, 1e-12);
  EXPECT_NEAR(decision.logits(1), 0.9, 1e-12);
  EXPECT_NEAR(decision.logits(2), 0.3, 1e-12);
  EXPECT_EQ(decision.predicted, Strategy::single_step);
  EXPECT_EQ(decision.execute, Strategy::single_step);
  EXPECT_NEAR(decision.probabilities.sum(), 1.0, 1e-12);
}

TEST(Route, TiesGoToCheapestClass) {
  ClassifierWeights w(3, tiny_config());
  w.bias << 0.5, 0.5, 0.5;
  EXPECT_EQ(route(w, dense_to_sparse({1.0, 1.0})).predicted, Strategy::no_retrieval);
  w.bias << 0.1, 0.5, 0.5;
  EXPECT_EQ(route(w, dense_to_sparse({1.0, 1.0})).predicted, Strategy::single_step);
}

TEST(Route, UnanswerableExecutesNoRetrieval) {
  ClassifierWeights w(4, tiny_config());
  w.bias << 0.0, 0.0, 0.0, 2.0;
  auto decision = route(w, dense_to_sparse({1.0, 0.0}));
  EXPECT_EQ(decision.predicted, Strategy::unanswerable);
  EXPECT_EQ(decision.execute, Strategy::no_retrieval);
}

TEST(Route, RejectsWrongDimension) {
  ClassifierWeights w(3, tiny_config());
  EXPECT_THROW(logits(w, dense_to_sparse({1.0, 2.0, 3.0})), ValidationError);
}

TEST(Softmax, SumsToOneAndPreservesArgmaxUnderScaling) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd z(4);
    for (int i = 0; i < 4; ++i) z(i) = normal(rng);
    auto p = softmax(z);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_TRUE((p.array() >= 0).all());
    Eigen::Index best;
    p.maxCoeff(&best);
    EXPECT_EQ(best, argmax_cheapest(z));
    for (double t : {0.1, 0.5, 3.0}) EXPECT_EQ(argmax_cheapest(softmax(Eigen::VectorXd(z / t))), best);
  }
  Eigen::VectorXd huge(3);
  huge << 1000.0, 999.0, -1000.0;
  EXPECT_TRUE(softmax(huge).allFinite());
}

class InterpolationTest : public ::testing::Test {
 protected:
  FeatureConfig config_ = tiny_config(64);
  ClassifierWeights coc_ = random_weights(3, config_, 1);
  ClassifierWeights roc_ = random_weights(3, config_, 2);
};

TEST_F(InterpolationTest, EndpointsAreExactCopies) {
  EXPECT_TRUE(interpolate(coc_, roc_, 0.0) == coc_);
  EXPECT_TRUE(interpolate(coc_, roc_, 1.0) == roc_);
}

TEST_F(InterpolationTest, IsAffineInAlpha) {
  auto w02 = interpolate(coc_, roc_, 0.2);
  auto w06 = interpolate(coc_, roc_, 0.6);
  auto w04 = interpolate(w02, w06, 0.5);
  auto direct = interpolate(coc_, roc_, 0.4);
  EXPECT_LT((w04.weights - direct.weights).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((w04.bias - direct.bias).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_F(InterpolationTest, LogitsAreLinearInAlpha) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> bucket(0, 63);
  for (int trial = 0; trial < 100; ++trial) {
    FeatureVector x(64);
    for (int j = 0; j < 5; ++j) x.coeffRef(bucket(rng)) += 1.0;
    const double alpha = unit(rng);
    auto mixed = logits(interpolate(coc_, roc_, alpha), x);
    Eigen::VectorXd expected = (1 - alpha) * logits(coc_, x) + alpha * logits(roc_, x);
    EXPECT_LT((mixed - expected).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST_F(InterpolationTest, RejectsBadInputs) {
  EXPECT_THROW(interpolate(coc_, roc_, -0.1), UsageError);
  EXPECT_THROW(interpolate(coc_, roc_, 1.5), UsageError);
  EXPECT_THROW(interpolate(coc_, roc_, std::nan("")), UsageError);
  auto other = random_weights(3, tiny_config(32), 3);
  EXPECT_THROW(interpolate(coc_, other, 0.5), ValidationError);
  auto four = random_weights(4, config_, 4);
  EXPECT_THROW(interpolate(coc_, four, 0.5), ValidationError);
}

TEST_F(InterpolationTest, ClassifierWrapsEffectiveWeights) {
  auto coc = std::make_shared<const ClassifierWeights>(coc_);
  auto roc = std::make_shared<const ClassifierWeights>(roc_);
  InterpolatedClassifier clf(coc, roc, 0.3);
  EXPECT_DOUBLE_EQ(clf.alpha(), 0.3);
  EXPECT_TRUE(clf.effective() == interpolate(coc_, roc_, 0.3));
}

class WeightsIoTest : public ::testing::TestWithParam<WeightFormat> {};

TEST_P(WeightsIoTest, RoundTripIsBitExact) {
  FeatureConfig config = tiny_config(256);
  config.seed = 99;
  auto w = random_weights(4, config, 11);
  testing::TempDir dir;
  const auto path = dir.path() / "w.weights";
  save_weights(w, path, GetParam());
  auto back = load_weights(path);
  EXPECT_TRUE(back == w);
  EXPECT_EQ(back.features, config);
  EXPECT_NO_THROW(load_weights(path, config));
}

TEST_P(WeightsIoTest, DimensionMismatchIsRejected) {
  FeatureConfig small = tiny_config(std::uint64_t{1} << 16);
  auto w = random_weights(3, small, 12);
  std::stringstream buffer;
  save_weights(w, buffer, GetParam());
  EXPECT_THROW(load_weights(buffer, FeatureConfig{}), ValidationError);
}

TEST_P(WeightsIoTest, TruncatedFileIsRejected) {
  auto w = random_weights(3, tiny_config(16), 13);
  std::stringstream buffer;
  save_weights(w, buffer, GetParam());
  const auto bytes = buffer.str();
  std::istringstream cut(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_weights(cut), ValidationError);
}

INSTANTIATE_TEST_SUITE_P(Formats, WeightsIoTest, ::testing::Values(WeightFormat::binary, WeightFormat::json),
                         [](const ::testing::TestParamInfo<WeightFormat>& info) {
                           return info.param == WeightFormat::binary ? std::string("binary")
                                                                     : std::string("json");
                         });

TEST(WeightsIo, RejectsTrailingBytesAndBadMagic) {
  auto w = random_weights(3, tiny_config(8), 14);
  std::stringstream buffer;
  save_weights(w, buffer);
  std::istringstream extra(buffer.str() + "x");
  EXPECT_THROW(load_weights(extra), ValidationError);
  std::istringstream bad("NOTWEIGHTS0000000000000000");
  EXPECT_THROW(load_weights(bad), ValidationError);
}

}  // namespace
}  // namespace flare
