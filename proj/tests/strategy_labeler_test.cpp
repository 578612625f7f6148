#include "flare/strategy_labeler.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "flare/judge.hpp"
#include "support/fixtures.hpp"

namespace flare {
namespace {

using testing::make_behavior;
using testing::make_qa;

constexpr Strategy N = Strategy::no_retrieval;
constexpr Strategy S = Strategy::single_step;
constexpr Strategy M = Strategy::multi_step;

TEST(LabelCost, PicksCheapestCorrectStrategy) {
  EXPECT_EQ(label_cost({N, S, M}), N);
  EXPECT_EQ(label_cost({S, M}), S);
  EXPECT_EQ(label_cost({M}), M);
  EXPECT_EQ(label_cost({N, M}), N);
  EXPECT_EQ(label_cost({}), std::nullopt);
}

TEST(LabelCost, FourClassMapsEmptyToUnanswerable) {
  EXPECT_EQ(label_cost({}, true), Strategy::unanswerable);
  EXPECT_EQ(label_cost({S}, true), S);
}

TEST(LabelReliability, FollowsOrigin) {
  EXPECT_EQ(label_reliability(make_qa("a", "q", "x", Origin::single_hop)), S);
  EXPECT_EQ(label_reliability(make_qa("b", "q", "x", Origin::multi_hop)), M);
}

TEST(LabelReliability, EveryQueryLabeled) {
  QADataset qa;
  for (int i = 0; i < 1000; ++i) {
    qa.insert(make_qa("q" + std::to_string(i), "question", "gold",
                      i < 500 ? Origin::single_hop : Origin::multi_hop));
  }
  auto labels = label_reliability_dataset(qa);
  ASSERT_EQ(labels.size(), 1000u);
  std::size_t single = 0, multi = 0;
  for (const auto& l : labels) {
    EXPECT_EQ(l.source, LabelSource::reliability);
    single += l.label == S;
    multi += l.label == M;
  }
  EXPECT_EQ(single, 500u);
  EXPECT_EQ(multi, 500u);
}

class LabelerTest : public ::testing::Test {
 protected:
  LabelerTest() : index_(InvertedIndex::build(testing::small_corpus())) {
    qa_.insert(make_qa("q1", "Who wrote Hamlet?", "Shakespeare"));
    qa_.insert(make_qa("q2", "What is the capital of France?", "Paris"));
    qa_.insert(
        make_qa("q3", "Which river flows past Hamlet's author's birthplace?", "Avon", Origin::multi_hop));
    qa_.insert(make_qa("q4", "Who painted the Zork?", "Vermeer", Origin::multi_hop));
    mock_ = MockAnswerer({
        make_behavior("q1", {N, S, M}, "Shakespeare"),
        make_behavior("q2", {S, M}, "Paris"),
        make_behavior("q3", {M}, "Avon", {"Shakespeare was born in Stratford."}),
        make_behavior("q4", {}, "Vermeer"),
    });
  }

  InvertedIndex index_;
  QADataset qa_;
  MockAnswerer mock_;
};

TEST_F(LabelerTest, EvaluateStrategiesRecoversCorrectSet) {
  auto eval = evaluate_strategies(mock_, index_, *qa_.find("q2"));
  EXPECT_TRUE(eval.evaluated());
  EXPECT_EQ(eval.correct.members(), (std::vector<Strategy>{S, M}));
  for (const auto& t : eval.traces) ASSERT_TRUE(t.has_value());
}

TEST_F(LabelerTest, CostDatasetExcludesEmptySets) {
  auto result = label_cost_dataset(mock_, index_, qa_);
  ASSERT_EQ(result.labels.size(), 3u);
  EXPECT_EQ(result.labels[0], (LabeledExample{"q1", N, LabelSource::cost}));
  EXPECT_EQ(result.labels[1], (LabeledExample{"q2", S, LabelSource::cost}));
  EXPECT_EQ(result.labels[2], (LabeledExample{"q3", M, LabelSource::cost}));
  ASSERT_EQ(result.exclusions.size(), 1u);
  EXPECT_EQ(result.exclusions[0].query_id, "q4");
  EXPECT_EQ(result.exclusions[0].reason, kNoCorrectStrategy);
}

TEST_F(LabelerTest, CostDatasetFourClass) {
  LabelingOptions options;
  options.four_class = true;
  auto result = label_cost_dataset(mock_, index_, qa_, options);
  ASSERT_EQ(result.labels.size(), 4u);
  EXPECT_EQ(result.labels[3].label, Strategy::unanswerable);
  EXPECT_TRUE(result.exclusions.empty());
}

class FailingFor final : public Answerer {
 public:
  FailingFor(const Answerer& inner, std::string bad) : inner_(inner), bad_(std::move(bad)) {}
  AnswererReply respond(const AnswerRequest& request) const override {
    if (request.query.id == bad_) throw TransportError("connection reset");
    return inner_.respond(request);
  }

 private:
  const Answerer& inner_;
  std::string bad_;
};

TEST_F(LabelerTest, TransportFailureBecomesExclusion) {
  FailingFor flaky(mock_, "q2");
  auto result = label_cost_dataset(flaky, index_, qa_);
  ASSERT_EQ(result.labels.size(), 2u);
  ASSERT_EQ(result.exclusions.size(), 2u);
  EXPECT_EQ(result.exclusions[0].query_id, "q2");
  EXPECT_NE(result.exclusions[0].reason.find("connection reset"), std::string::npos);
}

TEST_F(LabelerTest, ThreadedLabelingMatchesSerial) {
  LabelingOptions threaded;
  threaded.threads = 4;
  auto a = label_cost_dataset(mock_, index_, qa_);
  auto b = label_cost_dataset(mock_, index_, qa_, threaded);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.exclusions, b.exclusions);
}

TEST(LabelCombined, UnionWithCostPrecedence) {
  std::vector<LabeledExample> cost = {
      {"a", N, LabelSource::cost}, {"b", S, LabelSource::cost}, {"c", M, LabelSource::cost}};
  std::vector<LabeledExample> rel = {{"a", S, LabelSource::reliability},
                                     {"d", S, LabelSource::reliability},
                                     {"e", M, LabelSource::reliability},
                                     {"f", M, LabelSource::reliability}};
  auto combined = label_combined(cost, rel);
  ASSERT_EQ(combined.size(), 6u);
  EXPECT_EQ(combined[0], (LabeledExample{"a", N, LabelSource::combined}));
  for (std::size_t i = 1; i < combined.size(); ++i) EXPECT_LT(combined[i - 1].query_id, combined[i].query_id);
}

TEST(LabelCombined, DisjointSetsAdd) {
  std::vector<LabeledExample> cost = {
      {"a", N, LabelSource::cost}, {"b", S, LabelSource::cost}, {"c", M, LabelSource::cost}};
  std::vector<LabeledExample> rel = {{"d", S, LabelSource::reliability},
                                     {"e", M, LabelSource::reliability},
                                     {"f", M, LabelSource::reliability},
                                     {"g", S, LabelSource::reliability}};
  EXPECT_EQ(label_combined(cost, rel).size(), 7u);
}

TEST(LabelCombined, EmptyCostEqualsReliability) {
  std::vector<LabeledExample> rel = {{"d", S, LabelSource::reliability}, {"e", M, LabelSource::reliability}};
  auto combined = label_combined({}, rel);
  ASSERT_EQ(combined.size(), 2u);
  EXPECT_EQ(combined[0].label, S);
  EXPECT_EQ(combined[1].label, M);
}

TEST(LabelsIo, RoundTripIsByteStable) {
  std::vector<LabeledExample> labels = {{"a", N, LabelSource::cost},
                                        {"b", Strategy::unanswerable, LabelSource::cost}};
  std::ostringstream first;
  write_labels(labels, first);
  std::istringstream in(first.str());
  auto back = read_labels(in);
  EXPECT_EQ(back, labels);
  std::ostringstream second;
  write_labels(back, second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(LabelsIo, RejectsUnknownStrategy) {
  std::istringstream in(R"({"query_id":"a","label":"two_step","source":"cost"})"
                        "\n");
  EXPECT_THROW(read_labels(in), ValidationError);
}

// Randomized consistency: every label equals the brute-force cheapest member.
TEST(LabelerProperty, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  QADataset qa;
  std::vector<OracleBehavior> behaviors;
  for (int i = 0; i < 200; ++i) {
    const auto id = "r" + std::to_string(1000 + i);
    StrategySet set;
    for (auto s : kExecutableStrategies) {
      if (rng() % 2) set.insert(s);
    }
    qa.insert(
        make_qa(id, "Who wrote Hamlet?", "Shakespeare", rng() % 2 ? Origin::single_hop : Origin::multi_hop));
    behaviors.push_back(make_behavior(id, set, "Shakespeare", {"step one"}));
  }
  MockAnswerer mock(behaviors);
  auto index = InvertedIndex::build(testing::small_corpus());
  auto result = label_cost_dataset(mock, index, qa);
  std::size_t checked = 0;
  for (const auto& b : behaviors) {
    const auto& q = *qa.find(b.query_id);
    std::optional<Strategy> expected;
    for (auto s : kExecutableStrategies) {
      auto trace = execute(s, mock, index, query_of(q));
      if (judge(trace.answer, q.gold_answers)) {
        expected = s;
        break;
      }
    }
    auto it = std::find_if(result.labels.begin(), result.labels.end(),
                           [&](const LabeledExample& l) { return l.query_id == b.query_id; });
    if (expected) {
      ASSERT_NE(it, result.labels.end());
      EXPECT_EQ(it->label, *expected);
      ++checked;
    } else {
      EXPECT_EQ(it, result.labels.end());
    }
  }
  EXPECT_EQ(checked + result.exclusions.size(), 200u);
}

}  // namespace
}  // namespace flare
