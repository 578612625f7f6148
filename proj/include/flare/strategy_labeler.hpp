#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flare/answer_engine.hpp"
#include "flare/bm25.hpp"
#include "flare/corpus_store.hpp"
#include "flare/strategy.hpp"

namespace flare {

enum class LabelSource { cost, reliability, combined };

std::string_view to_string(LabelSource source);
LabelSource parse_label_source(std::string_view name);

struct LabeledExample {
  std::string query_id;
  Strategy label = Strategy::single_step;
  LabelSource source = LabelSource::cost;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct Exclusion {
  std::string query_id;
  std::string reason;

  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

/// S_q for one query together with the traces that produced it.
struct StrategyEvaluation {
  std::string query_id;
  StrategySet correct;
  std::array<std::optional<AnswerTrace>, 3> traces;
  /// Set when a transport error prevented evaluation; `correct` is then
  /// meaningless.
  std::optional<std::string> failure;

  bool evaluated() const { return !failure.has_value(); }
};

/// Runs all three strategies and judges each answer against the gold set.
StrategyEvaluation evaluate_strategies(const Answerer& answerer, const InvertedIndex& index,
                                       const QAExample& query, const ExecutionOptions& options = {});

/// Cheapest member of S_q. An empty set yields nullopt (exclusion), or
/// unanswerable when four_class is on.
std::optional<Strategy> label_cost(StrategySet correct, bool four_class = false);

/// single_hop -> single_step, multi_hop -> multi_step.
Strategy label_reliability(const QAExample& query);

struct CostLabeling {
  std::vector<LabeledExample> labels;
  std::vector<Exclusion> exclusions;
};

struct LabelingOptions {
  ExecutionOptions execution;
  bool four_class = false;
  std::size_t threads = 1;
};

inline constexpr std::string_view kNoCorrectStrategy = "no strategy produced a correct answer";

/// Cost labels for a whole dataset, sorted by query_id. Queries with an
/// empty S_q (four_class off) or a transport failure go to exclusions.
CostLabeling label_cost_dataset(const Answerer& answerer, const InvertedIndex& index, const QADataset& qa,
                                const LabelingOptions& options = {});

/// Reliability labels for every query, sorted by query_id.
std::vector<LabeledExample> label_reliability_dataset(const QADataset& qa);

/// Union of both sets tagged source=combined; the cost label wins when a
/// query has both. Sorted by query_id.
std::vector<LabeledExample> label_combined(std::span<const LabeledExample> cost,
                                           std::span<const LabeledExample> reliability);

void write_labels(std::span<const LabeledExample> labels, std::ostream& out);
void write_labels(std::span<const LabeledExample> labels, const std::filesystem::path& path);
std::vector<LabeledExample> read_labels(std::istream& in);
std::vector<LabeledExample> read_labels(const std::filesystem::path& path);

void write_exclusions(std::span<const Exclusion> exclusions, std::ostream& out);
void write_exclusions(std::span<const Exclusion> exclusions, const std::filesystem::path& path);

}  // namespace flare
