#include "flare/strategy_labeler.hpp"

#include <algorithm>
#include <map>

#include "flare/judge.hpp"
#include "flare/parallel.hpp"
#include "jsonl.hpp"

namespace flare {

using detail::Json;
using detail::OrderedJson;

std::string_view to_string(LabelSource source) {
  switch (source) {
    case LabelSource::cost:
      return "cost";
    case LabelSource::reliability:
      return "reliability";
    case LabelSource::combined:
      return "combined";
  }
  return "unknown";
}

LabelSource parse_label_source(std::string_view name) {
  if (name == "cost") return LabelSource::cost;
  if (name == "reliability") return LabelSource::reliability;
  if (name == "combined") return LabelSource::combined;
  throw ValidationError("unknown label source '" + std::string(name) + "'");
}

StrategyEvaluation evaluate_strategies(const Answerer& answerer, const InvertedIndex& index,
                                       const QAExample& query, const ExecutionOptions& options) {
  StrategyEvaluation eval;
  eval.query_id = query.id;
  for (auto s : kExecutableStrategies) {
    try {
      auto trace = execute(s, answerer, index, query_of(query), options);
      if (judge(trace.answer, query.gold_answers)) eval.correct.insert(s);
      eval.traces[static_cast<std::size_t>(s)] = std::move(trace);
    } catch (const TransportError& e) {
      eval.failure = std::string(to_string(s)) + ": " + e.what();
      eval.correct = {};
      return eval;
    }
  }
  return eval;
}

std::optional<Strategy> label_cost(StrategySet correct, bool four_class) {
  for (auto s : kExecutableStrategies) {
    if (correct.contains(s)) return s;
  }
  if (four_class) return Strategy::unanswerable;
  return std::nullopt;
}

Strategy label_reliability(const QAExample& query) {
  return query.origin == Origin::single_hop ? Strategy::single_step : Strategy::multi_step;
}

namespace {

template <typename T>
void sort_by_query_id(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.query_id < b.query_id; });
}

}  // namespace

CostLabeling label_cost_dataset(const Answerer& answerer, const InvertedIndex& index, const QADataset& qa,
                                const LabelingOptions& options) {
  std::vector<StrategyEvaluation> evals(qa.size());
  parallel_for(qa.size(), options.threads, [&](std::size_t i) {
    evals[i] = evaluate_strategies(answerer, index, qa[i], options.execution);
  });

  CostLabeling out;
  for (const auto& eval : evals) {
    if (!eval.evaluated()) {
      out.exclusions.push_back({eval.query_id, "transport error (" + *eval.failure + ")"});
      continue;
    }
    if (auto label = label_cost(eval.correct, options.four_class)) {
      out.labels.push_back({eval.query_id, *label, LabelSource::cost});
    } else {
      out.exclusions.push_back({eval.query_id, std::string(kNoCorrectStrategy)});
    }
  }
  sort_by_query_id(out.labels);
  sort_by_query_id(out.exclusions);
  return out;
}

std::vector<LabeledExample> label_reliability_dataset(const QADataset& qa) {
  std::vector<LabeledExample> out;
  out.reserve(qa.size());
  for (const auto& ex : qa) out.push_back({ex.id, label_reliability(ex), LabelSource::reliability});
  sort_by_query_id(out);
  return out;
}

std::vector<LabeledExample> label_combined(std::span<const LabeledExample> cost,
                                           std::span<const LabeledExample> reliability) {
  std::map<std::string, Strategy> merged;
  for (const auto& l : reliability) merged[l.query_id] = l.label;
  for (const auto& l : cost) merged[l.query_id] = l.label;

  std::vector<LabeledExample> out;
  out.reserve(merged.size());
  for (const auto& [id, label] : merged) out.push_back({id, label, LabelSource::combined});
  return out;
}

void write_labels(std::span<const LabeledExample> labels, std::ostream& out) {
  for (const auto& l : labels) {
    OrderedJson obj;
    obj["query_id"] = l.query_id;
    obj["label"] = to_string(l.label);
    obj["source"] = to_string(l.source);
    out << obj.dump() << '\n';
  }
}

void write_labels(std::span<const LabeledExample> labels, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_labels(labels, out);
}

std::vector<LabeledExample> read_labels(std::istream& in) {
  std::vector<LabeledExample> labels;
  detail::for_each_jsonl(in, [&](const Json& obj, std::size_t line_no) {
    LabeledExample l;
    l.query_id = detail::require_string(obj, "query_id", line_no);
    l.label = parse_strategy(detail::require_string(obj, "label", line_no));
    l.source = parse_label_source(detail::require_string(obj, "source", line_no));
    labels.push_back(std::move(l));
  });
  return labels;
}

std::vector<LabeledExample> read_labels(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_labels(in);
}

void write_exclusions(std::span<const Exclusion> exclusions, std::ostream& out) {
  for (const auto& e : exclusions) {
    OrderedJson obj;
    obj["query_id"] = e.query_id;
    obj["reason"] = e.reason;
    out << obj.dump() << '\n';
  }
}

void write_exclusions(std::span<const Exclusion> exclusions, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_exclusions(exclusions, out);
}

}  // namespace flare
