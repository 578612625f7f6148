#include "flare/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "flare/parallel.hpp"
#include "jsonl.hpp"

namespace flare {

using detail::OrderedJson;

Policy Policy::static_strategy(Strategy s) {
  if (!is_executable(s)) throw UsageError("static policy needs an executable strategy");
  Policy p;
  p.fixed_ = s;
  switch (s) {
    case Strategy::no_retrieval:
      p.kind_ = "static:no";
      break;
    case Strategy::single_step:
      p.kind_ = "static:single";
      break;
    default:
      p.kind_ = "static:multi";
      break;
  }
  return p;
}

Policy Policy::adaptive_rag(std::shared_ptr<const ClassifierWeights> weights) {
  if (!weights) throw UsageError("adaptive_rag policy needs weights");
  Policy p;
  p.kind_ = "adaptive_rag";
  p.weights_ = std::move(weights);
  return p;
}

Policy Policy::flare(std::shared_ptr<const ClassifierWeights> coc,
                     std::shared_ptr<const ClassifierWeights> roc, double alpha) {
  if (!coc || !roc) throw UsageError("flare policy needs both classifiers");
  Policy p;
  p.kind_ = "flare";
  p.alpha_ = alpha;
  p.weights_ = std::make_shared<const ClassifierWeights>(interpolate(*coc, *roc, alpha));
  return p;
}

std::string Policy::name() const {
  if (alpha_) return kind_ + ":alpha=" + format_alpha(*alpha_);
  return kind_;
}

Strategy Policy::decide(std::string_view query) const {
  if (fixed_) return *fixed_;
  return route(*weights_, query).execute;
}

Strategy parse_static_policy(std::string_view name) {
  if (name == "static:no") return Strategy::no_retrieval;
  if (name == "static:single") return Strategy::single_step;
  if (name == "static:multi") return Strategy::multi_step;
  throw UsageError("unknown static policy '" + std::string(name) + "'");
}

PolicyRun run_policy(const Policy& policy, const QADataset& qa, const Answerer& answerer,
                     const InvertedIndex& index, const EvalOptions& options) {
  PolicyRun run;
  run.record.policy = policy.kind();
  run.record.alpha = policy.alpha();
  run.log.resize(qa.size());
  const std::string name = policy.name();

  parallel_for(qa.size(), options.threads, [&](std::size_t i) {
    const QAExample& ex = qa[i];
    QueryLog& entry = run.log[i];
    entry.query_id = ex.id;
    entry.policy = name;
    entry.origin = ex.origin;
    entry.decision = policy.decide(ex.question);
    try {
      auto trace = execute(entry.decision, answerer, index, query_of(ex), options.execution);
      entry.steps = cost_of(trace);
      entry.correct = judge(trace.answer, ex.gold_answers);
    } catch (const TransportError& e) {
      if (options.on_transport_error == TransportErrorMode::abort) throw;
      entry.error = e.what();
    }
  });

  for (const auto& entry : run.log) {
    if (entry.error) {
      ++run.record.skipped;
      continue;
    }
    for (OutcomeStats* stats : {&run.record.overall, &run.record.per_origin[entry.origin]}) {
      ++stats->n;
      stats->total_steps += entry.steps;
      if (entry.correct) ++stats->correct;
    }
  }
  return run;
}

std::vector<PolicyRun> sweep_alpha(const QADataset& qa, std::shared_ptr<const ClassifierWeights> coc,
                                   std::shared_ptr<const ClassifierWeights> roc, std::span<const double> grid,
                                   const Answerer& answerer, const InvertedIndex& index,
                                   const EvalOptions& options) {
  std::vector<PolicyRun> runs;
  runs.reserve(grid.size());
  for (double alpha : grid)
    runs.push_back(run_policy(Policy::flare(coc, roc, alpha), qa, answerer, index, options));
  return runs;
}

std::vector<double> parse_alpha_grid(std::string_view text) {
  std::vector<double> grid;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("bad alpha value '" + std::string(item) + "'");
    }
    if (!(value >= 0.0 && value <= 1.0)) throw UsageError("alpha must be in [0,1]");
    grid.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (grid.empty()) throw UsageError("empty alpha grid");
  return grid;
}

std::string format_alpha(double alpha) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, alpha);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string format_report_row(const EvalRecord& record) {
  char numbers[128];
  std::snprintf(numbers, sizeof numbers, "%.3f,%.1f,%zu,%zu", record.accuracy(), record.mean_steps(),
                record.total_steps(), record.n());
  return record.policy + "," + (record.alpha ? format_alpha(*record.alpha) : std::string()) + "," + numbers;
}

void write_report_csv(std::span<const EvalRecord> records, std::ostream& out) {
  std::vector<const EvalRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const EvalRecord* a, const EvalRecord* b) {
    if (a->policy != b->policy) return a->policy < b->policy;
    return a->alpha.value_or(-1.0) < b->alpha.value_or(-1.0);
  });
  out << kReportHeader << '\n';
  for (const auto* r : sorted) out << format_report_row(*r) << '\n';
}

void write_report_csv(std::span<const EvalRecord> records, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_report_csv(records, out);
}

void write_query_log(std::span<const QueryLog> log, std::ostream& out) {
  for (const auto& entry : log) {
    OrderedJson obj;
    obj["query_id"] = entry.query_id;
    obj["policy"] = entry.policy;
    obj["decision"] = to_string(entry.decision);
    obj["steps"] = entry.steps;
    obj["correct"] = entry.correct;
    obj["origin"] = to_string(entry.origin);
    if (entry.error) obj["error"] = *entry.error;
    out << obj.dump() << '\n';
  }
}

void write_query_log(std::span<const QueryLog> log, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_query_log(log, out);
}

}  // namespace flare
