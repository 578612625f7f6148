#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flare/answer_engine.hpp"
#include "flare/classifier.hpp"
#include "flare/corpus_store.hpp"
#include "flare/judge.hpp"

namespace flare {

/// Retrieval cost of a trace: the number of retrieval calls it made.
inline std::size_t cost_of(const AnswerTrace& trace) { return trace.steps_used(); }

/// How a query is routed before execution.
class Policy {
 public:
  static Policy static_strategy(Strategy s);
  static Policy adaptive_rag(std::shared_ptr<const ClassifierWeights> weights);
  static Policy flare(std::shared_ptr<const ClassifierWeights> coc,
                      std::shared_ptr<const ClassifierWeights> roc, double alpha);

  /// "static:no", "static:single", "static:multi", "adaptive_rag" or "flare".
  const std::string& kind() const { return kind_; }
  std::optional<double> alpha() const { return alpha_; }
  /// kind() plus ":alpha=<a>" for flare policies.
  std::string name() const;

  Strategy decide(std::string_view query) const;

 private:
  std::string kind_;
  std::optional<double> alpha_;
  std::optional<Strategy> fixed_;
  std::shared_ptr<const ClassifierWeights> weights_;
};

/// Accepts "static:no", "static:single", "static:multi". Anything else is a
/// UsageError (classifier policies need weights and are built directly).
Strategy parse_static_policy(std::string_view name);

struct OutcomeStats {
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t total_steps = 0;

  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n); }
  double mean_steps() const {
    return n == 0 ? 0.0 : static_cast<double>(total_steps) / static_cast<double>(n);
  }
};

struct EvalRecord {
  std::string policy;
  std::optional<double> alpha;
  OutcomeStats overall;
  std::map<Origin, OutcomeStats> per_origin;
  /// Queries dropped after a transport error (skip mode only).
  std::size_t skipped = 0;

  double accuracy() const { return overall.accuracy(); }
  double mean_steps() const { return overall.mean_steps(); }
  std::size_t total_steps() const { return overall.total_steps; }
  std::size_t n() const { return overall.n; }
};

struct QueryLog {
  std::string query_id;
  std::string policy;
  Strategy decision = Strategy::no_retrieval;
  std::size_t steps = 0;
  bool correct = false;
  Origin origin = Origin::single_hop;
  /// Transport error message when the query was skipped.
  std::optional<std::string> error;
};

struct PolicyRun {
  EvalRecord record;
  std::vector<QueryLog> log;
};

enum class TransportErrorMode { abort, skip };

struct EvalOptions {
  ExecutionOptions execution;
  TransportErrorMode on_transport_error = TransportErrorMode::abort;
  std::size_t threads = 1;
};

/// Routes, executes, judges and cost-accounts every query. The per-query
/// log is in dataset order.
PolicyRun run_policy(const Policy& policy, const QADataset& qa, const Answerer& answerer,
                     const InvertedIndex& index, const EvalOptions& options = {});

inline const std::vector<double> kDefaultAlphaGrid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

/// One flare run per alpha, in grid order.
std::vector<PolicyRun> sweep_alpha(const QADataset& qa, std::shared_ptr<const ClassifierWeights> coc,
                                   std::shared_ptr<const ClassifierWeights> roc, std::span<const double> grid,
                                   const Answerer& answerer, const InvertedIndex& index,
                                   const EvalOptions& options = {});

/// "0,0.2,0.4" -> {0, 0.2, 0.4}; each value must lie in [0,1].
std::vector<double> parse_alpha_grid(std::string_view text);

/// Shortest text that parses back to the same alpha, with at least one
/// decimal ("0.0", "0.4", "0.25").
std::string format_alpha(double alpha);

inline constexpr std::string_view kReportHeader = "policy,alpha,accuracy,mean_steps,total_steps,n";

/// policy,alpha,accuracy(3 dp),mean_steps(1 dp),total_steps,n
std::string format_report_row(const EvalRecord& record);

/// Header plus rows sorted by (policy, alpha).
void write_report_csv(std::span<const EvalRecord> records, std::ostream& out);
void write_report_csv(std::span<const EvalRecord> records, const std::filesystem::path& path);

/// JSONL: query_id, policy, decision, steps, correct (+ origin, error).
void write_query_log(std::span<const QueryLog> log, std::ostream& out);
void write_query_log(std::span<const QueryLog> log, const std::filesystem::path& path);

}  // namespace flare
