#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flare/bm25.hpp"
#include "flare/corpus_store.hpp"
#include "flare/errors.hpp"
#include "flare/strategy.hpp"

namespace flare {

struct RetrievalStep {
  std::string query;
  std::vector<std::string> doc_ids;

  friend bool operator==(const RetrievalStep&, const RetrievalStep&) = default;
};

/// Answer plus the retrieval record that defines its cost.
struct AnswerTrace {
  std::string query_id;
  Strategy strategy = Strategy::no_retrieval;
  std::string answer;
  std::vector<RetrievalStep> steps;

  std::size_t steps_used() const { return steps.size(); }

  friend bool operator==(const AnswerTrace&, const AnswerTrace&) = default;
};

/// A query as the engine sees it: an id (used by the mock oracle) and text.
struct QueryRef {
  std::string_view id;
  std::string_view text;
};

inline QueryRef query_of(const QAExample& ex) { return {ex.id, ex.question}; }

struct Passage {
  std::string doc_id;
  std::string title;
  std::string text;
};

enum class ReplyKind { final_answer, next_query };

struct AnswererReply {
  ReplyKind kind = ReplyKind::final_answer;
  std::string text;
};

struct AnswerRequest {
  QueryRef query;
  Strategy mode = Strategy::no_retrieval;
  std::span<const Passage> context;
  /// Intermediate reasoning sentences emitted so far (multi-step only).
  std::span<const std::string> reasoning;
};

/// The single seam between the engine and any LLM. Implementations must be
/// safe to call concurrently. Failures to reach the model throw
/// TransportError.
class Answerer {
 public:
  virtual ~Answerer() = default;
  virtual AnswererReply respond(const AnswerRequest& request) const = 0;
};

/// Transport failure during execution. Carries whatever trace had been
/// recorded before the failure.
class ExecutionError : public TransportError {
 public:
  ExecutionError(const std::string& what, AnswerTrace partial)
      : TransportError(what), partial_(std::move(partial)) {}
  const AnswerTrace& partial_trace() const { return partial_; }

 private:
  AnswerTrace partial_;
};

struct ExecutionOptions {
  std::size_t k = kDefaultTopK;
  std::size_t max_steps = 6;
};

AnswerTrace answer_no_retrieval(const Answerer& answerer, QueryRef query);

AnswerTrace answer_single_step(const Answerer& answerer, const InvertedIndex& index, QueryRef query,
                               std::size_t k = kDefaultTopK);

/// Interleaved retrieve/reason loop. Each reply is either the final answer
/// or the next retrieval query. At max_steps the last reasoning sentence is
/// returned as a best-effort answer.
AnswerTrace answer_multi_step(const Answerer& answerer, const InvertedIndex& index, QueryRef query,
                              std::size_t k = kDefaultTopK, std::size_t max_steps = 6);

/// Dispatches on strategy. Throws std::invalid_argument for unanswerable.
AnswerTrace execute(Strategy strategy, const Answerer& answerer, const InvertedIndex& index, QueryRef query,
                    const ExecutionOptions& options = {});

// ---------------------------------------------------------------------------
// Mock oracle

struct OracleBehavior {
  std::string query_id;
  StrategySet correct_under;
  /// Canned answers indexed by executable strategy.
  std::array<std::string, 3> answers;
  std::vector<std::string> multi_step_script;

  const std::string& answer_for(Strategy s) const { return answers.at(static_cast<std::size_t>(s)); }
};

/// Deterministic stand-in for an LLM: per query id, a table of canned
/// answers and a scripted chain of follow-up queries.
class MockAnswerer final : public Answerer {
 public:
  MockAnswerer() = default;
  explicit MockAnswerer(std::vector<OracleBehavior> behaviors);

  AnswererReply respond(const AnswerRequest& request) const override;

  const OracleBehavior* find(std::string_view query_id) const;
  std::size_t size() const { return behaviors_.size(); }

 private:
  std::map<std::string, OracleBehavior, std::less<>> behaviors_;
};

std::vector<OracleBehavior> read_oracle(std::istream& in);

/// Checks every behavior against the QA set: the query id must exist and a
/// canned answer contains a gold answer iff its strategy is in correct_under.
void validate_oracle(std::span<const OracleBehavior> behaviors, const QADataset& qa);

/// read_oracle + validate_oracle.
MockAnswerer load_oracle(const std::filesystem::path& path, const QADataset& qa);

void write_oracle(std::span<const OracleBehavior> behaviors, std::ostream& out);

/// {"query_id","strategy","answer","steps_used","steps":[{"query","doc_ids"}]}
std::string trace_to_json(const AnswerTrace& trace);

}  // namespace flare
