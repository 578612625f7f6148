#include "flare/answer_engine.hpp"

#include <set>
#include <stdexcept>

#include "flare/judge.hpp"
#include "jsonl.hpp"

namespace flare {

using detail::Json;
using detail::OrderedJson;

namespace {

std::vector<Passage> to_passages(const InvertedIndex& index, const std::vector<RetrievalResult>& hits) {
  std::vector<Passage> passages;
  passages.reserve(hits.size());
  for (const auto& hit : hits) {
    const Document* doc = index.find_document(hit.doc_id);
    passages.push_back({doc->id, doc->title, doc->text});
  }
  return passages;
}

std::vector<std::string> ids_of(const std::vector<RetrievalResult>& hits) {
  std::vector<std::string> ids;
  ids.reserve(hits.size());
  for (const auto& hit : hits) ids.push_back(hit.doc_id);
  return ids;
}

AnswerTrace start_trace(QueryRef query, Strategy strategy) {
  AnswerTrace trace;
  trace.query_id = std::string(query.id);
  trace.strategy = strategy;
  return trace;
}

AnswererReply call(const Answerer& answerer, const AnswerRequest& request, const AnswerTrace& trace) {
  try {
    return answerer.respond(request);
  } catch (const ExecutionError&) {
    throw;
  } catch (const TransportError& e) {
    throw ExecutionError(e.what(), trace);
  }
}

}  // namespace

AnswerTrace answer_no_retrieval(const Answerer& answerer, QueryRef query) {
  auto trace = start_trace(query, Strategy::no_retrieval);
  AnswerRequest request{query, Strategy::no_retrieval, {}, {}};
  trace.answer = call(answerer, request, trace).text;
  return trace;
}

AnswerTrace answer_single_step(const Answerer& answerer, const InvertedIndex& index, QueryRef query,
                               std::size_t k) {
  auto trace = start_trace(query, Strategy::single_step);
  auto hits = index.search(query.text, k);
  trace.steps.push_back({std::string(query.text), ids_of(hits)});
  const auto passages = to_passages(index, hits);
  AnswerRequest request{query, Strategy::single_step, passages, {}};
  trace.answer = call(answerer, request, trace).text;
  return trace;
}

AnswerTrace answer_multi_step(const Answerer& answerer, const InvertedIndex& index, QueryRef query,
                              std::size_t k, std::size_t max_steps) {
  if (max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");

  auto trace = start_trace(query, Strategy::multi_step);
  std::vector<Passage> context;
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> reasoning;
  std::string current(query.text);

  while (trace.steps_used() < max_steps) {
    auto hits = index.search(current, k);
    trace.steps.push_back({current, ids_of(hits)});
    for (auto& p : to_passages(index, hits)) {
      if (seen.insert(p.doc_id).second) context.push_back(std::move(p));
    }

    AnswerRequest request{query, Strategy::multi_step, context, reasoning};
    auto reply = call(answerer, request, trace);
    if (reply.kind == ReplyKind::final_answer) {
      trace.answer = std::move(reply.text);
      return trace;
    }
    reasoning.push_back(reply.text);
    current = std::move(reply.text);
  }

  // Step budget exhausted: the latest reasoning sentence is the answer.
  trace.answer = reasoning.empty() ? std::string() : reasoning.back();
  return trace;
}

AnswerTrace execute(Strategy strategy, const Answerer& answerer, const InvertedIndex& index, QueryRef query,
                    const ExecutionOptions& options) {
  switch (strategy) {
    case Strategy::no_retrieval:
      return answer_no_retrieval(answerer, query);
    case Strategy::single_step:
      return answer_single_step(answerer, index, query, options.k);
    case Strategy::multi_step:
      return answer_multi_step(answerer, index, query, options.k, options.max_steps);
    case Strategy::unanswerable:
      break;
  }
  throw std::invalid_argument("unanswerable is not an executable strategy");
}

// ---------------------------------------------------------------------------

MockAnswerer::MockAnswerer(std::vector<OracleBehavior> behaviors) {
  for (auto& b : behaviors) {
    std::string id = b.query_id;
    if (!behaviors_.emplace(id, std::move(b)).second) {
      throw ValidationError("oracle: duplicate query_id " + id);
    }
  }
}

const OracleBehavior* MockAnswerer::find(std::string_view query_id) const {
  auto it = behaviors_.find(query_id);
  return it == behaviors_.end() ? nullptr : &it->second;
}

AnswererReply MockAnswerer::respond(const AnswerRequest& request) const {
  const OracleBehavior* b = find(request.query.id);
  if (b == nullptr)
    throw ValidationError("oracle: no behavior for query_id " + std::string(request.query.id));
  if (!is_executable(request.mode)) throw std::invalid_argument("oracle: unanswerable is not a mode");

  if (request.mode == Strategy::multi_step) {
    const std::size_t turn = request.reasoning.size();
    if (turn < b->multi_step_script.size()) return {ReplyKind::next_query, b->multi_step_script[turn]};
  }
  return {ReplyKind::final_answer, b->answer_for(request.mode)};
}

std::vector<OracleBehavior> read_oracle(std::istream& in) {
  std::vector<OracleBehavior> out;
  detail::for_each_jsonl(in, [&](const Json& obj, std::size_t line_no) {
    OracleBehavior b;
    b.query_id = detail::require_string(obj, "query_id", line_no);
    const std::string where = "oracle " + b.query_id;

    auto cu = obj.find("correct_under");
    if (cu == obj.end() || !cu->is_array()) throw ValidationError(where + ": correct_under must be a list");
    for (const auto& s : *cu) {
      if (!s.is_string()) throw ValidationError(where + ": correct_under entries must be strings");
      auto strategy = parse_strategy(s.get<std::string>());
      if (!is_executable(strategy))
        throw ValidationError(where + ": correct_under cannot contain unanswerable");
      b.correct_under.insert(strategy);
    }

    auto answers = obj.find("answers");
    if (answers == obj.end() || !answers->is_object())
      throw ValidationError(where + ": answers must be an object");
    for (auto s : kExecutableStrategies) {
      auto it = answers->find(std::string(to_string(s)));
      if (it == answers->end() || !it->is_string()) {
        throw ValidationError(where + ": missing answer for " + std::string(to_string(s)));
      }
      b.answers[static_cast<std::size_t>(s)] = it->get<std::string>();
    }

    if (auto script = obj.find("multi_step_script"); script != obj.end()) {
      if (!script->is_array()) throw ValidationError(where + ": multi_step_script must be a list");
      for (const auto& step : *script) {
        if (!step.is_string()) throw ValidationError(where + ": multi_step_script entries must be strings");
        b.multi_step_script.push_back(step.get<std::string>());
      }
    }
    out.push_back(std::move(b));
  });
  return out;
}

void validate_oracle(std::span<const OracleBehavior> behaviors, const QADataset& qa) {
  std::set<std::string, std::less<>> seen;
  for (const auto& b : behaviors) {
    if (!seen.insert(b.query_id).second) throw ValidationError("oracle: duplicate query_id " + b.query_id);
    const QAExample* ex = qa.find(b.query_id);
    if (ex == nullptr) throw ValidationError(b.query_id + ": oracle behavior for unknown query");
    for (auto s : kExecutableStrategies) {
      const bool correct = judge(b.answer_for(s), ex->gold_answers);
      if (correct != b.correct_under.contains(s)) {
        throw ValidationError(b.query_id + ": " + std::string(to_string(s)) + " answer " +
                              (correct ? "contains" : "lacks") + " gold but correct_under says otherwise");
      }
    }
  }
}

MockAnswerer load_oracle(const std::filesystem::path& path, const QADataset& qa) {
  auto in = detail::open_input(path);
  auto behaviors = read_oracle(in);
  validate_oracle(behaviors, qa);
  return MockAnswerer(std::move(behaviors));
}

void write_oracle(std::span<const OracleBehavior> behaviors, std::ostream& out) {
  for (const auto& b : behaviors) {
    OrderedJson obj;
    obj["query_id"] = b.query_id;
    auto cu = OrderedJson::array();
    for (auto s : b.correct_under.members()) cu.push_back(to_string(s));
    obj["correct_under"] = cu;
    OrderedJson answers;
    for (auto s : kExecutableStrategies) answers[std::string(to_string(s))] = b.answer_for(s);
    obj["answers"] = answers;
    obj["multi_step_script"] = b.multi_step_script;
    out << obj.dump() << '\n';
  }
}

std::string trace_to_json(const AnswerTrace& trace) {
  OrderedJson obj;
  obj["query_id"] = trace.query_id;
  obj["strategy"] = to_string(trace.strategy);
  obj["answer"] = trace.answer;
  obj["steps_used"] = trace.steps_used();
  auto steps = OrderedJson::array();
  for (const auto& s : trace.steps) {
    OrderedJson step;
    step["query"] = s.query;
    step["doc_ids"] = s.doc_ids;
    steps.push_back(std::move(step));
  }
  obj["steps"] = std::move(steps);
  return obj.dump();
}

}  // namespace flare
