#pragma once

#include <sstream>
#include <string>

#include "flare/answer_engine.hpp"
#include "flare/corpus_store.hpp"

namespace flare::testing {

inline QAExample make_qa(std::string id, std::string question, std::string gold,
                         Origin origin = Origin::single_hop) {
  QAExample ex;
  ex.id = std::move(id);
  ex.question = std::move(question);
  ex.gold_answers = {std::move(gold)};
  ex.origin = origin;
  ex.dataset = origin == Origin::single_hop ? "trivia" : "hotpotqa";
  return ex;
}

/// Behavior whose canned answers agree with `correct` for gold `gold`.
inline OracleBehavior make_behavior(const std::string& id, StrategySet correct, const std::string& gold,
                                    std::vector<std::string> script = {}) {
  OracleBehavior b;
  b.query_id = id;
  b.correct_under = correct;
  for (auto s : kExecutableStrategies) {
    b.answers[static_cast<std::size_t>(s)] =
        correct.contains(s) ? "It is " + gold + "." : "No idea, maybe Zork.";
  }
  b.multi_step_script = std::move(script);
  return b;
}

inline Corpus small_corpus() {
  Corpus c;
  c.insert({"d1", "Hamlet", "Hamlet is a tragedy written by William Shakespeare."});
  c.insert({"d2", "Paris", "Paris is the capital of France."});
  c.insert({"d3", "Stratford", "Shakespeare was born in Stratford upon Avon."});
  c.insert({"d4", "Avon", "The river Avon flows through Stratford."});
  return c;
}

}  // namespace flare::testing
