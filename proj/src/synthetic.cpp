#include "flare/synthetic.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <set>
#include <string_view>

#include "flare/judge.hpp"
#include "jsonl.hpp"

namespace flare {

namespace {

constexpr std::array<std::string_view, 24> kSyllables = {
    "bra", "vel", "dor", "mik", "sa",  "lun", "ter", "qua", "zen", "ri",  "mo",  "kas",
    "fen", "tal", "gor", "lis", "ven", "dra", "pol", "nix", "hal", "ser", "tov", "cam"};

constexpr std::array<std::string_view, 4> kEasyTemplates = {
    "What is the famous capital city of {E}?", "Who is the well known author of the classic {E}?",
    "What is the common everyday name for {E}?", "Which famous landmark is the symbol of {E}?"};

constexpr std::array<std::string_view, 4> kLookupTemplates = {
    "In which year was the company {E} founded according to the records?",
    "Which firm acquired {E} in the latest filing report?",
    "How many employees did {E} report in the annual statistics?",
    "What award did {E} receive in the recent ceremony?"};

constexpr std::array<std::string_view, 4> kChainTemplates = {
    "Which river flows through the city where the founder of {E} was born, and who designed {F}?",
    "Who is older, the director of {E} or the composer who scored {F}?",
    "What is the nationality of the spouse of the person who founded {E} before joining {F}?",
    "Are both {E} and {F} located in the country whose capital hosted the summit?"};

class NameGen {
 public:
  explicit NameGen(std::mt19937_64& rng) : rng_(rng) {}

  std::string next() {
    for (;;) {
      std::string name;
      const std::size_t parts = 3 + rng_() % 2;
      for (std::size_t i = 0; i < parts; ++i) name += kSyllables[rng_() % kSyllables.size()];
      // Names must not nest inside one another or containment judging
      // would accept a wrong answer.
      bool clash = false;
      for (const auto& used : used_) {
        if (used.find(name) != std::string::npos || name.find(used) != std::string::npos) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        used_.push_back(name);
        name[0] = static_cast<char>(name[0] - 'a' + 'A');
        return name;
      }
    }
  }

 private:
  std::mt19937_64& rng_;
  std::vector<std::string> used_;
};

std::string fill(std::string_view tmpl, const std::string& e, const std::string& f) {
  std::string out(tmpl);
  if (auto p = out.find("{E}"); p != std::string::npos) out.replace(p, 3, e);
  if (auto p = out.find("{F}"); p != std::string::npos) out.replace(p, 3, f);
  return out;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class Tier { easy, lookup, chain };

}  // namespace

SyntheticBenchmark make_synthetic_benchmark(const SyntheticOptions& options) {
  std::mt19937_64 rng(options.seed);
  NameGen names(rng);
  SyntheticBenchmark bench;

  std::size_t doc_counter = 0;
  auto add_doc = [&](const std::string& title, std::string text) {
    char id[32];
    std::snprintf(id, sizeof id, "d%05zu", doc_counter++);
    bench.corpus.insert({id, title, std::move(text)});
  };

  auto generate = [&](std::size_t n, const std::string& prefix, SyntheticSplit& split) {
    const auto n_easy = static_cast<std::size_t>(static_cast<double>(n) * options.easy_share + 0.5);
    const auto n_lookup = static_cast<std::size_t>(static_cast<double>(n) * options.lookup_share + 0.5);

    for (std::size_t i = 0; i < n; ++i) {
      const Tier tier = i < n_easy ? Tier::easy : (i < n_easy + n_lookup ? Tier::lookup : Tier::chain);
      const std::string e = names.next();
      const std::string f = names.next();
      const std::string gold = names.next();
      const std::string wrong = names.next();
      const std::string bridge = names.next();

      QAExample ex;
      char qid[32];
      std::snprintf(qid, sizeof qid, "%sq%04zu", prefix.c_str(), i);
      ex.id = qid;
      ex.gold_answers = {gold};

      OracleBehavior b;
      b.query_id = ex.id;
      const double draw = uniform(rng);
      std::size_t script_len = 0;

      switch (tier) {
        case Tier::easy:
          ex.question = fill(kEasyTemplates[rng() % kEasyTemplates.size()], e, f);
          ex.origin = Origin::single_hop;
          ex.dataset = "trivia";
          b.correct_under =
              draw < options.easy_forgotten
                  ? StrategySet{Strategy::single_step, Strategy::multi_step}
                  : StrategySet{Strategy::no_retrieval, Strategy::single_step, Strategy::multi_step};
          script_len = 1 + rng() % 2;
          add_doc(e, e + " is widely known; its answer is " + gold + ".");
          break;
        case Tier::lookup:
          ex.question = fill(kLookupTemplates[rng() % kLookupTemplates.size()], e, f);
          ex.origin = Origin::single_hop;
          ex.dataset = "squad";
          b.correct_under = {Strategy::single_step, Strategy::multi_step};
          script_len = 1 + rng() % 2;
          add_doc(e, "Records for " + e + " list " + gold + " as the relevant entry.");
          break;
        case Tier::chain:
          ex.question = fill(kChainTemplates[rng() % kChainTemplates.size()], e, f);
          ex.origin = Origin::multi_hop;
          ex.dataset = (i % 2 == 0) ? "hotpotqa" : "musique";
          if (draw < options.chain_unanswerable) {
            b.correct_under = {};
          } else if (draw < options.chain_unanswerable + options.chain_single_answerable) {
            b.correct_under = {Strategy::single_step, Strategy::multi_step};
          } else {
            b.correct_under = {Strategy::multi_step};
          }
          script_len = 2 + rng() % 2;
          add_doc(e, e + " was founded by a person connected to " + bridge + ".");
          add_doc(bridge, bridge + " links to " + f + " and the answer " + gold + ".");
          break;
      }

      for (auto s : kExecutableStrategies) {
        b.answers[static_cast<std::size_t>(s)] =
            b.correct_under.contains(s) ? "The answer is " + gold + "." : "I believe it is " + wrong + ".";
      }
      for (std::size_t step = 0; step < script_len; ++step) {
        b.multi_step_script.push_back(step == 0 ? e + " is connected to " + bridge + "."
                                                : bridge + " is related to " + f + ".");
      }

      split.oracle.push_back(std::move(b));
      split.qa.insert(std::move(ex));
    }
  };

  generate(options.queries, options.test_queries > 0 ? "train-" : "", bench.train);
  generate(options.test_queries, "test-", bench.test);
  return bench;
}

void write_synthetic_benchmark(const SyntheticBenchmark& bench, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  export_corpus(bench.corpus, dir / StoreLayout::kCorpusFile);
  export_qa(bench.train.qa, dir / StoreLayout::kQAFile);
  auto out = detail::open_output(dir / "oracle.jsonl");
  write_oracle(bench.train.oracle, out);
  if (!bench.test.qa.empty()) {
    export_qa(bench.test.qa, dir / "test_qa.jsonl");
    auto test_out = detail::open_output(dir / "test_oracle.jsonl");
    write_oracle(bench.test.oracle, test_out);
  }
}

}  // namespace flare
