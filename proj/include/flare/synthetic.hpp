#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "flare/answer_engine.hpp"
#include "flare/corpus_store.hpp"

namespace flare {

/// Mix and noise of a generated benchmark. Queries fall into three
/// requirement tiers, each phrased with its own cue vocabulary:
///   easy   (single_hop origin) answerable without retrieval, except that
///          the answerer "forgets" a share of them;
///   lookup (single_hop origin) needs one retrieval;
///   chain  (multi_hop origin)  needs the multi-step loop, except for a
///          share answerable in one step and a share nobody answers.
/// Every correct_under set is upward closed in cost.
struct SyntheticOptions {
  /// Training-split size.
  std::size_t queries = 60;
  /// Held-out split size; 0 for none. Both splits share one corpus.
  std::size_t test_queries = 0;
  std::uint64_t seed = 7;
  double easy_share = 0.3;
  double lookup_share = 0.4;
  double easy_forgotten = 0.2;
  double chain_single_answerable = 0.1;
  double chain_unanswerable = 0.1;
};

struct SyntheticSplit {
  QADataset qa;
  std::vector<OracleBehavior> oracle;
};

struct SyntheticBenchmark {
  Corpus corpus;
  SyntheticSplit train;
  SyntheticSplit test;
};

SyntheticBenchmark make_synthetic_benchmark(const SyntheticOptions& options);

/// Writes corpus.jsonl, qa.jsonl and oracle.jsonl under `dir`, plus
/// test_qa.jsonl and test_oracle.jsonl when there is a held-out split.
void write_synthetic_benchmark(const SyntheticBenchmark& bench, const std::filesystem::path& dir);

}  // namespace flare
