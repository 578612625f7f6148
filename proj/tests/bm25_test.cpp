#include "flare/bm25.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "flare/errors.hpp"
#include "flare/tokenizer.hpp"
#include "support/bm25_oracle.hpp"
#include "support/random_corpus.hpp"
#include "support/temp_dir.hpp"

namespace flare {
namespace {

Corpus cat_corpus() {
  Corpus c;
  c.insert({"doc1", "", "cat sat"});
  c.insert({"doc2", "", "dog sat"});
  c.insert({"doc3", "", "cat cat"});
  return c;
}

TEST(Tokenizer, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("Who wrote Romeo and Juliet?"),
            (std::vector<std::string>{"who", "wrote", "romeo", "and", "juliet"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("GPT-4o"), (std::vector<std::string>{"gpt", "4o"}));
  EXPECT_EQ(tokenize("  --a__b  "), (std::vector<std::string>{"a", "b"}));
}

TEST(Tokenizer, KeepsUtf8Sequences) {
  EXPECT_EQ(tokenize("Café au lait"), (std::vector<std::string>{"caf\xC3\xA9", "au", "lait"}));
}

TEST(InvertedIndex, CountsMatchHandComputation) {
  auto index = InvertedIndex::build(cat_corpus());
  EXPECT_EQ(index.num_docs(), 3u);
  EXPECT_DOUBLE_EQ(index.avgdl(), 2.0);
  EXPECT_EQ(index.doc_frequency("cat"), 2u);
  EXPECT_EQ(index.doc_frequency("sat"), 2u);
  EXPECT_EQ(index.doc_frequency("dog"), 1u);
}

TEST(InvertedIndex, SingleDocument) {
  Corpus c;
  c.insert({"only", "", "a"});
  auto index = InvertedIndex::build(c);
  EXPECT_EQ(index.num_docs(), 1u);
  EXPECT_DOUBLE_EQ(index.avgdl(), 1.0);
}

TEST(InvertedIndex, EmptyCorpusIsAnError) { EXPECT_THROW(InvertedIndex::build(Corpus{}), ValidationError); }

TEST(InvertedIndex, SearchMatchesHandComputedScores) {
  // idf(cat) = ln(1 + 1.5/2.5); doc1 tf=1, doc3 tf=2, both |d| = avgdl.
  constexpr double kDoc1 = 0.47000362924573563;
  constexpr double kDoc3 = 0.6462549902128865;
  auto results = InvertedIndex::build(cat_corpus()).search("cat", 3);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].doc_id, "doc3");
  EXPECT_NEAR(results[0].score, kDoc3, 1e-12);
  EXPECT_EQ(results[1].doc_id, "doc1");
  EXPECT_NEAR(results[1].score, kDoc1, 1e-12);
}

TEST(InvertedIndex, AbsentTermAndZeroK) {
  auto index = InvertedIndex::build(cat_corpus());
  EXPECT_TRUE(index.search("zebra", 3).empty());
  EXPECT_TRUE(index.search("cat", 0).empty());
  EXPECT_TRUE(index.search("", 3).empty());
}

TEST(InvertedIndex, TiesBreakByDocId) {
  Corpus c;
  c.insert({"b", "", "same words"});
  c.insert({"a", "", "same words"});
  c.insert({"c", "", "other"});
  auto results = InvertedIndex::build(c).search("same", 5);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].doc_id, "a");
  EXPECT_EQ(results[1].doc_id, "b");
  EXPECT_EQ(results[0].score, results[1].score);
}

TEST(InvertedIndex, IdfIsPositiveForEveryIndexedTerm) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto docs = testing::random_documents(rng, 20, 6);
    auto index = InvertedIndex::build(testing::to_corpus(docs));
    for (int w = 0; w < 6; ++w) {
      const auto df = index.doc_frequency("w" + std::to_string(w));
      if (df > 0) EXPECT_GT(bm25_idf(index.num_docs(), df), 0.0);
    }
  }
}

TEST(InvertedIndex, MatchesNaiveScorerOnRandomCorpora) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto docs = testing::random_documents(rng, 20);
    auto index = InvertedIndex::build(testing::to_corpus(docs));
    const auto query = testing::random_text(rng, 14, 8);
    const std::size_t k = 1 + rng() % 25;
    auto got = index.search(query, k);
    auto want = testing::naive_bm25(docs, query, k);
    ASSERT_EQ(got.size(), want.size()) << query;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].doc_id, want[i].doc_id);
      EXPECT_NEAR(got[i].score, want[i].score, 1e-9);
    }
  }
}

// Length adjusted: a non-query token of d is replaced by t, so |d| and avgdl
// stay fixed.
TEST(InvertedIndex, AddingQueryTermOccurrenceNeverLowersScore) {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto docs = testing::random_documents(rng, 12, 8);
    const std::string term = "w" + std::to_string(rng() % 8);
    const std::string query = term + " " + testing::random_text(rng, 8, 3);
    const std::size_t target = rng() % docs.size();

    auto query_terms = tokenize(query);
    auto tokens = tokenize(docs[target].text);
    auto victim = std::find_if(tokens.begin(), tokens.end(), [&](const std::string& tok) {
      return std::find(query_terms.begin(), query_terms.end(), tok) == query_terms.end();
    });
    if (victim == tokens.end()) continue;

    auto score_of = [&](const std::vector<RetrievalResult>& rs) {
      for (const auto& r : rs) {
        if (r.doc_id == docs[target].id) return r.score;
      }
      return 0.0;
    };
    const double s0 = score_of(InvertedIndex::build(testing::to_corpus(docs)).search(query, docs.size()));
    EXPECT_NEAR(s0, score_of(testing::naive_bm25(docs, query, docs.size())), 1e-9);

    *victim = term;
    std::string text;
    for (const auto& tok : tokens) text += (text.empty() ? "" : " ") + tok;
    docs[target].text = text;
    const double s1 = score_of(InvertedIndex::build(testing::to_corpus(docs)).search(query, docs.size()));
    EXPECT_GT(s1, s0) << "query=" << query;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(InvertedIndex, PersistRoundTripGivesIdenticalResults) {
  std::mt19937_64 rng(5);
  auto docs = testing::random_documents(rng, 20);
  auto index = InvertedIndex::build(testing::to_corpus(docs));
  std::stringstream buf;
  index.save(buf);
  auto reloaded = InvertedIndex::load(buf);
  EXPECT_EQ(reloaded.num_docs(), index.num_docs());
  EXPECT_EQ(reloaded.avgdl(), index.avgdl());
  for (int q = 0; q < 30; ++q) {
    const auto query = testing::random_text(rng, 14, 6);
    EXPECT_EQ(reloaded.search(query, 10), index.search(query, 10));
  }
  ASSERT_NE(reloaded.find_document(docs[0].id), nullptr);
  EXPECT_EQ(reloaded.find_document(docs[0].id)->text, docs[0].text);
}

TEST(InvertedIndex, RejectsCorruptFiles) {
  auto index = InvertedIndex::build(cat_corpus());
  std::stringstream buf;
  index.save(buf);
  const std::string bytes = buf.str();

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(InvertedIndex::load(truncated), ValidationError);

  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::istringstream versioned(bad_version);
  EXPECT_THROW(InvertedIndex::load(versioned), ValidationError);

  std::istringstream garbage("not an index at all");
  EXPECT_THROW(InvertedIndex::load(garbage), ValidationError);
}

TEST(InvertedIndex, FileRoundTrip) {
  testing::TempDir dir;
  auto index = InvertedIndex::build(cat_corpus());
  index.save(dir / "idx.bin");
  EXPECT_EQ(InvertedIndex::load(dir / "idx.bin").search("cat sat", 3), index.search("cat sat", 3));
}

}  // namespace
}  // namespace flare
