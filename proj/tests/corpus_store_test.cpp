#include "flare/corpus_store.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "flare/errors.hpp"
#include "support/temp_dir.hpp"

namespace flare {
namespace {

using testing::TempDir;

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "<no error>";
}

TEST(CorpusStore, IngestsWellFormedFile) {
  TempDir dir;
  auto path = dir.write("c.jsonl", R"({"id":"d1","title":"A","text":"cat sat"})"
                                   "\n"
                                   R"({"id":"d2","title":"B","text":"dog sat"})"
                                   "\n"
                                   R"({"id":"d3","title":"C","text":"cat cat"})"
                                   "\n");
  auto corpus = ingest_corpus(path);
  EXPECT_EQ(corpus.size(), 3u);
  ASSERT_NE(corpus.find("d2"), nullptr);
  EXPECT_EQ(corpus.find("d2")->text, "dog sat");
  EXPECT_EQ(corpus.find("d9"), nullptr);
}

TEST(CorpusStore, EmptyFileHasNoDocuments) {
  TempDir dir;
  EXPECT_EQ(ingest_corpus(dir.write("c.jsonl", "")).size(), 0u);
}

TEST(CorpusStore, DuplicateIdNamesIdAndLine) {
  std::istringstream in(R"({"id":"d1","title":"","text":"a"})"
                        "\n"
                        R"({"id":"d2","title":"","text":"b"})"
                        "\n"
                        R"({"id":"d3","title":"","text":"c"})"
                        "\n"
                        R"({"id":"d1","title":"","text":"d"})"
                        "\n");
  EXPECT_EQ(error_of([&] { read_corpus(in); }), "duplicate id d1 at line 4");
}

TEST(CorpusStore, MalformedLineNamesLineNumber) {
  std::istringstream in(R"({"id":"d1","title":"","text":"a"})"
                        "\n{not json\n");
  EXPECT_NE(error_of([&] { read_corpus(in); }).find("line 2"), std::string::npos);
}

TEST(CorpusStore, MissingKeyAndEmptyFieldsRejected) {
  std::istringstream missing(R"({"id":"d1","text":"a"})");
  EXPECT_NE(error_of([&] { read_corpus(missing); }).find("missing key 'title'"), std::string::npos);
  std::istringstream empty_text(R"({"id":"d1","title":"t","text":""})");
  EXPECT_EQ(error_of([&] { read_corpus(empty_text); }), "d1: empty text");
  std::istringstream empty_id(R"({"id":"","title":"t","text":"x"})");
  EXPECT_NE(error_of([&] { read_corpus(empty_id); }).find("empty id"), std::string::npos);
}

TEST(QAStore, ParsesExample) {
  std::istringstream in(
      R"({"id":"q1","question":"who wrote Hamlet","answers":["Shakespeare"],"origin":"single_hop","dataset":"trivia"})");
  auto qa = read_qa(in);
  ASSERT_EQ(qa.size(), 1u);
  const auto& ex = qa[0];
  EXPECT_EQ(ex.question, "who wrote Hamlet");
  EXPECT_EQ(ex.gold_answers, std::vector<std::string>{"Shakespeare"});
  EXPECT_EQ(ex.origin, Origin::single_hop);
  EXPECT_EQ(ex.dataset, "trivia");
}

TEST(QAStore, RejectsEmptyAnswersAndUnknownOrigin) {
  std::istringstream empty(
      R"({"id":"q1","question":"x","answers":[],"origin":"single_hop","dataset":"trivia"})");
  EXPECT_EQ(error_of([&] { read_qa(empty); }), "q1: empty answers");
  std::istringstream two_hop(
      R"({"id":"q1","question":"x","answers":["a"],"origin":"two_hop","dataset":"trivia"})");
  EXPECT_EQ(error_of([&] { read_qa(two_hop); }), "q1: unknown origin");
}

TEST(QAStore, DatasetTagMapsToOneOrigin) {
  std::istringstream in(
      R"({"id":"q1","question":"x","answers":["a"],"origin":"single_hop","dataset":"squad"})"
      "\n"
      R"({"id":"q2","question":"y","answers":["b"],"origin":"multi_hop","dataset":"squad"})");
  EXPECT_NE(error_of([&] { read_qa(in); }).find("conflicts with dataset 'squad'"), std::string::npos);
}

TEST(CorpusStore, ExportIsNormalizedAndRoundTrips) {
  // Keys out of order and extra whitespace on input.
  std::istringstream in(R"(  { "text" : "béta", "id":"d1", "title":"T" })"
                        "\n\n"
                        R"({"title":"U","id":"d2","text":"x \"y\""})"
                        "\n");
  auto corpus = read_corpus(in);
  std::ostringstream first;
  export_corpus(corpus, first);
  EXPECT_EQ(first.str(),
            "{\"id\":\"d1\",\"title\":\"T\",\"text\":\"b\xC3\xA9ta\"}\n"
            "{\"id\":\"d2\",\"title\":\"U\",\"text\":\"x \\\"y\\\"\"}\n");

  std::istringstream again(first.str());
  std::ostringstream second;
  export_corpus(read_corpus(again), second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(QAStore, ExportRoundTripIsByteIdentical) {
  auto qa = ingest_qa(std::filesystem::path(FLARE_DATA_DIR) / "synthetic" / "qa.jsonl");
  std::ostringstream first;
  export_qa(qa, first);
  std::istringstream in(first.str());
  auto reloaded = read_qa(in);
  std::ostringstream second;
  export_qa(reloaded, second);
  EXPECT_EQ(first.str(), second.str());
  ASSERT_EQ(reloaded.size(), qa.size());
  for (const auto& ex : qa) {
    ASSERT_NE(reloaded.find(ex.id), nullptr);
    EXPECT_EQ(*reloaded.find(ex.id), ex);
  }
}

}  // namespace
}  // namespace flare
