#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flare/corpus_store.hpp"
#include "flare/tokenizer.hpp"

namespace flare {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

struct Posting {
  std::uint32_t doc = 0;
  std::uint32_t tf = 0;
};

struct RetrievalResult {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

inline constexpr std::size_t kDefaultTopK = 10;

/// ln(1 + (N - df + 0.5) / (df + 0.5)); strictly positive for 0 < df <= N.
double bm25_idf(std::size_t num_docs, std::size_t doc_freq);

/// Okapi BM25 over an in-memory inverted index. The index keeps the stored
/// fields of every document so retrieved passages can be handed to an
/// answerer without the original corpus. Immutable once built.
class InvertedIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Throws ValidationError on an empty corpus.
  static InvertedIndex build(const Corpus& corpus, Bm25Params params = {}, TokenizerConfig tokenizer = {});

  /// Top-k documents with a positive score, ordered by descending score and
  /// then ascending doc id. Unknown terms contribute nothing; repeated query
  /// terms contribute once per occurrence.
  std::vector<RetrievalResult> search(std::string_view query, std::size_t k = kDefaultTopK) const;

  std::size_t num_docs() const { return docs_.size(); }
  double avgdl() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }
  const TokenizerConfig& tokenizer() const { return tokenizer_; }

  std::size_t doc_frequency(std::string_view term) const { return postings(term).size(); }
  std::span<const Posting> postings(std::string_view term) const;
  std::size_t num_terms() const { return postings_.size(); }

  std::uint32_t doc_length(std::size_t ordinal) const { return doc_lengths_[ordinal]; }
  const Document& document(std::size_t ordinal) const { return docs_[ordinal]; }
  /// nullptr for an unknown id.
  const Document* find_document(std::string_view id) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(std::istream& in);
  static InvertedIndex load(const std::filesystem::path& path);

 private:
  void finalize();

  Bm25Params params_;
  TokenizerConfig tokenizer_;
  std::vector<Document> docs_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> doc_by_id_;
  double avgdl_ = 0.0;
};

}  // namespace flare
