#include "flare/bm25.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include "binary_io.hpp"
#include "flare/errors.hpp"
#include "jsonl.hpp"

namespace flare {

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'L', 'A', 'R', 'E', 'I', 'D', 'X'};

}  // namespace

double bm25_idf(std::size_t num_docs, std::size_t doc_freq) {
  const double n = static_cast<double>(num_docs);
  const double df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

InvertedIndex InvertedIndex::build(const Corpus& corpus, Bm25Params params, TokenizerConfig tokenizer) {
  if (corpus.empty()) throw ValidationError("cannot index an empty corpus");

  InvertedIndex index;
  index.params_ = params;
  index.tokenizer_ = tokenizer;
  index.docs_.assign(corpus.begin(), corpus.end());
  index.doc_lengths_.reserve(index.docs_.size());

  std::unordered_map<std::string, std::uint32_t> tf;
  for (std::size_t ordinal = 0; ordinal < index.docs_.size(); ++ordinal) {
    auto terms = tokenize(index.docs_[ordinal].text, tokenizer);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    tf.clear();
    for (auto& t : terms) ++tf[std::move(t)];
    for (auto& [term, count] : tf) {
      index.postings_[term].push_back({static_cast<std::uint32_t>(ordinal), count});
    }
  }
  index.finalize();
  return index;
}

void InvertedIndex::finalize() {
  const auto total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), std::uint64_t{0});
  avgdl_ = static_cast<double>(total) / static_cast<double>(docs_.size());
  doc_by_id_.clear();
  for (std::size_t i = 0; i < docs_.size(); ++i) doc_by_id_.emplace(docs_[i].id, i);
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  if (it == postings_.end()) return {};
  return it->second;
}

const Document* InvertedIndex::find_document(std::string_view id) const {
  auto it = doc_by_id_.find(std::string(id));
  return it == doc_by_id_.end() ? nullptr : &docs_[it->second];
}

std::vector<RetrievalResult> InvertedIndex::search(std::string_view query, std::size_t k) const {
  if (k == 0) return {};

  std::vector<double> scores(docs_.size(), 0.0);
  std::vector<std::uint32_t> touched;
  const double k1 = params_.k1;
  const double b = params_.b;

  for (const auto& term : tokenize(query, tokenizer_)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& list = it->second;
    const double idf = bm25_idf(docs_.size(), list.size());
    for (const auto& p : list) {
      const double tf = p.tf;
      const double norm = 1.0 - b + b * static_cast<double>(doc_lengths_[p.doc]) / avgdl_;
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += idf * tf * (k1 + 1.0) / (tf + k1 * norm);
    }
  }

  std::vector<std::uint32_t> hits;
  hits.reserve(touched.size());
  for (auto d : touched) {
    if (scores[d] > 0.0) hits.push_back(d);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());

  auto better = [&](std::uint32_t a, std::uint32_t c) {
    if (scores[a] != scores[c]) return scores[a] > scores[c];
    return docs_[a].id < docs_[c].id;
  };
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);

  std::vector<RetrievalResult> results;
  results.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) results.push_back({docs_[hits[i]].id, scores[hits[i]]});
  return results;
}

void InvertedIndex::save(std::ostream& out) const {
  detail::BinaryWriter w(out);
  w.put_bytes(kMagic.data(), kMagic.size());
  w.put(kFormatVersion);
  w.put(params_.k1);
  w.put(params_.b);
  w.put(static_cast<std::uint8_t>(tokenizer_.lowercase ? 1 : 0));
  w.put(static_cast<std::uint32_t>(docs_.size()));
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    w.put_string(docs_[i].id);
    w.put_string(docs_[i].title);
    w.put_string(docs_[i].text);
    w.put(doc_lengths_[i]);
  }

  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, _] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* c) { return *a < *c; });

  w.put(static_cast<std::uint32_t>(terms.size()));
  for (const auto* term : terms) {
    const auto& list = postings_.at(*term);
    w.put_string(*term);
    w.put(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      w.put(p.doc);
      w.put(p.tf);
    }
  }
  w.check();
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  auto out = detail::open_output(path);
  save(out);
}

InvertedIndex InvertedIndex::load(std::istream& in) {
  detail::BinaryReader r(in, "index");
  std::array<char, 8> magic{};
  r.get_bytes(magic.data(), magic.size());
  if (magic != kMagic) throw ValidationError("index: not an index file");
  auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw ValidationError("index: unsupported format version " + std::to_string(version));
  }

  InvertedIndex index;
  index.params_.k1 = r.get<double>();
  index.params_.b = r.get<double>();
  index.tokenizer_.lowercase = r.get<std::uint8_t>() != 0;

  auto n = r.get<std::uint32_t>();
  if (n == 0) throw ValidationError("index: no documents");
  index.docs_.reserve(n);
  index.doc_lengths_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Document doc;
    doc.id = r.get_string();
    doc.title = r.get_string();
    doc.text = r.get_string();
    index.docs_.push_back(std::move(doc));
    index.doc_lengths_.push_back(r.get<std::uint32_t>());
  }

  auto num_terms = r.get<std::uint32_t>();
  for (std::uint32_t t = 0; t < num_terms; ++t) {
    auto term = r.get_string();
    auto count = r.get<std::uint32_t>();
    if (count == 0 || count > n) throw ValidationError("index: corrupt posting list for '" + term + "'");
    std::vector<Posting> list(count);
    for (auto& p : list) {
      p.doc = r.get<std::uint32_t>();
      p.tf = r.get<std::uint32_t>();
      if (p.doc >= n) throw ValidationError("index: posting references unknown document");
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  r.expect_end();
  index.finalize();
  return index;
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return load(in);
}

}  // namespace flare
