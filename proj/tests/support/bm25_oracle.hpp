#pragma once

// Full-scan BM25 reference scorer. Shares only the tokenizer with the
// indexed implementation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flare/bm25.hpp"
#include "flare/tokenizer.hpp"

namespace flare::testing {

inline std::vector<RetrievalResult> naive_bm25(const std::vector<Document>& docs, const std::string& query,
                                               std::size_t k, double k1 = 1.2, double b = 0.75) {
  std::vector<std::vector<std::string>> toks;
  double total = 0;
  for (const auto& d : docs) {
    toks.push_back(tokenize(d.text));
    total += static_cast<double>(toks.back().size());
  }
  const double n = static_cast<double>(docs.size());
  const double avgdl = total / n;

  std::vector<RetrievalResult> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0;
    for (const auto& t : tokenize(query)) {
      double df = 0;
      for (const auto& dt : toks) df += std::count(dt.begin(), dt.end(), t) > 0 ? 1 : 0;
      const double tf = static_cast<double>(std::count(toks[i].begin(), toks[i].end(), t));
      if (tf == 0) continue;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double dl = static_cast<double>(toks[i].size());
      score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl));
    }
    if (score > 0) out.push_back({docs[i].id, score});
  }
  std::sort(out.begin(), out.end(), [](const RetrievalResult& a, const RetrievalResult& c) {
    if (a.score != c.score) return a.score > c.score;
    return a.doc_id < c.doc_id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace flare::testing
