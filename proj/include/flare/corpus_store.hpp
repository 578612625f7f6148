#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flare {

struct Document {
  std::string id;
  std::string title;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

enum class Origin { single_hop, multi_hop };

std::string_view to_string(Origin origin);
/// Throws ValidationError for anything but "single_hop" / "multi_hop".
Origin parse_origin(std::string_view name);

struct QAExample {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;
  Origin origin = Origin::single_hop;
  std::string dataset;

  friend bool operator==(const QAExample&, const QAExample&) = default;
};

/// Append-only, id-unique record collection. Ingest is the only writer;
/// once built the store is read-only and safe to share across threads.
template <typename Record>
class RecordStore {
 public:
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::span<const Record> records() const { return records_; }
  const Record& operator[](std::size_t i) const { return records_[i]; }

  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  /// nullptr when the id is unknown.
  const Record* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &records_[it->second];
  }

  /// Returns false (and stores nothing) when the id is already present.
  bool insert(Record record) {
    auto [it, inserted] = by_id_.emplace(record.id, records_.size());
    if (!inserted) return false;
    records_.push_back(std::move(record));
    return true;
  }

 private:
  std::vector<Record> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

using Corpus = RecordStore<Document>;

using QADataset = RecordStore<QAExample>;

/// Strict JSONL readers: every malformed line is an error naming the line.
Corpus read_corpus(std::istream& in);
QADataset read_qa(std::istream& in);
Corpus ingest_corpus(const std::filesystem::path& path);
QADataset ingest_qa(const std::filesystem::path& path);

/// Normalized JSONL: fixed key order, one compact object per line.
void export_corpus(const Corpus& corpus, std::ostream& out);
void export_qa(const QADataset& qa, std::ostream& out);
void export_corpus(const Corpus& corpus, const std::filesystem::path& path);
void export_qa(const QADataset& qa, const std::filesystem::path& path);

/// A persisted store is a directory holding the normalized exports.
struct StoreLayout {
  static constexpr std::string_view kCorpusFile = "corpus.jsonl";
  static constexpr std::string_view kQAFile = "qa.jsonl";
};

}  // namespace flare
