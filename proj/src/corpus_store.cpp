#include "flare/corpus_store.hpp"

#include <map>

#include "flare/errors.hpp"
#include "jsonl.hpp"

namespace flare {

using detail::Json;
using detail::OrderedJson;

std::string_view to_string(Origin origin) {
  return origin == Origin::single_hop ? "single_hop" : "multi_hop";
}

Origin parse_origin(std::string_view name) {
  if (name == "single_hop") return Origin::single_hop;
  if (name == "multi_hop") return Origin::multi_hop;
  throw ValidationError("unknown origin '" + std::string(name) + "'");
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  detail::for_each_jsonl(in, [&](const Json& obj, std::size_t line_no) {
    Document doc{
        detail::require_string(obj, "id", line_no),
        detail::require_string(obj, "title", line_no),
        detail::require_string(obj, "text", line_no),
    };
    if (doc.id.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty id");
    if (doc.text.empty()) throw ValidationError(doc.id + ": empty text");
    std::string id = doc.id;
    if (!corpus.insert(std::move(doc))) {
      throw ValidationError("duplicate id " + id + " at line " + std::to_string(line_no));
    }
  });
  return corpus;
}

QADataset read_qa(std::istream& in) {
  QADataset qa;
  std::map<std::string, Origin> dataset_origin;
  detail::for_each_jsonl(in, [&](const Json& obj, std::size_t line_no) {
    QAExample ex;
    ex.id = detail::require_string(obj, "id", line_no);
    if (ex.id.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty id");
    ex.question = detail::require_string(obj, "question", line_no);

    auto answers = obj.find("answers");
    if (answers == obj.end() || !answers->is_array()) {
      throw ValidationError(ex.id + ": answers must be a list");
    }
    for (const auto& a : *answers) {
      if (!a.is_string()) throw ValidationError(ex.id + ": answers must be strings");
      ex.gold_answers.push_back(a.get<std::string>());
    }
    if (ex.gold_answers.empty()) throw ValidationError(ex.id + ": empty answers");

    auto origin = detail::require_string(obj, "origin", line_no);
    try {
      ex.origin = parse_origin(origin);
    } catch (const ValidationError&) {
      throw ValidationError(ex.id + ": unknown origin");
    }
    ex.dataset = detail::require_string(obj, "dataset", line_no);

    auto [it, fresh] = dataset_origin.emplace(ex.dataset, ex.origin);
    if (!fresh && it->second != ex.origin) {
      throw ValidationError(ex.id + ": origin " + std::string(to_string(ex.origin)) +
                            " conflicts with dataset '" + ex.dataset + "' (" +
                            std::string(to_string(it->second)) + ")");
    }

    std::string id = ex.id;
    if (!qa.insert(std::move(ex))) {
      throw ValidationError("duplicate id " + id + " at line " + std::to_string(line_no));
    }
  });
  return qa;
}

Corpus ingest_corpus(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_corpus(in);
}

QADataset ingest_qa(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_qa(in);
}

void export_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus) {
    OrderedJson obj;
    obj["id"] = doc.id;
    obj["title"] = doc.title;
    obj["text"] = doc.text;
    out << obj.dump() << '\n';
  }
}

void export_qa(const QADataset& qa, std::ostream& out) {
  for (const auto& ex : qa) {
    OrderedJson obj;
    obj["id"] = ex.id;
    obj["question"] = ex.question;
    obj["answers"] = ex.gold_answers;
    obj["origin"] = to_string(ex.origin);
    obj["dataset"] = ex.dataset;
    out << obj.dump() << '\n';
  }
}

void export_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  export_corpus(corpus, out);
}

void export_qa(const QADataset& qa, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  export_qa(qa, out);
}

}  // namespace flare
