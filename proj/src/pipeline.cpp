#include "flare/pipeline.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <functional>
#include <set>

#include "flare/bm25.hpp"
#include "flare/http_answerer.hpp"
#include "flare/strategy_labeler.hpp"
#include "flare/weights_io.hpp"
#include "jsonl.hpp"

namespace flare {

using detail::Json;
using detail::OrderedJson;

TrainingOptions RunConfig::training() const {
  TrainingOptions t;
  t.learning_rate = learning_rate;
  t.l2 = l2;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.seed = seed;
  return t;
}

namespace {

template <typename T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const Json& obj, RunConfig c) {
  if (!obj.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : obj.items()) {
    if (key == "corpus")
      c.corpus = get_as<std::string>(v, key);
    else if (key == "qa")
      c.qa = get_as<std::string>(v, key);
    else if (key == "oracle")
      c.oracle = get_as<std::string>(v, key);
    else if (key == "eval_qa")
      c.eval_qa = get_as<std::string>(v, key);
    else if (key == "eval_oracle")
      c.eval_oracle = get_as<std::string>(v, key);
    else if (key == "out")
      c.out_dir = get_as<std::string>(v, key);
    else if (key == "answerer") {
      const auto name = get_as<std::string>(v, key);
      if (name == "mock")
        c.answerer = AnswererKind::mock;
      else if (name == "http")
        c.answerer = AnswererKind::http;
      else
        throw UsageError("answerer must be mock or http");
    } else if (key == "endpoint")
      c.endpoint = get_as<std::string>(v, key);
    else if (key == "max_in_flight")
      c.max_in_flight = get_as<std::size_t>(v, key);
    else if (key == "k")
      c.k = get_as<std::size_t>(v, key);
    else if (key == "max_steps")
      c.max_steps = get_as<std::size_t>(v, key);
    else if (key == "alphas") {
      if (v.is_string()) {
        c.alphas = parse_alpha_grid(v.get<std::string>());
      } else {
        c.alphas = get_as<std::vector<double>>(v, key);
        for (double a : c.alphas) {
          if (!(a >= 0.0 && a <= 1.0)) throw UsageError("alpha must be in [0,1]");
        }
      }
    } else if (key == "four_class")
      c.four_class = get_as<bool>(v, key);
    else if (key == "threads")
      c.threads = get_as<std::size_t>(v, key);
    else if (key == "on_error") {
      const auto mode = get_as<std::string>(v, key);
      if (mode == "abort")
        c.on_transport_error = TransportErrorMode::abort;
      else if (mode == "skip")
        c.on_transport_error = TransportErrorMode::skip;
      else
        throw UsageError("on_error must be abort or skip");
    } else if (key == "seed")
      c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "dim")
      c.dimension = get_as<std::uint64_t>(v, key);
    else if (key == "lr")
      c.learning_rate = get_as<double>(v, key);
    else if (key == "lambda")
      c.l2 = get_as<double>(v, key);
    else if (key == "batch")
      c.batch_size = get_as<std::size_t>(v, key);
    else if (key == "epochs")
      c.epochs = get_as<std::size_t>(v, key);
    else
      throw UsageError("unknown config key '" + key + "'");
  }
  return c;
}

OrderedJson RunConfig::to_json() const {
  OrderedJson o;
  o["corpus"] = corpus.string();
  o["qa"] = qa.string();
  o["oracle"] = oracle.string();
  o["eval_qa"] = eval_qa.string();
  o["eval_oracle"] = eval_oracle.string();
  o["out"] = out_dir.string();
  o["answerer"] = answerer == AnswererKind::mock ? "mock" : "http";
  o["endpoint"] = endpoint;
  o["max_in_flight"] = max_in_flight;
  o["k"] = k;
  o["max_steps"] = max_steps;
  o["alphas"] = alphas;
  o["four_class"] = four_class;
  o["threads"] = threads;
  o["on_error"] = on_transport_error == TransportErrorMode::abort ? "abort" : "skip";
  o["seed"] = seed;
  o["dim"] = dimension;
  o["lr"] = learning_rate;
  o["lambda"] = l2;
  o["batch"] = batch_size;
  o["epochs"] = epochs;
  return o;
}

int exit_code_for(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->code();
  if (dynamic_cast<const UsageError*>(&e) != nullptr) return 1;
  if (dynamic_cast<const TransportError*>(&e) != nullptr) return 3;
  return 2;
}

std::unique_ptr<Answerer> make_answerer(const RunConfig& config, const std::filesystem::path& oracle,
                                        const QADataset& qa) {
  if (config.answerer == AnswererKind::mock) {
    if (oracle.empty()) throw UsageError("oracle required for mock answerer");
    return std::make_unique<MockAnswerer>(load_oracle(oracle, qa));
  }
  HttpAnswererConfig http;
  if (config.endpoint.empty()) {
    http = HttpAnswererConfig::from_env();
  } else {
    http.url = config.endpoint;
    if (const char* token = std::getenv("FLARE_LLM_TOKEN")) http.token = token;
  }
  http.max_in_flight = config.max_in_flight;
  return std::make_unique<HttpAnswerer>(std::move(http));
}

std::string sha256_file(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

namespace {

class Manifest {
 public:
  Manifest(const RunConfig& config, std::filesystem::path root) : root_(std::move(root)) {
    doc_["format_version"] = 1;
    doc_["tool"] = "flare";
    doc_["index_format_version"] = InvertedIndex::kFormatVersion;
    doc_["weights_format_version"] = kWeightsFormatVersion;
    doc_["seed"] = config.seed;
    doc_["feature_config"] = {{"dimension", config.dimension}, {"seed", config.seed}};
    doc_["config"] = config.to_json();
    doc_["inputs"] = OrderedJson::array();
    doc_["artifacts"] = OrderedJson::array();
    doc_["stages"] = OrderedJson::array();
  }

  void input(const std::filesystem::path& path) {
    if (path.empty()) return;
    doc_["inputs"].push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
  }

  void artifact(const std::filesystem::path& relative) {
    doc_["artifacts"].push_back(
        {{"path", relative.generic_string()}, {"sha256", sha256_file(root_ / relative)}});
  }

  void stage_done(const std::string& name) { doc_["stages"].push_back(name); }

  void write(const std::optional<std::string>& failed_stage, const std::string& cause) {
    doc_["status"] = failed_stage ? "failed" : "ok";
    if (failed_stage) {
      doc_["failed_stage"] = *failed_stage;
      doc_["error"] = cause;
    }
    auto out = detail::open_output(root_ / "manifest.json");
    out << doc_.dump(2) << '\n';
  }

 private:
  std::filesystem::path root_;
  OrderedJson doc_;
};

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  if (config.out_dir.empty()) throw UsageError("output directory required");
  if (config.corpus.empty() || config.qa.empty()) throw UsageError("corpus and qa paths are required");
  for (const auto& p : {config.corpus, config.qa, config.oracle, config.eval_qa, config.eval_oracle}) {
    if (!p.empty() && !std::filesystem::exists(p)) throw UsageError("no such file: " + p.string());
  }
  if (config.answerer == AnswererKind::mock) {
    if (config.oracle.empty()) throw UsageError("oracle required for mock answerer");
    if (!config.eval_qa.empty() && config.eval_oracle.empty()) {
      throw UsageError("oracle required for mock answerer (eval_oracle)");
    }
  }

  const auto& root = config.out_dir;
  std::filesystem::create_directories(root);
  Manifest manifest(config, root);
  PipelineResult result;

  std::string current;
  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    current = name;
    body();
    manifest.stage_done(name);
  };

  try {
    Corpus corpus;
    QADataset qa;
    QADataset eval_qa;
    stage("ingest", [&] {
      manifest.input(config.corpus);
      manifest.input(config.qa);
      manifest.input(config.oracle);
      manifest.input(config.eval_qa);
      manifest.input(config.eval_oracle);
      corpus = ingest_corpus(config.corpus);
      qa = ingest_qa(config.qa);
      export_corpus(corpus, root / "store" / StoreLayout::kCorpusFile);
      export_qa(qa, root / "store" / StoreLayout::kQAFile);
      manifest.artifact("store/corpus.jsonl");
      manifest.artifact("store/qa.jsonl");
      if (!config.eval_qa.empty()) {
        eval_qa = ingest_qa(config.eval_qa);
        export_qa(eval_qa, root / "store" / "eval_qa.jsonl");
        manifest.artifact("store/eval_qa.jsonl");
      }
    });
    const QADataset& eval_set = config.eval_qa.empty() ? qa : eval_qa;

    InvertedIndex index;
    stage("index", [&] {
      index = InvertedIndex::build(corpus);
      index.save(root / "index.bin");
      manifest.artifact("index.bin");
    });

    std::unique_ptr<Answerer> train_answerer;
    CostLabeling cost;
    stage("label_cost", [&] {
      train_answerer = make_answerer(config, config.oracle, qa);
      LabelingOptions opts{config.execution(), config.four_class, config.threads};
      cost = label_cost_dataset(*train_answerer, index, qa, opts);
      write_labels(cost.labels, root / "labels_cost.jsonl");
      write_exclusions(cost.exclusions, root / "exclusions.jsonl");
      manifest.artifact("labels_cost.jsonl");
      manifest.artifact("exclusions.jsonl");
      result.cost_labels = cost.labels.size();
      result.exclusions = cost.exclusions.size();
    });

    std::vector<LabeledExample> reliability;
    std::vector<LabeledExample> combined;
    stage("label_reliability", [&] {
      reliability = label_reliability_dataset(qa);
      combined = label_combined(cost.labels, reliability);
      write_labels(reliability, root / "labels_reliability.jsonl");
      write_labels(combined, root / "labels_combined.jsonl");
      manifest.artifact("labels_reliability.jsonl");
      manifest.artifact("labels_combined.jsonl");
    });

    const std::size_t num_classes = config.four_class ? 4 : 3;
    std::shared_ptr<const ClassifierWeights> coc;
    std::shared_ptr<const ClassifierWeights> roc;
    std::shared_ptr<const ClassifierWeights> adaptive;
    stage("train", [&] {
      const auto features = config.features();
      auto fit = [&](std::span<const LabeledExample> labels, std::vector<Strategy> allow_missing,
                     const std::string& file) {
        auto options = config.training();
        options.allow_missing = std::move(allow_missing);
        auto data = make_training_set(labels, qa, features);
        auto trained = train(data, num_classes, features, options);
        save_weights(trained.weights, root / file);
        manifest.artifact(file);
        return std::make_shared<const ClassifierWeights>(std::move(trained.weights));
      };
      coc = fit(cost.labels, {}, "coc.weights");
      roc = fit(reliability, {Strategy::no_retrieval, Strategy::unanswerable}, "roc.weights");
      adaptive = fit(combined, {}, "adaptive_rag.weights");
    });

    std::unique_ptr<Answerer> eval_owner;
    const Answerer* eval_answerer = train_answerer.get();
    if (!config.eval_qa.empty()) {
      current = "sweep";
      eval_owner = make_answerer(config, config.eval_oracle, eval_set);
      eval_answerer = eval_owner.get();
    }
    EvalOptions eval_options{config.execution(), config.on_transport_error, config.threads};

    stage("sweep", [&] {
      auto runs = sweep_alpha(eval_set, coc, roc, config.alphas, *eval_answerer, index, eval_options);
      std::vector<QueryLog> log;
      for (auto& run : runs) {
        result.sweep.push_back(run.record);
        log.insert(log.end(), run.log.begin(), run.log.end());
      }
      write_report_csv(result.sweep, root / "sweep.csv");
      write_query_log(log, root / "sweep_log.jsonl");
      manifest.artifact("sweep.csv");
      manifest.artifact("sweep_log.jsonl");
    });

    stage("baselines", [&] {
      std::vector<Policy> policies = {
          Policy::static_strategy(Strategy::no_retrieval), Policy::static_strategy(Strategy::single_step),
          Policy::static_strategy(Strategy::multi_step), Policy::adaptive_rag(adaptive)};
      std::vector<QueryLog> log;
      for (const auto& policy : policies) {
        auto run = run_policy(policy, eval_set, *eval_answerer, index, eval_options);
        result.baselines.push_back(run.record);
        log.insert(log.end(), run.log.begin(), run.log.end());
      }
      write_report_csv(result.baselines, root / "baselines.csv");
      write_query_log(log, root / "baselines_log.jsonl");
      manifest.artifact("baselines.csv");
      manifest.artifact("baselines_log.jsonl");
    });
  } catch (const std::exception& e) {
    manifest.write(current, e.what());
    throw StageError(current, e.what(), exit_code_for(e));
  }
  manifest.write(std::nullopt, "");
  return result;
}

}  // namespace flare
