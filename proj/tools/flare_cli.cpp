// flare: ingest, index, label, train, route, eval and pipeline commands.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "flare/answer_engine.hpp"
#include "flare/bm25.hpp"
#include "flare/classifier.hpp"
#include "flare/classifier_training.hpp"
#include "flare/corpus_store.hpp"
#include "flare/evaluator.hpp"
#include "flare/pipeline.hpp"
#include "flare/strategy_labeler.hpp"
#include "flare/weights_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace flare;

namespace {

/// Flags shared by every command that executes queries.
struct AnswererFlags {
  std::string answerer = "mock";
  std::string oracle;
  std::string endpoint;
  std::size_t max_in_flight = 4;
  std::size_t k = kDefaultTopK;
  std::size_t max_steps = 6;
  std::size_t threads = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--answerer", answerer, "mock or http")->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--oracle", oracle, "Mock oracle JSONL (mock answerer)");
    cmd->add_option("--endpoint", endpoint, "HTTP answerer URL (default: $FLARE_LLM_URL)");
    cmd->add_option("--max-in-flight", max_in_flight, "Concurrent HTTP requests");
    cmd->add_option("--k", k, "Passages per retrieval call");
    cmd->add_option("--max-steps", max_steps, "Retrieval cap for multi-step");
    cmd->add_option("--threads", threads, "Queries evaluated concurrently");
  }

  RunConfig config() const {
    RunConfig c;
    // --endpoint alone implies the HTTP answerer.
    c.answerer = (answerer == "http" || (!endpoint.empty() && oracle.empty())) ? AnswererKind::http
                                                                               : AnswererKind::mock;
    c.oracle = oracle;
    c.endpoint = endpoint;
    c.max_in_flight = max_in_flight;
    c.k = k;
    c.max_steps = max_steps;
    c.threads = threads;
    return c;
  }

  std::unique_ptr<Answerer> make(const QADataset& qa) const {
    auto c = config();
    return make_answerer(c, c.oracle, qa);
  }
};

InvertedIndex load_or_build_index(const std::string& index_path, const std::string& corpus_path) {
  if (!index_path.empty()) return InvertedIndex::load(index_path);
  if (!corpus_path.empty()) return InvertedIndex::build(ingest_corpus(corpus_path));
  throw UsageError("--index or --corpus is required");
}

double checked_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("alpha must be in [0,1]");
  return alpha;
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6f", i == 0 ? "" : " ", v(i));
    out += buf;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost/reliability-controllable adaptive retrieval router"};
  app.require_subcommand(1);

  // ingest ------------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Validate and store a corpus and/or QA set");
  std::string ingest_corpus_path, ingest_qa_path, ingest_out;
  ingest->add_option("--corpus", ingest_corpus_path, "Corpus JSONL");
  ingest->add_option("--qa", ingest_qa_path, "QA JSONL");
  ingest->add_option("--out", ingest_out, "Store directory")->required();

  // index -------------------------------------------------------------------
  auto* index_cmd = app.add_subcommand("index", "Build or query a BM25 index");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "Index a corpus");
  std::string build_corpus, build_out;
  index_build->add_option("--corpus", build_corpus, "Corpus JSONL")->required();
  index_build->add_option("--out", build_out, "Index file")->required();
  auto* index_search = index_cmd->add_subcommand("search", "Query an index");
  std::string search_index, search_query;
  std::size_t search_k = kDefaultTopK;
  index_search->add_option("--index", search_index, "Index file")->required();
  index_search->add_option("--query", search_query, "Query text")->required();
  index_search->add_option("--k", search_k, "Number of results");

  // label -------------------------------------------------------------------
  auto* label = app.add_subcommand("label", "Generate classifier training labels");
  std::string label_mode, label_qa, label_index, label_corpus, label_out, label_exclusions;
  bool label_four_class = false;
  AnswererFlags label_answerer;
  label->add_option("mode", label_mode, "cost | reliability | combined")
      ->required()
      ->check(CLI::IsMember({"cost", "reliability", "combined"}));
  label->add_option("--qa", label_qa, "QA JSONL")->required();
  label->add_option("--index", label_index, "Index file");
  label->add_option("--corpus", label_corpus, "Corpus JSONL (indexed on the fly)");
  label->add_option("--out", label_out, "Labels JSONL")->required();
  label->add_option("--exclusions", label_exclusions, "Exclusions JSONL (default: <out>.exclusions.jsonl)");
  label->add_flag("--four-class", label_four_class, "Label S_q = {} as unanswerable instead of excluding");
  label_answerer.add_to(label);

  // train -------------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train a routing classifier");
  std::string train_labels, train_qa, train_mode, train_out, train_format = "binary";
  bool train_four_class = false;
  RunConfig hp;
  train_cmd->add_option("--labels", train_labels, "Labels JSONL")->required();
  train_cmd->add_option("--qa", train_qa, "QA JSONL holding the question text")->required();
  train_cmd->add_option("--mode", train_mode, "cost | reliability | combined")
      ->required()
      ->check(CLI::IsMember({"cost", "reliability", "combined"}));
  train_cmd->add_option("--out", train_out, "Weights file")->required();
  train_cmd->add_option("--format", train_format, "binary | json")->check(CLI::IsMember({"binary", "json"}));
  train_cmd->add_flag("--four-class", train_four_class, "Train a 4-class model with an unanswerable class");
  train_cmd->add_option("--dim", hp.dimension, "Feature hash dimension (power of two)");
  train_cmd->add_option("--seed", hp.seed, "Hash and shuffle seed");
  train_cmd->add_option("--epochs", hp.epochs, "Training epochs");
  train_cmd->add_option("--batch", hp.batch_size, "Mini-batch size");
  train_cmd->add_option("--lr", hp.learning_rate, "Initial learning rate");
  train_cmd->add_option("--lambda", hp.l2, "L2 penalty");

  // route -------------------------------------------------------------------
  auto* route_cmd = app.add_subcommand("route", "Route one query with the interpolated classifier");
  std::string route_coc, route_roc, route_query, route_query_id, route_qa, route_index, route_corpus;
  double route_alpha = 0.0;
  bool route_execute = false;
  AnswererFlags route_answerer;
  route_cmd->add_option("--coc", route_coc, "Cost-optimized weights")->required();
  route_cmd->add_option("--roc", route_roc, "Reliability-optimized weights")->required();
  route_cmd->add_option("--alpha", route_alpha, "Interpolation weight in [0,1]")->required();
  route_cmd->add_option("--query", route_query, "Query text")->required();
  route_cmd->add_flag("--execute", route_execute, "Run the chosen strategy");
  route_cmd->add_option("--query-id", route_query_id, "Query id (mock answerer)");
  route_cmd->add_option("--qa", route_qa, "QA JSONL (mock answerer)");
  route_cmd->add_option("--index", route_index, "Index file");
  route_cmd->add_option("--corpus", route_corpus, "Corpus JSONL (indexed on the fly)");
  route_answerer.add_to(route_cmd);

  // eval --------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Evaluate policies");
  eval->require_subcommand(1);
  struct EvalFlags {
    std::string qa, index, corpus, out, log, coc, roc, weights, on_error = "abort";
    AnswererFlags answerer;
  };
  EvalFlags ef;
  auto add_eval_flags = [&](CLI::App* cmd) {
    cmd->add_option("--qa", ef.qa, "QA JSONL")->required();
    cmd->add_option("--index", ef.index, "Index file");
    cmd->add_option("--corpus", ef.corpus, "Corpus JSONL (indexed on the fly)");
    cmd->add_option("--out", ef.out, "Report CSV (default: stdout)");
    cmd->add_option("--log", ef.log, "Per-query log JSONL");
    cmd->add_option("--coc", ef.coc, "Cost-optimized weights");
    cmd->add_option("--roc", ef.roc, "Reliability-optimized weights");
    cmd->add_option("--on-error", ef.on_error, "abort | skip on transport errors")
        ->check(CLI::IsMember({"abort", "skip"}));
    ef.answerer.add_to(cmd);
  };
  auto* eval_run = eval->add_subcommand("run", "Evaluate one policy");
  std::string eval_policy;
  double eval_alpha = 0.0;
  eval_run
      ->add_option("--policy", eval_policy, "static:no | static:single | static:multi | adaptive_rag | flare")
      ->required();
  eval_run->add_option("--weights", ef.weights, "Weights for adaptive_rag");
  eval_run->add_option("--alpha", eval_alpha, "Alpha for flare");
  add_eval_flags(eval_run);
  auto* eval_sweep = eval->add_subcommand("sweep", "Evaluate flare over an alpha grid");
  std::string sweep_alphas = "0,0.2,0.4,0.6,0.8,1.0";
  eval_sweep->add_option("--alphas", sweep_alphas, "Comma-separated alpha grid");
  add_eval_flags(eval_sweep);

  // pipeline ----------------------------------------------------------------
  auto* pipeline = app.add_subcommand("pipeline", "Run ingest -> index -> label -> train -> sweep");
  std::string pipeline_config;
  nlohmann::json overrides = nlohmann::json::object();
  pipeline->add_option("--config", pipeline_config, "JSON config (same keys as the flags)");
  auto add_override = [&](const std::string& flag, const std::string& key, const std::string& help,
                          bool numeric) {
    pipeline->add_option_function<std::string>(
        flag,
        [&overrides, key, numeric](const std::string& v) {
          if (!numeric) {
            overrides[key] = v;
            return;
          }
          try {
            overrides[key] = nlohmann::json::parse(v);
          } catch (const nlohmann::json::exception&) {
            throw UsageError("--" + key + ": not a number: " + v);
          }
        },
        help);
  };
  for (auto key : {"corpus", "qa", "oracle", "eval_qa", "eval_oracle", "out", "answerer", "endpoint",
                   "on_error", "alphas"}) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    add_override(flag, key, std::string("Overrides config key ") + key, false);
  }
  for (auto key :
       {"k", "max_steps", "max_in_flight", "threads", "seed", "dim", "lr", "lambda", "batch", "epochs"}) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    add_override(flag, key, std::string("Overrides config key ") + key, true);
  }
  bool pipeline_four_class = false;
  pipeline->add_flag("--four-class", pipeline_four_class, "Enable the unanswerable class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*ingest) {
      if (ingest_corpus_path.empty() && ingest_qa_path.empty())
        throw UsageError("--corpus and/or --qa required");
      if (!ingest_corpus_path.empty()) {
        auto corpus = ingest_corpus(ingest_corpus_path);
        export_corpus(corpus, fs::path(ingest_out) / StoreLayout::kCorpusFile);
        std::cout << "documents: " << corpus.size() << '\n';
      }
      if (!ingest_qa_path.empty()) {
        auto qa = ingest_qa(ingest_qa_path);
        export_qa(qa, fs::path(ingest_out) / StoreLayout::kQAFile);
        std::cout << "examples: " << qa.size() << '\n';
      }
      return 0;
    }

    if (*index_build) {
      auto index = InvertedIndex::build(ingest_corpus(build_corpus));
      index.save(build_out);
      std::cout << "documents: " << index.num_docs() << "\nterms: " << index.num_terms() << '\n';
      return 0;
    }
    if (*index_search) {
      auto index = InvertedIndex::load(search_index);
      for (const auto& r : index.search(search_query, search_k)) {
        std::printf("%s\t%.6f\n", r.doc_id.c_str(), r.score);
      }
      return 0;
    }

    if (*label) {
      auto qa = ingest_qa(label_qa);
      std::vector<LabeledExample> labels;
      std::vector<Exclusion> exclusions;
      const auto source = parse_label_source(label_mode);
      if (source == LabelSource::reliability) {
        labels = label_reliability_dataset(qa);
      } else {
        auto index = load_or_build_index(label_index, label_corpus);
        auto answerer = label_answerer.make(qa);
        LabelingOptions opts{label_answerer.config().execution(), label_four_class, label_answerer.threads};
        auto cost = label_cost_dataset(*answerer, index, qa, opts);
        exclusions = std::move(cost.exclusions);
        labels = source == LabelSource::cost ? std::move(cost.labels)
                                             : label_combined(cost.labels, label_reliability_dataset(qa));
      }
      write_labels(labels, label_out);
      std::cout << "labels: " << labels.size() << '\n';
      if (source != LabelSource::reliability) {
        const fs::path sidecar =
            label_exclusions.empty() ? fs::path(label_out + ".exclusions.jsonl") : fs::path(label_exclusions);
        write_exclusions(exclusions, sidecar);
        std::cout << "excluded: " << exclusions.size() << '\n';
      }
      return 0;
    }

    if (*train_cmd) {
      auto qa = ingest_qa(train_qa);
      auto labels = read_labels(train_labels);
      auto options = hp.training();
      if (train_mode == "reliability")
        options.allow_missing = {Strategy::no_retrieval, Strategy::unanswerable};
      const std::size_t k = train_four_class ? 4 : 3;
      auto data = make_training_set(labels, qa, hp.features());
      auto result = train(data, k, hp.features(), options);
      save_weights(result.weights, fs::path(train_out),
                   train_format == "json" ? WeightFormat::json : WeightFormat::binary);
      std::printf("examples: %zu\nfinal_loss: %.6f\ntrain_accuracy: %.3f\n", data.size(),
                  result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back(),
                  training_accuracy(result.weights, data));
      return 0;
    }

    if (*route_cmd) {
      const double alpha = checked_alpha(route_alpha);
      auto coc = std::make_shared<const ClassifierWeights>(load_weights(route_coc));
      auto roc = std::make_shared<const ClassifierWeights>(load_weights(route_roc, coc->features));
      InterpolatedClassifier classifier(coc, roc, alpha);
      auto decision = classifier.route(route_query);
      std::cout << "strategy: " << to_string(decision.predicted) << '\n'
                << "execute: " << to_string(decision.execute) << '\n'
                << "logits: " << join(decision.logits) << '\n'
                << "probabilities: " << join(decision.probabilities) << '\n';
      if (route_execute) {
        QADataset qa;
        if (!route_qa.empty()) qa = ingest_qa(route_qa);
        auto cfg = route_answerer.config();
        if (cfg.answerer == AnswererKind::mock && (route_qa.empty() || route_query_id.empty())) {
          if (cfg.oracle.empty()) throw UsageError("oracle required for mock answerer");
          throw UsageError("--qa and --query-id are required with the mock answerer");
        }
        auto answerer = route_answerer.make(qa);
        auto index = load_or_build_index(route_index, route_corpus);
        const std::string id = route_query_id.empty() ? std::string("query") : route_query_id;
        auto trace = execute(decision.execute, *answerer, index, QueryRef{id, route_query}, cfg.execution());
        std::cout << "answer: " << trace.answer << '\n' << "steps_used: " << trace.steps_used() << '\n';
        for (const auto& step : trace.steps) std::cout << "retrieval: " << step.query << '\n';
      }
      return 0;
    }

    if (*eval_run || *eval_sweep) {
      auto qa = ingest_qa(ef.qa);
      auto index = load_or_build_index(ef.index, ef.corpus);
      auto answerer = ef.answerer.make(qa);
      EvalOptions options{ef.answerer.config().execution(),
                          ef.on_error == "skip" ? TransportErrorMode::skip : TransportErrorMode::abort,
                          ef.answerer.threads};
      auto load_pair = [&] {
        if (ef.coc.empty() || ef.roc.empty()) throw UsageError("--coc and --roc are required");
        auto coc = std::make_shared<const ClassifierWeights>(load_weights(ef.coc));
        auto roc = std::make_shared<const ClassifierWeights>(load_weights(ef.roc, coc->features));
        return std::make_pair(coc, roc);
      };

      std::vector<PolicyRun> runs;
      if (*eval_sweep) {
        auto grid = parse_alpha_grid(sweep_alphas);
        auto [coc, roc] = load_pair();
        runs = sweep_alpha(qa, coc, roc, grid, *answerer, index, options);
      } else if (eval_policy == "adaptive_rag") {
        if (ef.weights.empty()) throw UsageError("--weights is required for adaptive_rag");
        auto w = std::make_shared<const ClassifierWeights>(load_weights(ef.weights));
        runs.push_back(run_policy(Policy::adaptive_rag(w), qa, *answerer, index, options));
      } else if (eval_policy == "flare") {
        const double alpha = checked_alpha(eval_alpha);
        auto [coc, roc] = load_pair();
        runs.push_back(run_policy(Policy::flare(coc, roc, alpha), qa, *answerer, index, options));
      } else {
        runs.push_back(run_policy(Policy::static_strategy(parse_static_policy(eval_policy)), qa, *answerer,
                                  index, options));
      }

      std::vector<EvalRecord> records;
      std::vector<QueryLog> log;
      for (const auto& run : runs) {
        records.push_back(run.record);
        log.insert(log.end(), run.log.begin(), run.log.end());
      }
      if (ef.out.empty()) {
        write_report_csv(records, std::cout);
      } else {
        write_report_csv(records, fs::path(ef.out));
      }
      if (!ef.log.empty()) write_query_log(log, fs::path(ef.log));
      return 0;
    }

    if (*pipeline) {
      RunConfig config;
      if (!pipeline_config.empty()) {
        std::ifstream in(pipeline_config);
        if (!in) throw UsageError("cannot open config " + pipeline_config);
        nlohmann::json file;
        try {
          file = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw UsageError(std::string("malformed config: ") + e.what());
        }
        config = RunConfig::from_json(file);
      }
      config = RunConfig::from_json(overrides, config);
      if (pipeline_four_class) config.four_class = true;
      auto result = run_pipeline(config);
      std::cout << "cost labels: " << result.cost_labels << "\nexcluded: " << result.exclusions << '\n';
      write_report_csv(result.sweep, std::cout);
      std::cout << "artifacts: " << config.out_dir.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 1;
}
