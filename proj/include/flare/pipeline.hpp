#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flare/answer_engine.hpp"
#include "flare/classifier_training.hpp"
#include "flare/evaluator.hpp"
#include "flare/features.hpp"
#include "json.hpp"

namespace flare {

enum class AnswererKind { mock, http };

/// Everything a run needs. The JSON form uses the same key names as the
/// command-line flags (dashes become underscores).
struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path qa;
  std::filesystem::path oracle;
  /// Held-out evaluation split; the training QA set is reused when empty.
  std::filesystem::path eval_qa;
  std::filesystem::path eval_oracle;
  std::filesystem::path out_dir;

  AnswererKind answerer = AnswererKind::mock;
  /// Overrides FLARE_LLM_URL when set.
  std::string endpoint;
  std::size_t max_in_flight = 4;

  std::size_t k = kDefaultTopK;
  std::size_t max_steps = 6;
  std::vector<double> alphas = kDefaultAlphaGrid;
  bool four_class = false;
  std::size_t threads = 1;
  TransportErrorMode on_transport_error = TransportErrorMode::abort;

  std::uint64_t seed = 42;
  std::uint64_t dimension = std::uint64_t{1} << 18;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::size_t batch_size = 64;
  std::size_t epochs = 20;

  FeatureConfig features() const { return {dimension, seed}; }
  TrainingOptions training() const;
  ExecutionOptions execution() const { return {k, max_steps}; }

  /// Overlays the keys of `obj` on `base`. Unknown keys are a UsageError.
  static RunConfig from_json(const nlohmann::json& obj, RunConfig base);
  static RunConfig from_json(const nlohmann::json& obj) { return from_json(obj, RunConfig{}); }
  nlohmann::ordered_json to_json() const;
};

/// A failure inside a pipeline stage. `code` is the CLI exit status the
/// underlying error maps to.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause, int code)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

/// Exit status for an exception: 1 usage, 2 validation/data, 3 transport.
int exit_code_for(const std::exception& e);

/// Builds the answerer named in `config`. For mock answerers the oracle is
/// validated against `qa`; a missing oracle path is a UsageError.
std::unique_ptr<Answerer> make_answerer(const RunConfig& config, const std::filesystem::path& oracle,
                                        const QADataset& qa);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct PipelineResult {
  std::vector<EvalRecord> sweep;
  std::vector<EvalRecord> baselines;
  std::size_t cost_labels = 0;
  std::size_t exclusions = 0;
};

/// ingest -> index -> label(cost) -> label(reliability) -> train x2 ->
/// sweep, plus static and Adaptive-RAG baselines. Every artifact lands in
/// config.out_dir together with manifest.json. Failures throw StageError;
/// artifacts written so far are kept and the manifest records the failed
/// stage.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace flare
