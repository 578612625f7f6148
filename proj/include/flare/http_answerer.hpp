#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "flare/answer_engine.hpp"

namespace flare {

struct HttpAnswererConfig {
  /// e.g. "http://localhost:8080/generate"
  std::string url;
  /// Sent as "Authorization: Bearer <token>" when non-empty.
  std::string token;
  std::size_t max_in_flight = 4;
  std::chrono::seconds timeout{120};

  /// Reads FLARE_LLM_URL and FLARE_LLM_TOKEN. Throws UsageError when the
  /// URL is unset.
  static HttpAnswererConfig from_env();
};

/// Marker a model uses to end the multi-step loop.
inline constexpr std::string_view kFinalAnswerMarker = "So the answer is:";

/// Plain concatenation of passages, question and (multi-step) reasoning so
/// far, followed by the instruction for the reply protocol.
std::string build_prompt(const AnswerRequest& request);

/// In multi-step mode a reply carrying kFinalAnswerMarker is final (the text
/// after the marker is the answer); any other reply is the next query. In
/// the other modes every reply is final.
AnswererReply parse_reply(std::string_view text, Strategy mode);

/// POSTs {"prompt": ...} and expects {"text": ...}. Bounded number of
/// concurrent requests.
class HttpAnswerer final : public Answerer {
 public:
  explicit HttpAnswerer(HttpAnswererConfig config);
  ~HttpAnswerer() override;

  AnswererReply respond(const AnswerRequest& request) const override;

  const HttpAnswererConfig& config() const { return config_; }

 private:
  struct State;
  HttpAnswererConfig config_;
  std::string origin_;
  std::string path_;
  std::unique_ptr<State> state_;
};

}  // namespace flare
