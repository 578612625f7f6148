#include "flare/http_answerer.hpp"

#include <cstdlib>
#include <semaphore>
#include <sstream>

#include "httplib.h"
#include "jsonl.hpp"

namespace flare {

using detail::Json;

struct HttpAnswerer::State {
  explicit State(std::ptrdiff_t limit) : slots(limit) {}
  mutable std::counting_semaphore<> slots;
};

HttpAnswererConfig HttpAnswererConfig::from_env() {
  HttpAnswererConfig config;
  const char* url = std::getenv("FLARE_LLM_URL");
  if (url == nullptr || *url == '\0') throw UsageError("FLARE_LLM_URL is not set");
  config.url = url;
  if (const char* token = std::getenv("FLARE_LLM_TOKEN")) config.token = token;
  return config;
}

std::string build_prompt(const AnswerRequest& request) {
  std::ostringstream out;
  for (const auto& p : request.context) {
    out << "Wikipedia Title: " << p.title << '\n' << p.text << "\n\n";
  }
  out << "Q: " << request.query.text << '\n';
  if (request.mode == Strategy::multi_step) {
    out << "A:";
    for (const auto& sentence : request.reasoning) out << ' ' << sentence;
    out << "\nContinue with one reasoning sentence to search for next, or reply \"" << kFinalAnswerMarker
        << " <answer>\" if the passages suffice.";
  } else {
    out << "A:";
  }
  return out.str();
}

AnswererReply parse_reply(std::string_view text, Strategy mode) {
  auto trim = [](std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::string();
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
  };
  if (mode != Strategy::multi_step) return {ReplyKind::final_answer, trim(text)};
  if (auto pos = text.find(kFinalAnswerMarker); pos != std::string_view::npos) {
    return {ReplyKind::final_answer, trim(text.substr(pos + kFinalAnswerMarker.size()))};
  }
  return {ReplyKind::next_query, trim(text)};
}

HttpAnswerer::HttpAnswerer(HttpAnswererConfig config) : config_(std::move(config)) {
  if (config_.max_in_flight == 0) throw UsageError("max_in_flight must be positive");
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) throw UsageError("endpoint URL needs a scheme: " + config_.url);
  const auto scheme = config_.url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw UsageError("unsupported URL scheme: " + scheme);
  const auto path_start = config_.url.find('/', scheme_end + 3);
  origin_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
  state_ = std::make_unique<State>(static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

HttpAnswerer::~HttpAnswerer() = default;

AnswererReply HttpAnswerer::respond(const AnswerRequest& request) const {
  const std::string body = Json{{"prompt", build_prompt(request)}}.dump();

  state_->slots.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{state_->slots};

  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);

  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) throw TransportError("answerer request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("answerer returned HTTP " + std::to_string(res->status));

  Json reply;
  try {
    reply = Json::parse(res->body);
  } catch (const Json::parse_error&) {
    throw TransportError("answerer returned malformed JSON");
  }
  auto text = reply.find("text");
  if (!reply.is_object() || text == reply.end() || !text->is_string()) {
    throw TransportError("answerer response lacks a string 'text' field");
  }
  return parse_reply(text->get<std::string>(), request.mode);
}

}  // namespace flare
