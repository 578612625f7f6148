#include "flare/judge.hpp"

namespace flare {

namespace {

bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
}

bool is_ascii_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

}  // namespace

std::string normalize_answer(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_ascii_punct(c) || is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    out.push_back(static_cast<char>(c));
  }
  return out;
}

bool judge(std::string_view answer, std::span<const std::string> gold_answers) {
  const auto normalized = normalize_answer(answer);
  for (const auto& gold : gold_answers) {
    const auto g = normalize_answer(gold);
    if (!g.empty() && normalized.find(g) != std::string::npos) return true;
  }
  return false;
}

}  // namespace flare
