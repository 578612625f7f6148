#pragma once

#include <span>
#include <string>
#include <string_view>

namespace flare {

/// Lowercase, ASCII punctuation to spaces, whitespace runs collapsed to a
/// single space, ends trimmed.
std::string normalize_answer(std::string_view text);

/// Containment accuracy: true iff some normalized gold answer is a
/// substring of the normalized prediction. Golds that normalize to the
/// empty string never match.
bool judge(std::string_view answer, std::span<const std::string> gold_answers);

}  // namespace flare
