#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flare {

struct TokenizerConfig {
  bool lowercase = true;

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

/// Splits on runs of ASCII non-alphanumeric bytes and lowercases ASCII
/// letters. Bytes >= 0x80 are kept as term characters so UTF-8 sequences
/// stay intact.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

}  // namespace flare
