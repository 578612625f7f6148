#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>

#include "flare/errors.hpp"
#include "json.hpp"

namespace flare::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Calls fn(json, line_number) for each non-blank line. Parse failures are
/// reported with their 1-based line number.
template <typename Fn>
void for_each_jsonl(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!value.is_object()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected a JSON object");
    }
    fn(value, line_no);
  }
}

inline std::string require_string(const Json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError("line " + std::to_string(line_no) + ": missing key '" + key + "'");
  }
  if (!it->is_string()) {
    throw ValidationError("line " + std::to_string(line_no) + ": key '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

}  // namespace flare::detail
