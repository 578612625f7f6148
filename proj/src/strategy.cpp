#include "flare/strategy.hpp"

#include <string>

#include "flare/errors.hpp"

namespace flare {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::no_retrieval:
      return "no_retrieval";
    case Strategy::single_step:
      return "single_step";
    case Strategy::multi_step:
      return "multi_step";
    case Strategy::unanswerable:
      return "unanswerable";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "no_retrieval") return Strategy::no_retrieval;
  if (name == "single_step") return Strategy::single_step;
  if (name == "multi_step") return Strategy::multi_step;
  if (name == "unanswerable") return Strategy::unanswerable;
  throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

std::vector<Strategy> class_order(std::size_t num_classes) {
  if (num_classes != 3 && num_classes != 4) {
    throw ValidationError("classifier must have 3 or 4 classes, got " + std::to_string(num_classes));
  }
  std::vector<Strategy> order;
  for (std::size_t i = 0; i < num_classes; ++i) order.push_back(static_cast<Strategy>(i));
  return order;
}

std::vector<Strategy> StrategySet::members() const {
  std::vector<Strategy> out;
  for (unsigned i = 0; i < 4; ++i) {
    auto s = static_cast<Strategy>(i);
    if (contains(s)) out.push_back(s);
  }
  return out;
}

}  // namespace flare
