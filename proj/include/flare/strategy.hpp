#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace flare {

/// Retrieval decision. The underlying value doubles as the classifier's
/// class index, so the declaration order is the cost order.
enum class Strategy : std::uint8_t {
  no_retrieval = 0,
  single_step = 1,
  multi_step = 2,
  unanswerable = 3,
};

inline constexpr std::array<Strategy, 3> kExecutableStrategies = {
    Strategy::no_retrieval, Strategy::single_step, Strategy::multi_step};

/// 0 / 1 / 2 for the executable strategies; unanswerable has no rank.
constexpr std::optional<int> cost_rank(Strategy s) {
  if (s == Strategy::unanswerable) return std::nullopt;
  return static_cast<int>(s);
}

constexpr bool is_executable(Strategy s) { return s != Strategy::unanswerable; }

std::string_view to_string(Strategy s);

/// Parses "no_retrieval", "single_step", "multi_step", "unanswerable".
/// Throws ValidationError on anything else.
Strategy parse_strategy(std::string_view name);

/// Class order for a K-way classifier: the first K strategies.
std::vector<Strategy> class_order(std::size_t num_classes);

/// Small bitset over the four strategies.
class StrategySet {
 public:
  constexpr StrategySet() = default;
  constexpr StrategySet(std::initializer_list<Strategy> items) {
    for (auto s : items) insert(s);
  }

  constexpr void insert(Strategy s) { bits_ |= bit(s); }
  constexpr bool contains(Strategy s) const { return (bits_ & bit(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  /// Members in cost order.
  std::vector<Strategy> members() const;

  friend constexpr bool operator==(StrategySet, StrategySet) = default;

 private:
  static constexpr std::uint8_t bit(Strategy s) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

}  // namespace flare
