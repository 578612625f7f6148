#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <string_view>

namespace flare {

/// XXH64 of `data` with `seed`.
std::uint64_t xxhash64(std::string_view data, std::uint64_t seed);

struct FeatureConfig {
  /// Hash space size; a power of two, at least 2.
  std::uint64_t dimension = std::uint64_t{1} << 18;
  std::uint64_t seed = 42;

  /// Throws ValidationError when dimension is not a power of two >= 2 or
  /// does not fit Eigen's index type.
  void validate() const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

using FeatureVector = Eigen::SparseVector<double>;

/// Hashed bag of word unigrams and bigrams ("w1 w2"), counts accumulated
/// per bucket. The total count equals the number of extracted n-grams.
FeatureVector featurize(const FeatureConfig& config, std::string_view text);

}  // namespace flare
