#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "flare/classifier.hpp"

namespace flare {

inline constexpr std::uint32_t kWeightsFormatVersion = 1;

enum class WeightFormat { binary, json };

/// Binary: magic "FLAREWTS", version, K, D, seed, class names, W
/// (column-major doubles), b. JSON: {version,K,D,seed,classes,W,b} with W
/// as K rows of D numbers. Both round-trip bit-exactly.
void save_weights(const ClassifierWeights& w, std::ostream& out, WeightFormat format = WeightFormat::binary);
void save_weights(const ClassifierWeights& w, const std::filesystem::path& path,
                  WeightFormat format = WeightFormat::binary);

/// Detects the format from the first bytes. When `expected` is given, a
/// different dimension or seed is a ValidationError.
ClassifierWeights load_weights(std::istream& in, const std::optional<FeatureConfig>& expected = std::nullopt);
ClassifierWeights load_weights(const std::filesystem::path& path,
                               const std::optional<FeatureConfig>& expected = std::nullopt);

}  // namespace flare
