#include "flare/features.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "flare/errors.hpp"
#include "flare/tokenizer.hpp"

namespace flare {

namespace {

constexpr std::uint64_t kPrime1 = 0x9E3779B185EBCA87ULL;
constexpr std::uint64_t kPrime2 = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t kPrime3 = 0x165667B19E3779F9ULL;
constexpr std::uint64_t kPrime4 = 0x85EBCA77C2B2AE63ULL;
constexpr std::uint64_t kPrime5 = 0x27D4EB2F165667C5ULL;

std::uint64_t read64(const unsigned char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

std::uint32_t read32(const unsigned char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

std::uint64_t round(std::uint64_t acc, std::uint64_t input) {
  acc += input * kPrime2;
  acc = std::rotl(acc, 31);
  return acc * kPrime1;
}

std::uint64_t merge_round(std::uint64_t acc, std::uint64_t val) {
  acc ^= round(0, val);
  return acc * kPrime1 + kPrime4;
}

}  // namespace

std::uint64_t xxhash64(std::string_view data, std::uint64_t seed) {
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  const auto* const end = p + data.size();
  std::uint64_t h;

  if (data.size() >= 32) {
    std::uint64_t v1 = seed + kPrime1 + kPrime2;
    std::uint64_t v2 = seed + kPrime2;
    std::uint64_t v3 = seed;
    std::uint64_t v4 = seed - kPrime1;
    const auto* const limit = end - 32;
    do {
      v1 = round(v1, read64(p));
      v2 = round(v2, read64(p + 8));
      v3 = round(v3, read64(p + 16));
      v4 = round(v4, read64(p + 24));
      p += 32;
    } while (p <= limit);
    h = std::rotl(v1, 1) + std::rotl(v2, 7) + std::rotl(v3, 12) + std::rotl(v4, 18);
    h = merge_round(h, v1);
    h = merge_round(h, v2);
    h = merge_round(h, v3);
    h = merge_round(h, v4);
  } else {
    h = seed + kPrime5;
  }
  h += static_cast<std::uint64_t>(data.size());

  while (p + 8 <= end) {
    h ^= round(0, read64(p));
    h = std::rotl(h, 27) * kPrime1 + kPrime4;
    p += 8;
  }
  if (p + 4 <= end) {
    h ^= static_cast<std::uint64_t>(read32(p)) * kPrime1;
    h = std::rotl(h, 23) * kPrime2 + kPrime3;
    p += 4;
  }
  while (p < end) {
    h ^= (*p) * kPrime5;
    h = std::rotl(h, 11) * kPrime1;
    ++p;
  }

  h ^= h >> 33;
  h *= kPrime2;
  h ^= h >> 29;
  h *= kPrime3;
  h ^= h >> 32;
  return h;
}

void FeatureConfig::validate() const {
  if (dimension < 2 || !std::has_single_bit(dimension)) {
    throw ValidationError("feature dimension must be a power of two >= 2, got " + std::to_string(dimension));
  }
  if (dimension > static_cast<std::uint64_t>(std::numeric_limits<FeatureVector::StorageIndex>::max())) {
    throw ValidationError("feature dimension too large: " + std::to_string(dimension));
  }
}

FeatureVector featurize(const FeatureConfig& config, std::string_view text) {
  config.validate();
  const auto terms = tokenize(text);
  const std::uint64_t mask = config.dimension - 1;

  std::vector<FeatureVector::StorageIndex> buckets;
  buckets.reserve(terms.empty() ? 0 : 2 * terms.size() - 1);
  std::string bigram;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    buckets.push_back(static_cast<FeatureVector::StorageIndex>(xxhash64(terms[i], config.seed) & mask));
    if (i + 1 < terms.size()) {
      bigram.assign(terms[i]).append(" ").append(terms[i + 1]);
      buckets.push_back(static_cast<FeatureVector::StorageIndex>(xxhash64(bigram, config.seed) & mask));
    }
  }
  std::sort(buckets.begin(), buckets.end());

  FeatureVector x(static_cast<Eigen::Index>(config.dimension));
  x.reserve(static_cast<Eigen::Index>(buckets.size()));
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    x.insertBack(buckets[i]) = static_cast<double>(j - i);
    i = j;
  }
  return x;
}

}  // namespace flare
