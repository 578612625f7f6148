#include "flare/weights_io.hpp"

#include <array>
#include <cmath>
#include <iterator>
#include <sstream>

#include "binary_io.hpp"
#include "jsonl.hpp"

namespace flare {

using detail::Json;
using detail::OrderedJson;

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'L', 'A', 'R', 'E', 'W', 'T', 'S'};

void check_header(std::uint32_t version, std::uint64_t k, std::uint64_t d, std::uint64_t seed,
                  const std::vector<std::string>& classes, const std::optional<FeatureConfig>& expected) {
  if (version != kWeightsFormatVersion) {
    throw ValidationError("weights: unsupported format version " + std::to_string(version));
  }
  if (k != 3 && k != 4) throw ValidationError("weights: K must be 3 or 4, got " + std::to_string(k));
  FeatureConfig{d, seed}.validate();
  if (classes.size() != k) throw ValidationError("weights: class list does not match K");
  const auto order = class_order(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (classes[i] != to_string(order[i])) {
      throw ValidationError("weights: unexpected class order at position " + std::to_string(i));
    }
  }
  if (expected) {
    if (expected->dimension != d) {
      throw ValidationError("weights: dimension mismatch (file D=" + std::to_string(d) +
                            ", expected D=" + std::to_string(expected->dimension) + ")");
    }
    if (expected->seed != seed) throw ValidationError("weights: hash seed mismatch");
  }
}

void save_binary(const ClassifierWeights& w, std::ostream& out) {
  detail::BinaryWriter bw(out);
  bw.put_bytes(kMagic.data(), kMagic.size());
  bw.put(kWeightsFormatVersion);
  bw.put(static_cast<std::uint32_t>(w.num_classes()));
  bw.put(w.features.dimension);
  bw.put(w.features.seed);
  for (auto s : w.classes()) bw.put_string(std::string(to_string(s)));
  bw.put_bytes(w.weights.data(), sizeof(double) * static_cast<std::size_t>(w.weights.size()));
  bw.put_bytes(w.bias.data(), sizeof(double) * static_cast<std::size_t>(w.bias.size()));
  bw.check();
}

ClassifierWeights load_binary(std::istream& in, const std::optional<FeatureConfig>& expected) {
  detail::BinaryReader r(in, "weights");
  std::array<char, 8> magic{};
  r.get_bytes(magic.data(), magic.size());
  if (magic != kMagic) throw ValidationError("weights: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kWeightsFormatVersion) {
    throw ValidationError("weights: unsupported format version " + std::to_string(version));
  }
  const auto k = r.get<std::uint32_t>();
  const auto d = r.get<std::uint64_t>();
  const auto seed = r.get<std::uint64_t>();
  if (k != 3 && k != 4) throw ValidationError("weights: K must be 3 or 4, got " + std::to_string(k));
  std::vector<std::string> classes;
  for (std::uint32_t i = 0; i < k; ++i) classes.push_back(r.get_string(64));
  check_header(version, k, d, seed, classes, expected);

  ClassifierWeights w(k, FeatureConfig{d, seed});
  r.get_bytes(w.weights.data(), sizeof(double) * static_cast<std::size_t>(w.weights.size()));
  r.get_bytes(w.bias.data(), sizeof(double) * static_cast<std::size_t>(w.bias.size()));
  r.expect_end();
  if (!w.all_finite()) throw ValidationError("weights: non-finite entries");
  return w;
}

void save_json(const ClassifierWeights& w, std::ostream& out) {
  OrderedJson obj;
  obj["version"] = kWeightsFormatVersion;
  obj["K"] = w.num_classes();
  obj["D"] = w.features.dimension;
  obj["seed"] = w.features.seed;
  auto classes = OrderedJson::array();
  for (auto s : w.classes()) classes.push_back(to_string(s));
  obj["classes"] = classes;
  auto rows = OrderedJson::array();
  for (Eigen::Index k = 0; k < w.num_classes(); ++k) {
    std::vector<double> row(static_cast<std::size_t>(w.dimension()));
    Eigen::Map<Eigen::RowVectorXd>(row.data(), w.dimension()) = w.weights.row(k);
    rows.push_back(std::move(row));
  }
  obj["W"] = std::move(rows);
  obj["b"] = std::vector<double>(w.bias.data(), w.bias.data() + w.bias.size());
  out << obj.dump() << '\n';
}

ClassifierWeights load_json(std::istream& in, const std::optional<FeatureConfig>& expected) {
  Json obj;
  try {
    obj = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("weights: malformed JSON (") + e.what() + ")");
  }
  try {
    const auto version = obj.at("version").get<std::uint32_t>();
    const auto k = obj.at("K").get<std::uint64_t>();
    const auto d = obj.at("D").get<std::uint64_t>();
    const auto seed = obj.at("seed").get<std::uint64_t>();
    const auto classes = obj.at("classes").get<std::vector<std::string>>();
    check_header(version, k, d, seed, classes, expected);

    ClassifierWeights w(k, FeatureConfig{d, seed});
    const auto& rows = obj.at("W");
    if (!rows.is_array() || rows.size() != k) throw ValidationError("weights: W must have K rows");
    for (std::size_t r = 0; r < k; ++r) {
      const auto row = rows[r].get<std::vector<double>>();
      if (row.size() != d) throw ValidationError("weights: W row length does not match D");
      w.weights.row(static_cast<Eigen::Index>(r)) =
          Eigen::Map<const Eigen::RowVectorXd>(row.data(), w.dimension());
    }
    const auto bias = obj.at("b").get<std::vector<double>>();
    if (bias.size() != k) throw ValidationError("weights: b must have K entries");
    w.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), w.num_classes());
    if (!w.all_finite()) throw ValidationError("weights: non-finite entries");
    return w;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("weights: ") + e.what());
  }
}

}  // namespace

void save_weights(const ClassifierWeights& w, std::ostream& out, WeightFormat format) {
  if (format == WeightFormat::json) {
    save_json(w, out);
  } else {
    save_binary(w, out);
  }
}

void save_weights(const ClassifierWeights& w, const std::filesystem::path& path, WeightFormat format) {
  auto out = detail::open_output(path);
  save_weights(w, out, format);
  if (!out) throw ValidationError("cannot write " + path.string());
}

ClassifierWeights load_weights(std::istream& in, const std::optional<FeatureConfig>& expected) {
  const int first = in.peek();
  if (first == std::char_traits<char>::eof()) throw ValidationError("weights: empty file");
  if (first == '{' || first == ' ' || first == '\n') return load_json(in, expected);
  return load_binary(in, expected);
}

ClassifierWeights load_weights(const std::filesystem::path& path,
                               const std::optional<FeatureConfig>& expected) {
  auto in = detail::open_input(path);
  return load_weights(in, expected);
}

}  // namespace flare
