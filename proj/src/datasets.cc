// Copyright 2026 The hdring Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdring/datasets.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "hdring/errors.h"
#include "hdring/seeding.h"

namespace hdring {
namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::vector<std::uint8_t> ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(fmt::format("{}: cannot open file", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t BigEndian32(const std::vector<std::uint8_t>& bytes,
                          std::size_t offset, const std::string& path) {
  if (offset + 4 > bytes.size()) {
    throw LoadError(fmt::format("{}: truncated header at byte offset {}", path,
                                offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

void CheckMagic(std::uint32_t got, std::uint32_t want,
                const std::string& path) {
  if (got != want) {
    throw LoadError(fmt::format(
        "{}: bad magic number 0x{:08x} at byte offset 0 (expected 0x{:08x})",
        path, got, want));
  }
}

void CheckPayload(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                  std::size_t needed, const std::string& path) {
  if (bytes.size() < offset + needed) {
    throw LoadError(fmt::format(
        "{}: truncated payload, data ends at byte offset {} but {} bytes are "
        "declared from offset {}",
        path, bytes.size(), needed, offset));
  }
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double ParseReal(const std::string& token, const std::string& path,
                 int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used == token.size()) return v;
  } catch (const std::exception&) {
  }
  throw LoadError(fmt::format("{}:{}: non-numeric field '{}'", path, line_no,
                              token));
}

int ParseLabel(std::string token, const std::string& path, int line_no) {
  token = Trim(token);
  if (!token.empty() && token.back() == '.') token.pop_back();
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used == token.size()) return v;
  } catch (const std::exception&) {
  }
  throw LoadError(
      fmt::format("{}:{}: non-numeric label '{}'", path, line_no, token));
}

struct RawRow {
  std::vector<double> features;
  int label = 0;
  int line_no = 0;
};

// Maps raw labels to [0, S) by sorted train labels. A test label missing from
// train is a load error naming its line.
void RemapLabels(std::vector<RawRow>& train, std::vector<RawRow>& test,
                 const std::string& test_path, int* class_count) {
  std::set<int> seen;
  for (const RawRow& r : train) seen.insert(r.label);
  std::map<int, int> index;
  for (int label : seen) index.emplace(label, static_cast<int>(index.size()));
  for (RawRow& r : train) r.label = index.at(r.label);
  for (RawRow& r : test) {
    auto it = index.find(r.label);
    if (it == index.end()) {
      throw LoadError(fmt::format("{}:{}: label {} does not occur in train",
                                  test_path, r.line_no, r.label));
    }
    r.label = it->second;
  }
  *class_count = static_cast<int>(index.size());
}

SampleSet ToSamples(const std::vector<RawRow>& rows) {
  SampleSet out;
  out.reserve(rows.size());
  for (const RawRow& r : rows) {
    FeatureVector fv;
    fv.features = Eigen::Map<const Eigen::VectorXd>(
        r.features.data(), static_cast<Eigen::Index>(r.features.size()));
    fv.label = r.label;
    out.push_back(std::move(fv));
  }
  return out;
}

void CheckWidth(const std::vector<RawRow>& rows, std::size_t width,
                const std::string& path) {
  for (const RawRow& r : rows) {
    if (r.features.size() != width) {
      throw LoadError(fmt::format("{}:{}: expected {} features, got {}", path,
                                  r.line_no, width, r.features.size()));
    }
  }
}

std::vector<RawRow> ReadIsoletFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open file", path));
  std::vector<RawRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(Trim(field));
    if (fields.size() < 2) {
      throw LoadError(
          fmt::format("{}:{}: expected features and a label", path, line_no));
    }
    RawRow row;
    row.line_no = line_no;
    row.label = ParseLabel(fields.back(), path, line_no);
    fields.pop_back();
    row.features.reserve(fields.size());
    for (const std::string& f : fields) {
      row.features.push_back(ParseReal(f, path, line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw LoadError(fmt::format("{}: no samples", path));
  return rows;
}

std::vector<std::vector<double>> ReadWhitespaceMatrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open file", path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string token;
    while (ss >> token) row.push_back(ParseReal(token, path, line_no));
    if (row.empty()) continue;
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw LoadError(fmt::format("{}:{}: expected {} features, got {}", path,
                                  line_no, width, row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw LoadError(fmt::format("{}: no samples", path));
  return rows;
}

std::vector<int> ReadLabelColumn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open file", path));
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    labels.push_back(ParseLabel(line, path, line_no));
  }
  return labels;
}

std::vector<RawRow> Zip(std::vector<std::vector<double>> features,
                        const std::vector<int>& labels,
                        const std::string& label_path) {
  if (features.size() != labels.size()) {
    throw LoadError(fmt::format("{}: {} labels for {} feature rows",
                                label_path, labels.size(), features.size()));
  }
  std::vector<RawRow> rows(features.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].features = std::move(features[i]);
    rows[i].label = labels[i];
    rows[i].line_no = static_cast<int>(i) + 1;
  }
  return rows;
}

std::string RequirePath(const std::map<std::string, std::string>& paths,
                        const std::string& dataset, const std::string& key) {
  auto it = paths.find(key);
  if (it == paths.end() || it->second.empty()) {
    throw ConfigError(
        fmt::format("dataset {} needs paths.{}", dataset, key));
  }
  return it->second;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> ReadIdxImages(const std::string& path,
                                                     int* rows, int* cols) {
  const std::vector<std::uint8_t> bytes = ReadBytes(path);
  CheckMagic(BigEndian32(bytes, 0, path), kIdxImagesMagic, path);
  const std::uint32_t count = BigEndian32(bytes, 4, path);
  const std::uint32_t r = BigEndian32(bytes, 8, path);
  const std::uint32_t c = BigEndian32(bytes, 12, path);
  const std::size_t pixels = std::size_t{r} * c;
  CheckPayload(bytes, 16, std::size_t{count} * pixels, path);
  std::vector<std::vector<std::uint8_t>> images(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto begin = bytes.begin() + 16 + static_cast<std::ptrdiff_t>(i * pixels);
    images[i].assign(begin, begin + static_cast<std::ptrdiff_t>(pixels));
  }
  if (rows != nullptr) *rows = static_cast<int>(r);
  if (cols != nullptr) *cols = static_cast<int>(c);
  return images;
}

std::vector<std::uint8_t> ReadIdxLabels(const std::string& path) {
  const std::vector<std::uint8_t> bytes = ReadBytes(path);
  CheckMagic(BigEndian32(bytes, 0, path), kIdxLabelsMagic, path);
  const std::uint32_t count = BigEndian32(bytes, 4, path);
  CheckPayload(bytes, 8, count, path);
  return {bytes.begin() + 8, bytes.begin() + 8 + count};
}

Dataset LoadMnist(const MnistPaths& paths, MnistScaling scaling) {
  Dataset ds;
  ds.name = "mnist";
  auto load_split = [&](const std::string& image_path,
                        const std::string& label_path, int* feature_dim) {
    int rows = 0;
    int cols = 0;
    const auto images = ReadIdxImages(image_path, &rows, &cols);
    const auto labels = ReadIdxLabels(label_path);
    if (images.size() != labels.size()) {
      throw LoadError(fmt::format("{}: {} labels for {} images in {}",
                                  label_path, labels.size(), images.size(),
                                  image_path));
    }
    *feature_dim = rows * cols;
    std::vector<RawRow> out(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
      out[i].features.assign(images[i].begin(), images[i].end());
      for (double& v : out[i].features) v /= 255.0;
      out[i].label = labels[i];
      out[i].line_no = static_cast<int>(i);
    }
    return out;
  };
  int train_dim = 0;
  int test_dim = 0;
  auto train = load_split(paths.train_images, paths.train_labels, &train_dim);
  auto test = load_split(paths.test_images, paths.test_labels, &test_dim);
  if (train_dim != test_dim) {
    throw LoadError(fmt::format("{}: image size {} differs from train size {}",
                                paths.test_images, test_dim, train_dim));
  }
  ds.transforms.push_back("pixels/255");
  if (scaling == MnistScaling::kUnitL2) {
    for (auto* split : {&train, &test}) {
      for (RawRow& r : *split) {
        double norm = 0.0;
        for (double v : r.features) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
          for (double& v : r.features) v /= norm;
        }
      }
    }
    ds.transforms.push_back("per-sample unit L2 norm");
  }
  RemapLabels(train, test, paths.test_labels, &ds.class_count);
  ds.feature_dim = train_dim;
  ds.train = ToSamples(train);
  ds.test = ToSamples(test);
  return ds;
}

Dataset LoadIsolet(const std::string& train_path,
                   const std::string& test_path) {
  auto train = ReadIsoletFile(train_path);
  auto test = ReadIsoletFile(test_path);
  const std::size_t width = train.front().features.size();
  CheckWidth(train, width, train_path);
  CheckWidth(test, width, test_path);
  Dataset ds;
  ds.name = "isolet";
  RemapLabels(train, test, test_path, &ds.class_count);
  ds.feature_dim = static_cast<int>(width);
  ds.train = ToSamples(train);
  ds.test = ToSamples(test);
  ds.transforms.push_back("none (features supplied in [-1, 1])");
  return ds;
}

Dataset LoadUciHar(const UciHarPaths& paths) {
  auto train = Zip(ReadWhitespaceMatrix(paths.train_features),
                   ReadLabelColumn(paths.train_labels), paths.train_labels);
  auto test = Zip(ReadWhitespaceMatrix(paths.test_features),
                  ReadLabelColumn(paths.test_labels), paths.test_labels);
  const std::size_t width = train.front().features.size();
  CheckWidth(test, width, paths.test_features);

  std::vector<double> mean(width, 0.0);
  std::vector<double> scale(width, 0.0);
  for (const RawRow& r : train) {
    for (std::size_t f = 0; f < width; ++f) mean[f] += r.features[f];
  }
  for (double& m : mean) m /= static_cast<double>(train.size());
  for (const RawRow& r : train) {
    for (std::size_t f = 0; f < width; ++f) {
      const double d = r.features[f] - mean[f];
      scale[f] += d * d;
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(train.size()));
    if (s == 0.0) s = 1.0;
  }
  for (auto* split : {&train, &test}) {
    for (RawRow& r : *split) {
      for (std::size_t f = 0; f < width; ++f) {
        r.features[f] = (r.features[f] - mean[f]) / scale[f];
      }
    }
  }

  Dataset ds;
  ds.name = "ucihar";
  RemapLabels(train, test, paths.test_labels, &ds.class_count);
  ds.feature_dim = static_cast<int>(width);
  ds.train = ToSamples(train);
  ds.test = ToSamples(test);
  ds.transforms.push_back("z-score with train mean and population stddev");
  return ds;
}

Dataset MakeSynthetic(const SyntheticSpec& spec) {
  if (spec.train_samples < 0 || spec.test_samples < 0 ||
      spec.feature_dim < 1 || spec.class_count < 1 ||
      !(spec.separation >= 0.0) || !(spec.spread >= 0.0)) {
    throw ConfigError("synthetic: invalid generator parameters");
  }
  std::mt19937_64 rng = MakeStream(spec.seed, {0x73796e7468ULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  const double root_f = std::sqrt(static_cast<double>(spec.feature_dim));
  std::vector<Eigen::VectorXd> centres(spec.class_count);
  for (auto& c : centres) {
    c.resize(spec.feature_dim);
    for (int f = 0; f < spec.feature_dim; ++f) {
      c(f) = normal(rng) * spec.separation / root_f;
    }
  }
  auto draw = [&](int n) {
    SampleSet out(n);
    for (int i = 0; i < n; ++i) {
      out[i].label = i % spec.class_count;
      out[i].features = centres[out[i].label];
      for (int f = 0; f < spec.feature_dim; ++f) {
        out[i].features(f) += normal(rng) * spec.spread / root_f;
      }
    }
    return out;
  };
  Dataset ds;
  ds.name = "synthetic";
  ds.feature_dim = spec.feature_dim;
  ds.class_count = spec.class_count;
  ds.train = draw(spec.train_samples);
  ds.test = draw(spec.test_samples);
  ds.transforms.push_back("none (generated)");
  return ds;
}

Dataset Load(const std::string& name,
             const std::map<std::string, std::string>& paths,
             const std::string& normalization,
             const SyntheticSpec& synthetic) {
  if (name == "mnist") {
    MnistScaling scaling = MnistScaling::kUnitL2;
    if (normalization == "unit_range") {
      scaling = MnistScaling::kUnitRange;
    } else if (!normalization.empty() && normalization != "unit_l2") {
      throw ConfigError(fmt::format(
          "unknown mnist normalization '{}' (unit_l2 | unit_range)",
          normalization));
    }
    return LoadMnist({RequirePath(paths, name, "train_images"),
                      RequirePath(paths, name, "train_labels"),
                      RequirePath(paths, name, "test_images"),
                      RequirePath(paths, name, "test_labels")},
                     scaling);
  }
  if (!normalization.empty() && normalization != "default") {
    throw ConfigError(
        fmt::format("dataset {} has a fixed normalization", name));
  }
  if (name == "isolet") {
    return LoadIsolet(RequirePath(paths, name, "train"),
                      RequirePath(paths, name, "test"));
  }
  if (name == "ucihar") {
    return LoadUciHar({RequirePath(paths, name, "train_features"),
                       RequirePath(paths, name, "train_labels"),
                       RequirePath(paths, name, "test_features"),
                       RequirePath(paths, name, "test_labels")});
  }
  if (name == "synthetic") return MakeSynthetic(synthetic);
  throw ConfigError(fmt::format(
      "unknown dataset '{}' (mnist | isolet | ucihar | synthetic)", name));
}

void Truncate(Dataset& ds, int train_limit, int test_limit) {
  if (train_limit < 0 || test_limit < 0) {
    throw ConfigError("train_limit and test_limit must be >= 0");
  }
  if (train_limit > 0 && train_limit < static_cast<int>(ds.train.size())) {
    ds.train.resize(train_limit);
  }
  if (test_limit > 0 && test_limit < static_cast<int>(ds.test.size())) {
    ds.test.resize(test_limit);
  }
}

std::vector<std::vector<int>> ClassGroups(int class_count) {
  std::vector<std::vector<int>> groups;
  for (int c = 0; c < class_count; c += 2) {
    if (c + 1 < class_count) {
      groups.push_back({c, c + 1});
    } else {
      groups.push_back({c});
    }
  }
  return groups;
}

PartitionPlan Partition(const Dataset& ds, PartitionMode mode, int clients,
                        int samples_per_client, std::uint64_t seed) {
  if (clients < 1) {
    throw ConfigError(fmt::format("need at least one client, got {}", clients));
  }
  if (samples_per_client < 0) {
    throw ConfigError("samples_per_client must be >= 0");
  }
  const int n = static_cast<int>(ds.train.size());
  PartitionPlan plan;
  plan.mode = mode;
  plan.seed = seed;
  plan.assignments.resize(clients);

  if (mode == PartitionMode::kIid) {
    int per_client = samples_per_client;
    if (per_client == 0) per_client = (n + clients - 1) / clients;
    const long long wanted = static_cast<long long>(per_client) * clients;
    const bool whole_split = samples_per_client == 0;
    if (!whole_split && wanted > n) {
      throw PartitionError(fmt::format(
          "IID split needs K*N = {}*{} = {} samples, train has {}", clients,
          per_client, wanted, n));
    }
    if (whole_split && static_cast<long long>(per_client) * (clients - 1) >= n) {
      throw PartitionError(fmt::format(
          "cannot spread {} samples over {} clients", n, clients));
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng = MakeStream(seed, {0x696964ULL});
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 0; k < clients; ++k) {
      const int begin = k * per_client;
      const int end = std::min(n, begin + per_client);
      plan.assignments[k].assign(order.begin() + begin, order.begin() + end);
    }
    plan.samples_per_client = per_client;
    return plan;
  }

  if (samples_per_client == 0) {
    throw ConfigError("non-IID partitioning needs samples_per_client >= 1");
  }
  const auto groups = ClassGroups(ds.class_count);
  std::vector<std::vector<int>> pools(groups.size());
  std::vector<int> group_of(ds.class_count, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int c : groups[g]) group_of[c] = static_cast<int>(g);
  }
  for (int i = 0; i < n; ++i) pools[group_of[ds.train[i].label]].push_back(i);
  for (std::size_t g = 0; g < pools.size(); ++g) {
    std::mt19937_64 rng = MakeStream(seed, {0x6e6f6e696964ULL, g});
    std::shuffle(pools[g].begin(), pools[g].end(), rng);
  }
  std::vector<std::size_t> taken(groups.size(), 0);
  for (int k = 0; k < clients; ++k) {
    const std::size_t g = static_cast<std::size_t>(k) % groups.size();
    if (taken[g] + samples_per_client > pools[g].size()) {
      std::string names;
      for (int c : groups[g]) names += (names.empty() ? "" : ",") + std::to_string(c);
      throw PartitionError(fmt::format(
          "class group {{{}}} has {} samples left, client {} needs {}", names,
          pools[g].size() - taken[g], k + 1, samples_per_client));
    }
    const auto begin = pools[g].begin() + static_cast<std::ptrdiff_t>(taken[g]);
    plan.assignments[k].assign(begin, begin + samples_per_client);
    taken[g] += samples_per_client;
  }
  plan.samples_per_client = samples_per_client;
  return plan;
}

void PartitionPlan::WriteCsv(std::ostream& out) const {
  out << "client,sample_index\n";
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    for (int idx : assignments[k]) out << k + 1 << ',' << idx << '\n';
  }
}

const char* ToString(PartitionMode mode) {
  return mode == PartitionMode::kIid ? "iid" : "non_iid";
}

PartitionMode ParsePartitionMode(const std::string& text) {
  if (text == "iid") return PartitionMode::kIid;
  if (text == "non_iid" || text == "noniid") return PartitionMode::kNonIid;
  throw ConfigError(
      fmt::format("unknown partition mode '{}' (iid | non_iid)", text));
}

}  // namespace hdring
