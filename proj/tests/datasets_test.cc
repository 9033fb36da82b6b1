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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>

#include "hdring/errors.h"

namespace hdring {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("hdring_datasets_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

void WriteBytes(const std::string& path, const std::vector<std::uint8_t>& b) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

void PushBigEndian(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) b.push_back((v >> shift) & 0xff);
}

std::vector<std::uint8_t> IdxImages(int count, int rows, int cols,
                                    std::uint32_t magic = 0x803) {
  std::vector<std::uint8_t> b;
  PushBigEndian(b, magic);
  PushBigEndian(b, count);
  PushBigEndian(b, rows);
  PushBigEndian(b, cols);
  for (int i = 0; i < count * rows * cols; ++i) b.push_back((i * 37) % 256);
  return b;
}

std::vector<std::uint8_t> IdxLabels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> b;
  PushBigEndian(b, 0x801);
  PushBigEndian(b, static_cast<std::uint32_t>(labels.size()));
  b.insert(b.end(), labels.begin(), labels.end());
  return b;
}

std::string ErrorText(const std::function<void()>& f) {
  try {
    f();
  } catch (const LoadError& e) {
    return e.what();
  }
  return "";
}

TEST(IdxTest, ReadsImagesAndLabels) {
  TempDir dir;
  WriteBytes(dir.File("img"), IdxImages(3, 2, 2));
  WriteBytes(dir.File("lbl"), IdxLabels({4, 0, 9}));
  int rows = 0, cols = 0;
  const auto images = ReadIdxImages(dir.File("img"), &rows, &cols);
  ASSERT_EQ(images.size(), 3u);
  EXPECT_EQ(rows, 2);
  EXPECT_EQ(cols, 2);
  EXPECT_EQ(images[1], (std::vector<std::uint8_t>{148, 185, 222, 3}));
  EXPECT_EQ(ReadIdxLabels(dir.File("lbl")),
            (std::vector<std::uint8_t>{4, 0, 9}));
}

TEST(IdxTest, BadMagicReportsOffsetZero) {
  TempDir dir;
  WriteBytes(dir.File("img"), IdxImages(1, 2, 2, 0x801));
  const std::string msg = ErrorText([&] { ReadIdxImages(dir.File("img")); });
  EXPECT_NE(msg.find("magic"), std::string::npos) << msg;
  EXPECT_NE(msg.find("offset 0"), std::string::npos) << msg;
}

TEST(IdxTest, TruncatedFilesAreLoadErrors) {
  TempDir dir;
  auto img = IdxImages(4, 3, 3);
  img.resize(img.size() - 5);
  WriteBytes(dir.File("img"), img);
  EXPECT_NE(ErrorText([&] { ReadIdxImages(dir.File("img")); }), "");
  WriteBytes(dir.File("hdr"), {0, 0, 8, 3, 0, 0});
  const std::string msg = ErrorText([&] { ReadIdxImages(dir.File("hdr")); });
  EXPECT_NE(msg.find("offset"), std::string::npos) << msg;
  auto lbl = IdxLabels({1, 2, 3});
  lbl.pop_back();
  WriteBytes(dir.File("lbl"), lbl);
  EXPECT_NE(ErrorText([&] { ReadIdxLabels(dir.File("lbl")); }), "");
  EXPECT_NE(ErrorText([&] { ReadIdxLabels(dir.File("missing")); }), "");
}

TEST(MnistTest, ScalingModes) {
  TempDir dir;
  WriteBytes(dir.File("tri"), IdxImages(4, 2, 3));
  WriteBytes(dir.File("trl"), IdxLabels({0, 1, 2, 1}));
  WriteBytes(dir.File("tei"), IdxImages(2, 2, 3));
  WriteBytes(dir.File("tel"), IdxLabels({2, 0}));
  const MnistPaths paths{dir.File("tri"), dir.File("trl"), dir.File("tei"),
                         dir.File("tel")};
  const Dataset range = LoadMnist(paths, MnistScaling::kUnitRange);
  EXPECT_EQ(range.feature_dim, 6);
  EXPECT_EQ(range.class_count, 3);  // labels {0, 1, 2} occur in train
  ASSERT_EQ(range.train.size(), 4u);
  EXPECT_DOUBLE_EQ(range.train[0].features[1], 37.0 / 255.0);
  EXPECT_EQ(range.train[3].label, 1);
  for (const auto& s : range.train) {
    EXPECT_GE(s.features.minCoeff(), 0.0);
    EXPECT_LE(s.features.maxCoeff(), 1.0);
  }
  const Dataset l2 = LoadMnist(paths, MnistScaling::kUnitL2);
  for (std::size_t i = 0; i < l2.train.size(); ++i) {
    EXPECT_NEAR(l2.train[i].features.norm(), 1.0, 1e-12);
    const Eigen::VectorXd direction =
        range.train[i].features / range.train[i].features.norm();
    EXPECT_TRUE(l2.train[i].features.isApprox(direction, 1e-12));
  }
  EXPECT_EQ(l2.transforms.size(), 2u);
}

TEST(MnistTest, LabelCountMismatchIsLoadError) {
  TempDir dir;
  WriteBytes(dir.File("tri"), IdxImages(4, 2, 3));
  WriteBytes(dir.File("trl"), IdxLabels({0, 1, 2}));
  const MnistPaths paths{dir.File("tri"), dir.File("trl"), dir.File("tri"),
                         dir.File("trl")};
  EXPECT_THROW(LoadMnist(paths), LoadError);
}

TEST(MnistTest, FetchedFilesHaveTheStandardShape) {
  const char* dir = std::getenv("HDRING_MNIST_DIR");
  if (dir == nullptr || !fs::exists(fs::path(dir) / "train-images-idx3-ubyte")) {
    GTEST_SKIP() << "MNIST files not present; run tools/fetch_mnist.py";
  }
  const fs::path d(dir);
  const Dataset ds = LoadMnist({(d / "train-images-idx3-ubyte").string(),
                                (d / "train-labels-idx1-ubyte").string(),
                                (d / "t10k-images-idx3-ubyte").string(),
                                (d / "t10k-labels-idx1-ubyte").string()});
  EXPECT_EQ(ds.feature_dim, 784);
  EXPECT_EQ(ds.class_count, 10);
  EXPECT_GE(ds.train.size(), 5000u);
  EXPECT_GE(ds.test.size(), 2000u);
  std::set<int> labels;
  for (const auto& s : ds.train) labels.insert(s.label);
  EXPECT_EQ(labels.size(), 10u);
}

TEST(IsoletTest, ParsesCommaSeparatedRowsAndRemapsLabels) {
  TempDir dir;
  WriteText(dir.File("train"), "0.5, -0.25, 1.\n-1,0,3.\n0.1,0.2,1\n");
  WriteText(dir.File("test"), "0,0,3\n");
  const Dataset ds = LoadIsolet(dir.File("train"), dir.File("test"));
  EXPECT_EQ(ds.feature_dim, 2);
  EXPECT_EQ(ds.class_count, 2);
  ASSERT_EQ(ds.train.size(), 3u);
  EXPECT_EQ(ds.train[0].label, 0);
  EXPECT_EQ(ds.train[1].label, 1);
  EXPECT_EQ(ds.test[0].label, 1);
  EXPECT_DOUBLE_EQ(ds.train[0].features[1], -0.25);
}

TEST(IsoletTest, ErrorsNameTheLine) {
  TempDir dir;
  WriteText(dir.File("train"), "0.5,0.1,1\n0.2,oops,2\n");
  WriteText(dir.File("test"), "0,0,1\n");
  std::string msg = ErrorText(
      [&] { LoadIsolet(dir.File("train"), dir.File("test")); });
  EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
  WriteText(dir.File("train"), "0.5,0.1,1\n0.2,0.3,2\n");
  WriteText(dir.File("test"), "0,0,1\n0,0,7\n");
  msg = ErrorText([&] { LoadIsolet(dir.File("train"), dir.File("test")); });
  EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("does not occur in train"), std::string::npos) << msg;
}

TEST(UciHarTest, StandardizedTrainFeaturesHaveZeroMeanUnitVariance) {
  TempDir dir;
  std::ostringstream x, y;
  for (int i = 0; i < 50; ++i) {
    x << (i * 0.37) << "  " << std::sin(i) * 4 + 2 << " 5.0\n";
    y << (i % 6) + 1 << "\n";
  }
  WriteText(dir.File("xtr"), x.str());
  WriteText(dir.File("ytr"), y.str());
  WriteText(dir.File("xte"), "1.0 2.0 5.0\n");
  WriteText(dir.File("yte"), "3\n");
  const Dataset ds = LoadUciHar(
      {dir.File("xtr"), dir.File("ytr"), dir.File("xte"), dir.File("yte")});
  EXPECT_EQ(ds.class_count, 6);
  EXPECT_EQ(ds.feature_dim, 3);
  for (int f = 0; f < 2; ++f) {
    double mean = 0, var = 0;
    for (const auto& s : ds.train) mean += s.features[f];
    mean /= ds.train.size();
    for (const auto& s : ds.train) var += std::pow(s.features[f] - mean, 2);
    var /= ds.train.size();
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(var, 1.0, 1e-9);
  }
  for (const auto& s : ds.train) EXPECT_EQ(s.features[2], 0.0);
  EXPECT_EQ(ds.test[0].label, 2);
}

TEST(SyntheticTest, ExactCountAndBalancedLabels) {
  SyntheticSpec spec;
  spec.train_samples = 100;
  spec.feature_dim = 16;
  spec.class_count = 4;
  spec.seed = 3;
  const Dataset ds = MakeSynthetic(spec);
  ASSERT_EQ(ds.train.size(), 100u);
  std::vector<int> counts(4, 0);
  for (const auto& s : ds.train) {
    ASSERT_EQ(s.features.size(), 16);
    ++counts[s.label];
  }
  EXPECT_EQ(counts, (std::vector<int>{25, 25, 25, 25}));
  const Dataset again = MakeSynthetic(spec);
  EXPECT_EQ(again.train[17].features, ds.train[17].features);
}

TEST(LoadTest, DispatchAndConfigErrors) {
  EXPECT_EQ(Load("synthetic", {}).name, "synthetic");
  EXPECT_THROW(Load("cifar", {}), ConfigError);
  EXPECT_THROW(Load("mnist", {{"train_images", "x"}}), ConfigError);
  EXPECT_THROW(Load("isolet", {{"train", "/nonexistent"}, {"test", "/x"}}),
               LoadError);
}

TEST(TruncateTest, KeepsPrefixes) {
  Dataset ds = Load("synthetic", {});
  Truncate(ds, 10, 0);
  EXPECT_EQ(ds.train.size(), 10u);
  EXPECT_EQ(ds.test.size(), 100u);
}

Dataset LabeledPool(int per_class, int classes) {
  SyntheticSpec spec;
  spec.train_samples = per_class * classes;
  spec.class_count = classes;
  spec.feature_dim = 2;
  return MakeSynthetic(spec);
}

void ExpectDisjoint(const PartitionPlan& plan) {
  std::set<int> seen;
  std::size_t total = 0;
  for (const auto& a : plan.assignments) {
    total += a.size();
    seen.insert(a.begin(), a.end());
  }
  EXPECT_EQ(seen.size(), total);
}

TEST(PartitionTest, IidBlocksAreDisjointWithExactSize) {
  const Dataset ds = LabeledPool(200, 10);
  const PartitionPlan plan = Partition(ds, PartitionMode::kIid, 10, 100, 4);
  ASSERT_EQ(plan.assignments.size(), 10u);
  std::set<int> all;
  for (const auto& a : plan.assignments) {
    EXPECT_EQ(a.size(), 100u);
    all.insert(a.begin(), a.end());
  }
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_EQ(plan.samples_per_client, 100);
}

TEST(PartitionTest, IidWholeSplitGivesRemainderToLastClient) {
  const Dataset ds = LabeledPool(10, 4);  // 40 samples
  const PartitionPlan plan = Partition(ds, PartitionMode::kIid, 3, 0, 1);
  EXPECT_EQ(plan.samples_per_client, 14);
  EXPECT_EQ(plan.assignments[0].size(), 14u);
  EXPECT_EQ(plan.assignments[1].size(), 14u);
  EXPECT_EQ(plan.assignments[2].size(), 12u);
  ExpectDisjoint(plan);
}

TEST(PartitionTest, IidTooManySamplesIsPartitionError) {
  const Dataset ds = LabeledPool(10, 4);
  EXPECT_THROW(Partition(ds, PartitionMode::kIid, 5, 9, 1), PartitionError);
}

TEST(PartitionTest, SeededPlansAreReproducible) {
  const Dataset ds = LabeledPool(50, 10);
  for (PartitionMode mode : {PartitionMode::kIid, PartitionMode::kNonIid}) {
    const auto a = Partition(ds, mode, 5, 40, 9);
    const auto b = Partition(ds, mode, 5, 40, 9);
    const auto c = Partition(ds, mode, 5, 40, 10);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_NE(a.assignments, c.assignments);
  }
}

std::set<int> LabelSet(const Dataset& ds, const std::vector<int>& idx) {
  std::set<int> labels;
  for (int i : idx) labels.insert(ds.train[i].label);
  return labels;
}

TEST(PartitionTest, NonIidFiveClientsHoldConsecutivePairs) {
  const Dataset ds = LabeledPool(60, 10);
  const PartitionPlan plan = Partition(ds, PartitionMode::kNonIid, 5, 50, 2);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(LabelSet(ds, plan.assignments[k]),
              (std::set<int>{2 * k, 2 * k + 1}));
    EXPECT_EQ(plan.assignments[k].size(), 50u);
  }
  ExpectDisjoint(plan);
}

TEST(PartitionTest, NonIidTenClientsRepeatPairsWithoutReuse) {
  const Dataset ds = LabeledPool(60, 10);
  const PartitionPlan plan = Partition(ds, PartitionMode::kNonIid, 10, 50, 2);
  for (int k = 0; k < 10; ++k) {
    const int g = k % 5;
    EXPECT_EQ(LabelSet(ds, plan.assignments[k]),
              (std::set<int>{2 * g, 2 * g + 1}));
  }
  ExpectDisjoint(plan);
}

TEST(PartitionTest, NonIidOddClassCountEndsWithSingleton) {
  EXPECT_EQ(ClassGroups(5),
            (std::vector<std::vector<int>>{{0, 1}, {2, 3}, {4}}));
  const Dataset ds = LabeledPool(20, 5);
  const PartitionPlan plan = Partition(ds, PartitionMode::kNonIid, 3, 10, 1);
  EXPECT_EQ(LabelSet(ds, plan.assignments[2]), (std::set<int>{4}));
}

TEST(PartitionTest, NonIidShortageNamesTheGroup) {
  const Dataset ds = LabeledPool(10, 4);  // 20 samples per pair
  try {
    Partition(ds, PartitionMode::kNonIid, 4, 15, 1);
    FAIL() << "expected PartitionError";
  } catch (const PartitionError& e) {
    EXPECT_NE(std::string(e.what()).find("{0,1}"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(Partition(ds, PartitionMode::kNonIid, 2, 0, 1), ConfigError);
}

TEST(PartitionTest, CsvListsClientAndSampleIndex) {
  const Dataset ds = LabeledPool(2, 2);
  const PartitionPlan plan = Partition(ds, PartitionMode::kIid, 2, 2, 1);
  std::ostringstream out;
  plan.WriteCsv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "client,sample_index");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line[0], rows <= 2 ? '1' : '2');
  }
  EXPECT_EQ(rows, 4);
}

TEST(PartitionModeTest, ParsesNames) {
  EXPECT_EQ(ParsePartitionMode("iid"), PartitionMode::kIid);
  EXPECT_EQ(ParsePartitionMode("non_iid"), PartitionMode::kNonIid);
  EXPECT_STREQ(ToString(PartitionMode::kNonIid), "non_iid");
  EXPECT_THROW(ParsePartitionMode("dirichlet"), ConfigError);
}

}  // namespace
}  // namespace hdring
