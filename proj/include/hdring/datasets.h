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

// Dataset ingestion and client partitioning.
//
// On-disk layouts:
//   MNIST    IDX files. Images: magic 0x00000803, count, rows, cols (all
//            big-endian uint32) then count*rows*cols pixel bytes. Labels:
//            magic 0x00000801, count, then count label bytes.
//   ISOLET   One sample per line, comma separated: 617 features already in
//            [-1, 1] followed by the class (1..26, a trailing '.' is
//            accepted). Separate train and test files.
//   UCI-HAR  Whitespace-delimited feature rows (X_*.txt) and a parallel file
//            with one integer label per line (y_*.txt), for train and test.
//
// Labels are remapped to [0, S) by the sorted set of train labels.

#ifndef HDRING_DATASETS_H_
#define HDRING_DATASETS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hdring/hd_core.h"

namespace hdring {

struct Dataset {
  std::string name;
  SampleSet train;
  SampleSet test;
  int feature_dim = 0;
  int class_count = 0;
  // Transformations applied, in order, e.g. "pixels/255".
  std::vector<std::string> transforms;
};

enum class MnistScaling {
  kUnitRange,  // pixels / 255
  kUnitL2,     // pixels / 255, then each sample scaled to unit L2 norm
};

struct MnistPaths {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

// Raw IDX readers; throw LoadError with the byte offset of the problem.
std::vector<std::vector<std::uint8_t>> ReadIdxImages(const std::string& path,
                                                     int* rows = nullptr,
                                                     int* cols = nullptr);
std::vector<std::uint8_t> ReadIdxLabels(const std::string& path);

Dataset LoadMnist(const MnistPaths& paths,
                  MnistScaling scaling = MnistScaling::kUnitL2);
Dataset LoadIsolet(const std::string& train_path, const std::string& test_path);

struct UciHarPaths {
  std::string train_features;
  std::string train_labels;
  std::string test_features;
  std::string test_labels;
};

// Features are z-scored with train-split mean and population standard
// deviation; constant features are only centred.
Dataset LoadUciHar(const UciHarPaths& paths);

struct SyntheticSpec {
  int train_samples = 200;
  int test_samples = 100;
  int feature_dim = 16;
  int class_count = 4;
  // Class centres are N(0, separation^2 / F) per coordinate, samples add
  // N(0, spread^2 / F), so norms are about `separation` and `spread`.
  double separation = 1.0;
  double spread = 0.5;
  std::uint64_t seed = 0;
};

// Gaussian blobs; sample i has label i mod S, so labels are balanced.
Dataset MakeSynthetic(const SyntheticSpec& spec);

// Name-based dispatch used by the experiment driver. `name` is one of
// mnist, isolet, ucihar, synthetic. Keys of `paths` depend on the dataset:
//   mnist:   train_images, train_labels, test_images, test_labels
//   isolet:  train, test
//   ucihar:  train_features, train_labels, test_features, test_labels
// `normalization` selects the MNIST scaling ("unit_l2", "unit_range"; empty
// means the default).
Dataset Load(const std::string& name,
             const std::map<std::string, std::string>& paths,
             const std::string& normalization = "",
             const SyntheticSpec& synthetic = {});

// Keeps the first `train_limit` / `test_limit` samples (0 keeps all).
void Truncate(Dataset& ds, int train_limit, int test_limit);

enum class PartitionMode { kIid, kNonIid };

struct PartitionPlan {
  PartitionMode mode = PartitionMode::kIid;
  // assignments[k] holds train indices of client k+1.
  std::vector<std::vector<int>> assignments;
  int samples_per_client = 0;
  std::uint64_t seed = 0;

  // CSV "client,sample_index", clients 1-based.
  void WriteCsv(std::ostream& out) const;
};

// Class groups for non-IID splits: {0,1}, {2,3}, ...; with an odd class
// count the last group is a singleton.
std::vector<std::vector<int>> ClassGroups(int class_count);

// IID: a seeded shuffle of the train split cut into K blocks of N. With
// samples_per_client == 0 the whole train split is used: N = ceil(n / K) and
// the last client holds the remainder.
// NonIID: client k draws N samples without replacement from the shuffled
// pool of class group (k-1) mod G. Throws PartitionError on shortage.
PartitionPlan Partition(const Dataset& ds, PartitionMode mode, int clients,
                        int samples_per_client, std::uint64_t seed);

const char* ToString(PartitionMode mode);
PartitionMode ParsePartitionMode(const std::string& text);

}  // namespace hdring

#endif  // HDRING_DATASETS_H_
