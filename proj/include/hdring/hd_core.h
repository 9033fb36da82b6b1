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

// Hyperdimensional classifier: random-projection cosine encoding, class
// prototypes formed by summation, cosine-similarity inference and
// mistake-driven retraining.

#ifndef HDRING_HD_CORE_H_
#define HDRING_HD_CORE_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hdring {

using HyperVector = Eigen::VectorXd;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureVector {
  Eigen::VectorXd features;
  int label = 0;
};

using SampleSet = std::vector<FeatureVector>;

// D projection vectors of length F with i.i.d. N(0,1) entries. The basis is a
// pure function of (seed, F, D), so every client can rebuild it locally.
class EncoderBasis {
 public:
  EncoderBasis(std::uint64_t seed, int feature_dim, int dimension);

  std::uint64_t seed() const { return seed_; }
  int feature_dim() const { return static_cast<int>(vectors_.cols()); }
  int dimension() const { return static_cast<int>(vectors_.rows()); }

  // Row d holds B_d.
  const RowMatrix& vectors() const { return vectors_; }

 private:
  std::uint64_t seed_;
  RowMatrix vectors_;
};

// h_d = cos(<features, B_d>) for every d.
HyperVector Encode(const Eigen::VectorXd& features, const EncoderBasis& basis);
HyperVector Encode(const FeatureVector& sample, const EncoderBasis& basis);

// A batch of encoded samples, one hypervector per row.
struct EncodedSet {
  RowMatrix vectors;
  std::vector<int> labels;

  int size() const { return static_cast<int>(labels.size()); }
};

// Batch encoding through a single matrix product. Rows agree with Encode()
// up to floating-point summation order.
EncodedSet EncodeAll(const SampleSet& samples, const EncoderBasis& basis);

// S prototypes of length D; row s is C_s. All-zero rows are classes that have
// not been observed yet.
class ClassPrototypes {
 public:
  ClassPrototypes(int class_count, int dimension);
  explicit ClassPrototypes(RowMatrix vectors);

  int class_count() const { return static_cast<int>(vectors_.rows()); }
  int dimension() const { return static_cast<int>(vectors_.cols()); }

  const RowMatrix& vectors() const { return vectors_; }
  RowMatrix& vectors() { return vectors_; }

  friend bool operator==(const ClassPrototypes& a, const ClassPrototypes& b) {
    return a.vectors_.rows() == b.vectors_.rows() &&
           a.vectors_.cols() == b.vectors_.cols() && a.vectors_ == b.vectors_;
  }

 private:
  RowMatrix vectors_;
};

// Adds each encoded sample to the prototype of its label, in row order.
// Throws DataError naming the first sample whose label is out of range.
void AccumulateInto(ClassPrototypes& model, const EncodedSet& encoded);

ClassPrototypes FormClassPrototypes(const SampleSet& samples,
                                    const EncoderBasis& basis,
                                    int class_count);
ClassPrototypes FormClassPrototypes(const EncodedSet& encoded, int class_count);

struct Prediction {
  int label = 0;
  // Cosine similarity per class; 0 for an all-zero prototype or query.
  std::vector<double> scores;
};

// Argmax of cosine similarity, lowest index on ties.
Prediction Predict(const HyperVector& query, const ClassPrototypes& model);

// One ordered pass over `encoded`: on a misprediction of true class s as s',
// C_s' -= H and C_s += H. Predictions use the model as updated so far.
// Returns the number of mispredictions.
int RetrainInPlace(ClassPrototypes& model, const EncodedSet& encoded);

struct RetrainResult {
  ClassPrototypes model;
  int mispredictions = 0;
};

RetrainResult RetrainPass(ClassPrototypes model, const SampleSet& samples,
                          const EncoderBasis& basis);

}  // namespace hdring

#endif  // HDRING_HD_CORE_H_
