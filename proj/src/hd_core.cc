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

#include "hdring/hd_core.h"

#include <algorithm>
#include <random>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "hdring/errors.h"
#include "hdring/seeding.h"

namespace hdring {
namespace {

// Samples are encoded in blocks so the intermediate product stays small.
constexpr int kEncodeBlock = 512;

void CheckFeatureDim(const Eigen::VectorXd& features, const EncoderBasis& basis,
                     std::size_t index) {
  if (features.size() != basis.feature_dim()) {
    throw ConfigError(fmt::format(
        "feature dimensionality mismatch at sample {}: expected F={}, got {}",
        index, basis.feature_dim(), features.size()));
  }
}

void CheckLabel(int label, int class_count, std::size_t index) {
  if (label < 0 || label >= class_count) {
    throw DataError(fmt::format("sample {} has label {} outside [0, {})",
                                index, label, class_count));
  }
}

void CheckDimension(Eigen::Index got, const ClassPrototypes& model) {
  if (got != model.dimension()) {
    throw ConfigError(fmt::format(
        "hypervector dimensionality mismatch: expected D={}, got {}",
        model.dimension(), got));
  }
}

// Shared by Predict and the retraining loop so both make the same decision
// for the same state. Fills `scores` when non-null.
template <typename Query>
int ArgmaxCosine(const ClassPrototypes& model, const Query& query,
                 std::vector<double>* scores) {
  const RowMatrix& c = model.vectors();
  const Eigen::VectorXd dots = c * query.transpose();
  const double query_norm = query.norm();
  int best = 0;
  double best_score = 0.0;
  for (int s = 0; s < model.class_count(); ++s) {
    const double denom = c.row(s).norm() * query_norm;
    const double score = denom > 0.0 ? dots(s) / denom : 0.0;
    if (scores != nullptr) scores->push_back(score);
    if (s == 0 || score > best_score) {
      best = s;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

EncoderBasis::EncoderBasis(std::uint64_t seed, int feature_dim, int dimension)
    : seed_(seed) {
  if (feature_dim < 1 || dimension < 1) {
    throw ConfigError(fmt::format(
        "encoder basis needs F >= 1 and D >= 1, got F={} D={}", feature_dim,
        dimension));
  }
  std::mt19937_64 rng = MakeStream(seed, {0x62617369ULL});
  std::normal_distribution<double> normal(0.0, 1.0);
  vectors_.resize(dimension, feature_dim);
  for (int d = 0; d < dimension; ++d) {
    for (int f = 0; f < feature_dim; ++f) vectors_(d, f) = normal(rng);
  }
}

HyperVector Encode(const Eigen::VectorXd& features, const EncoderBasis& basis) {
  CheckFeatureDim(features, basis, 0);
  return (basis.vectors() * features).array().cos().matrix();
}

HyperVector Encode(const FeatureVector& sample, const EncoderBasis& basis) {
  return Encode(sample.features, basis);
}

EncodedSet EncodeAll(const SampleSet& samples, const EncoderBasis& basis) {
  const int n = static_cast<int>(samples.size());
  const int f = basis.feature_dim();
  EncodedSet out;
  out.vectors.resize(n, basis.dimension());
  out.labels.reserve(n);
  RowMatrix block;
  for (int start = 0; start < n; start += kEncodeBlock) {
    const int rows = std::min(kEncodeBlock, n - start);
    block.resize(rows, f);
    for (int i = 0; i < rows; ++i) {
      const FeatureVector& sample = samples[start + i];
      CheckFeatureDim(sample.features, basis, start + i);
      block.row(i) = sample.features.transpose();
    }
    out.vectors.middleRows(start, rows).noalias() =
        block * basis.vectors().transpose();
  }
  out.vectors = out.vectors.array().cos().matrix();
  for (const FeatureVector& sample : samples) out.labels.push_back(sample.label);
  return out;
}

ClassPrototypes::ClassPrototypes(int class_count, int dimension) {
  if (class_count < 1 || dimension < 1) {
    throw ConfigError(fmt::format(
        "prototypes need S >= 1 and D >= 1, got S={} D={}", class_count,
        dimension));
  }
  vectors_ = RowMatrix::Zero(class_count, dimension);
}

ClassPrototypes::ClassPrototypes(RowMatrix vectors)
    : vectors_(std::move(vectors)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) {
    throw ConfigError("prototype matrix must be non-empty");
  }
}

void AccumulateInto(ClassPrototypes& model, const EncodedSet& encoded) {
  CheckDimension(encoded.vectors.cols(), model);
  for (int i = 0; i < encoded.size(); ++i) {
    CheckLabel(encoded.labels[i], model.class_count(), i);
  }
  for (int i = 0; i < encoded.size(); ++i) {
    model.vectors().row(encoded.labels[i]) += encoded.vectors.row(i);
  }
}

ClassPrototypes FormClassPrototypes(const EncodedSet& encoded,
                                    int class_count) {
  ClassPrototypes model(class_count,
                        static_cast<int>(std::max<Eigen::Index>(
                            encoded.vectors.cols(), 1)));
  if (encoded.size() > 0) AccumulateInto(model, encoded);
  return model;
}

ClassPrototypes FormClassPrototypes(const SampleSet& samples,
                                    const EncoderBasis& basis,
                                    int class_count) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CheckLabel(samples[i].label, class_count, i);
  }
  ClassPrototypes model(class_count, basis.dimension());
  AccumulateInto(model, EncodeAll(samples, basis));
  return model;
}

Prediction Predict(const HyperVector& query, const ClassPrototypes& model) {
  CheckDimension(query.size(), model);
  Prediction out;
  out.scores.reserve(model.class_count());
  out.label = ArgmaxCosine(model, query.transpose(), &out.scores);
  return out;
}

int RetrainInPlace(ClassPrototypes& model, const EncodedSet& encoded) {
  CheckDimension(encoded.vectors.cols(), model);
  for (int i = 0; i < encoded.size(); ++i) {
    CheckLabel(encoded.labels[i], model.class_count(), i);
  }
  int mispredictions = 0;
  for (int i = 0; i < encoded.size(); ++i) {
    const auto h = encoded.vectors.row(i);
    const int truth = encoded.labels[i];
    const int guess = ArgmaxCosine(model, h, nullptr);
    if (guess != truth) {
      model.vectors().row(guess) -= h;
      model.vectors().row(truth) += h;
      ++mispredictions;
    }
  }
  return mispredictions;
}

RetrainResult RetrainPass(ClassPrototypes model, const SampleSet& samples,
                          const EncoderBasis& basis) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CheckLabel(samples[i].label, model.class_count(), i);
  }
  CheckDimension(basis.dimension(), model);
  const int mispredictions = RetrainInPlace(model, EncodeAll(samples, basis));
  return {std::move(model), mispredictions};
}

}  // namespace hdring
