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


#include "hdring/federation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hdring/datasets.h"
#include "hdring/errors.h"

namespace hdring {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PrivacyParams Params(int k, int r, double eps, int d, int n) {
  PrivacyParams p;
  p.epsilon = eps;
  p.delta0 = 1e-3;
  p.dimension = d;
  p.samples_per_client = n;
  p.clients = k;
  p.rounds = r;
  return p;
}

Dataset Blobs(int n, int f, int s, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.train_samples = n;
  spec.test_samples = n;
  spec.feature_dim = f;
  spec.class_count = s;
  spec.seed = seed;
  return MakeSynthetic(spec);
}

std::vector<Client> Split(const SampleSet& data, int k) {
  std::vector<Client> clients(k);
  const int n = static_cast<int>(data.size());
  const int per = (n + k - 1) / k;
  for (int i = 0; i < k; ++i) {
    clients[i].index = i + 1;
    for (int j = i * per; j < std::min(n, (i + 1) * per); ++j) {
      clients[i].data.push_back(data[j]);
    }
  }
  return clients;
}

SampleSet Union(const std::vector<Client>& clients) {
  SampleSet all;
  for (const Client& c : clients)
    all.insert(all.end(), c.data.begin(), c.data.end());
  return all;
}

// Literal replay of the ring schedule with plain loops.
struct ReplayOracle {
  const EncoderBasis& basis;
  int classes;

  std::vector<double> Encode(const FeatureVector& s) const {
    std::vector<double> h(basis.dimension());
    for (int d = 0; d < basis.dimension(); ++d) {
      double dot = 0.0;
      for (int f = 0; f < basis.feature_dim(); ++f)
        dot += s.features[f] * basis.vectors()(d, f);
      h[d] = std::cos(dot);
    }
    return h;
  }

  static double Cosine(const std::vector<double>& a,
                       const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    return (aa == 0 || bb == 0) ? 0.0 : ab / (std::sqrt(aa) * std::sqrt(bb));
  }

  std::vector<std::vector<double>> Run(const std::vector<Client>& clients,
                                       const PrivacyParams& p,
                                       std::uint64_t noise_seed) const {
    const int dim = basis.dimension();
    std::vector<std::vector<double>> c(classes, std::vector<double>(dim, 0.0));
    for (int r = 1; r <= p.rounds; ++r) {
      for (int k = 1; k <= p.clients; ++k) {
        for (const FeatureVector& s : clients[k - 1].data) {
          const std::vector<double> h = Encode(s);
          if (r == 1) {
            for (int d = 0; d < dim; ++d) c[s.label][d] += h[d];
            continue;
          }
          int guess = 0;
          double best = -std::numeric_limits<double>::infinity();
          for (int cls = 0; cls < classes; ++cls) {
            const double score = Cosine(c[cls], h);
            if (score > best) best = score, guess = cls;
          }
          if (guess != s.label) {
            for (int d = 0; d < dim; ++d) {
              c[guess][d] -= h[d];
              c[s.label][d] += h[d];
            }
          }
        }
        const int m = p.clients * (r - 1) + k;
        const double scale = 2.0 * dim / (p.epsilon * p.epsilon);
        const double var =
            m == 1 ? scale * std::log(1.25 * p.samples_per_client / p.delta0)
                   : scale * std::log(static_cast<double>(m) / (m - 1));
        std::mt19937_64 stream = StepStream(noise_seed, r, k);
        const RowMatrix noise = DrawNoise(var, dim, classes, stream);
        for (int cls = 0; cls < classes; ++cls)
          for (int d = 0; d < dim; ++d) c[cls][d] += noise(cls, d);
      }
    }
    return c;
  }
};

TEST(RunFederationTest, SingleVisitIsPrototypesPlusOneNoiseDraw) {
  const Dataset ds = Blobs(30, 6, 3, 1);
  const EncoderBasis basis(1, 6, 128);
  const std::vector<Client> clients = Split(ds.train, 1);
  const PrivacyParams p = Params(1, 1, 2.0, 128, 30);
  FederationOptions options;
  options.noise_seed = 77;
  const ModelState state = RunFederation(clients, p, basis, 3, options);

  std::mt19937_64 stream = StepStream(77, 1, 1);
  const RowMatrix want = FormClassPrototypes(ds.train, basis, 3).vectors() +
                         DrawNoise(IncrementalVariance(p, 1, 1), 128, 3, stream);
  EXPECT_TRUE(state.prototypes.vectors().isApprox(want, 1e-12));
  ASSERT_EQ(state.ledger.size(), 1u);
  EXPECT_EQ(state.ledger.entries()[0].added_variance,
            IncrementalVariance(p, 1, 1));
  EXPECT_EQ(state.round, 1);
  EXPECT_EQ(state.client, 1);
  EXPECT_FALSE(state.non_private);
}

TEST(RunFederationTest, NoiseOffSingleRoundEqualsCentralTrainingBitForBit) {
  const Dataset ds = Blobs(103, 8, 4, 2);
  const EncoderBasis basis(2, 8, 256);
  for (int k : {1, 2, 5}) {
    const std::vector<Client> clients = Split(ds.train, k);
    const ModelState state =
        RunFederation(clients, Params(k, 1, kInf, 256, 21), basis, 4);
    EXPECT_TRUE(state.non_private);
    EXPECT_EQ(state.prototypes, FormClassPrototypes(Union(clients), basis, 4))
        << "K=" << k;
    for (const LedgerEntry& e : state.ledger.entries()) {
      EXPECT_EQ(e.added_variance, 0.0);
    }
  }
}

TEST(RunFederationTest, NoiseOffSingleRoundIgnoresClientOrder) {
  const Dataset ds = Blobs(60, 5, 3, 3);
  const EncoderBasis basis(3, 5, 128);
  std::vector<Client> clients = Split(ds.train, 3);
  const ModelState a =
      RunFederation(clients, Params(3, 1, kInf, 128, 20), basis, 3);
  std::swap(clients[0].data, clients[2].data);
  const ModelState b =
      RunFederation(clients, Params(3, 1, kInf, 128, 20), basis, 3);
  EXPECT_TRUE(a.prototypes.vectors().isApprox(b.prototypes.vectors(), 1e-13));
}

TEST(RunFederationTest, ThreeClientsTwoRoundsMatchLiteralReplay) {
  const Dataset ds = Blobs(40, 4, 3, 4);
  const EncoderBasis basis(4, 4, 64);
  const std::vector<Client> clients = Split(ds.train, 3);
  const PrivacyParams p = Params(3, 2, 20.0, 64, 14);
  FederationOptions options;
  options.noise_seed = 5;
  const ModelState state = RunFederation(clients, p, basis, 3, options);
  const auto want = ReplayOracle{basis, 3}.Run(clients, p, 5);
  for (int s = 0; s < 3; ++s)
    for (int d = 0; d < 64; ++d)
      EXPECT_NEAR(state.prototypes.vectors()(s, d), want[s][d], 1e-9);
  EXPECT_EQ(state.ledger.size(), 6u);
  EXPECT_TRUE(state.ledger.Verify(p).empty());
}

TEST(RunFederationTest, LedgerTracksRequiredAfterEveryVisit) {
  const Dataset ds = Blobs(120, 6, 4, 5);
  const EncoderBasis basis(5, 6, 100);
  const PrivacyParams p = Params(4, 5, 1.0, 100, 30);
  const ModelState state =
      RunFederation(Split(ds.train, 4), p, basis, 4, {9, 1, nullptr});
  ASSERT_EQ(state.ledger.size(), 20u);
  for (const LedgerEntry& e : state.ledger.entries()) {
    EXPECT_LE(std::fabs(e.cumulative_variance - e.required_variance),
              1e-9 * e.required_variance);
  }
  EXPECT_EQ(state.round, 5);
  EXPECT_EQ(state.client, 4);
}

TEST(RunFederationTest, CallbackFiresOncePerRound) {
  const Dataset ds = Blobs(40, 4, 2, 6);
  const EncoderBasis basis(6, 4, 32);
  std::vector<std::pair<int, int>> seen;
  FederationOptions options;
  options.on_round_complete = [&](const ModelState& s) {
    seen.emplace_back(s.round, s.client);
    EXPECT_EQ(s.ledger.size(), static_cast<std::size_t>(2 * s.round));
  };
  RunFederation(Split(ds.train, 2), Params(2, 3, 1.0, 32, 20), basis, 2,
                options);
  EXPECT_EQ(seen, (std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {3, 2}}));
}

TEST(RunFederationTest, DeterministicForFixedSeeds) {
  const Dataset ds = Blobs(80, 6, 4, 7);
  const EncoderBasis basis(7, 6, 200);
  const PrivacyParams p = Params(4, 3, 0.5, 200, 20);
  const auto clients = Split(ds.train, 4);
  const ModelState a = RunFederation(clients, p, basis, 4, {11, 2, nullptr});
  const ModelState b = RunFederation(clients, p, basis, 4, {11, 2, nullptr});
  EXPECT_EQ(a.prototypes, b.prototypes);
  EXPECT_EQ(a.ledger, b.ledger);
  const ModelState c = RunFederation(clients, p, basis, 4, {12, 2, nullptr});
  EXPECT_NE(a.prototypes, c.prototypes);
}

TEST(RunFederationTest, RejectsMalformedRings) {
  const Dataset ds = Blobs(20, 4, 2, 8);
  const EncoderBasis basis(8, 4, 16);
  auto clients = Split(ds.train, 2);
  const PrivacyParams p = Params(2, 1, 1.0, 16, 10);
  EXPECT_THROW(RunFederation(clients, Params(3, 1, 1.0, 16, 10), basis, 2),
               ConfigError);
  EXPECT_THROW(RunFederation(clients, Params(2, 1, 1.0, 32, 10), basis, 2),
               ConfigError);
  auto swapped = clients;
  swapped[1].index = 5;
  EXPECT_THROW(RunFederation(swapped, p, basis, 2), ProtocolError);
  auto empty = clients;
  empty[1].data.clear();
  try {
    RunFederation(empty, p, basis, 2);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("k=2"), std::string::npos) << e.what();
  }
  auto bad_label = clients;
  bad_label[0].data[0].label = 7;
  EXPECT_THROW(RunFederation(bad_label, p, basis, 2), DataError);
  EXPECT_THROW(RunFederation(clients, p, basis, 2, {0, 0, nullptr}),
               ConfigError);
}

TEST(EvaluateTest, NoiselessModelScoresPerfectlyOnItsSeparableTrainingData) {
  SampleSet toy;
  for (int i = 0; i < 20; ++i) {
    FeatureVector s;
    s.label = i % 2;
    s.features = Eigen::VectorXd::Zero(2);
    s.features[s.label] = 0.6 + 0.01 * i;
    toy.push_back(s);
  }
  const EncoderBasis basis(9, 2, 1000);
  Client only{1, toy};
  const ModelState state =
      RunFederation({only}, Params(1, 1, kInf, 1000, 20), basis, 2);
  const Evaluation eval = Evaluate(state, toy, basis);
  EXPECT_EQ(eval.accuracy, 1.0);
  EXPECT_EQ(eval.confusion[0][0], 10);
  EXPECT_EQ(eval.confusion[1][1], 10);
  EXPECT_EQ(eval.per_class_accuracy, (std::vector<double>{1.0, 1.0}));
}

TEST(EvaluateTest, SingleWrongSampleScoresZero) {
  RowMatrix c(2, 3);
  c << 1, 0, 0, 0, 1, 0;
  EncodedSet test;
  test.vectors = RowMatrix(1, 3);
  test.vectors << 0.9, 0.1, 0.0;
  test.labels = {1};
  const Evaluation eval = Evaluate(ClassPrototypes(c), test);
  EXPECT_EQ(eval.accuracy, 0.0);
  EXPECT_EQ(eval.confusion[1][0], 1);
}

TEST(EvaluateTest, PositiveScalingOfEncodingsKeepsAccuracy) {
  const Dataset ds = Blobs(60, 6, 3, 10);
  const EncoderBasis basis(10, 6, 300);
  const ClassPrototypes model = FormClassPrototypes(ds.train, basis, 3);
  EncodedSet test = EncodeAll(ds.test, basis);
  const Evaluation a = Evaluate(model, test);
  test.vectors *= 3.25;
  const Evaluation b = Evaluate(model, test);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.confusion, b.confusion);
}

TEST(EvaluateTest, EmptyTestSetIsConfigError) {
  EXPECT_THROW(Evaluate(ClassPrototypes(2, 4), EncodedSet{}), ConfigError);
}

TEST(ModelStateTest, TextRoundTripIsExact) {
  const Dataset ds = Blobs(40, 5, 3, 11);
  const EncoderBasis basis(11, 5, 50);
  const ModelState state = RunFederation(
      Split(ds.train, 2), Params(2, 2, 0.3, 50, 20), basis, 3, {3, 1, nullptr});
  std::stringstream buffer;
  state.Write(buffer);
  const ModelState back = ModelState::Read(buffer);
  EXPECT_EQ(back.prototypes, state.prototypes);
  EXPECT_EQ(back.ledger, state.ledger);
  EXPECT_EQ(back.round, 2);
  EXPECT_EQ(back.client, 2);
  EXPECT_EQ(back.non_private, state.non_private);
}

TEST(ModelStateTest, ReadRejectsCorruptFiles) {
  std::istringstream bad_magic("not-a-model\n");
  EXPECT_THROW(ModelState::Read(bad_magic), LoadError);
  std::istringstream truncated(
      "hdring-model 1\nnon_private 0\nposition 1 1\nprototypes 2 2\n1 2\n");
  EXPECT_THROW(ModelState::Read(truncated), LoadError);
}

}  // namespace
}  // namespace hdring
