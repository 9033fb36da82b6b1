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

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "hdring/errors.h"

namespace hdring {
namespace {

constexpr char kModelMagic[] = "hdring-model 1";
constexpr double kTelescopeTolerance = 1e-9;

void CheckClients(const std::vector<Client>& clients,
                  const PrivacyParams& params, const EncoderBasis& basis,
                  int class_count) {
  if (static_cast<int>(clients.size()) != params.clients) {
    throw ConfigError(fmt::format("expected K={} clients, got {}",
                                  params.clients, clients.size()));
  }
  if (basis.dimension() != params.dimension) {
    throw ConfigError(fmt::format(
        "basis dimension D={} differs from privacy parameters D={}",
        basis.dimension(), params.dimension));
  }
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const Client& c = clients[i];
    const int k = static_cast<int>(i) + 1;
    if (c.index != k) {
      throw ProtocolError(fmt::format(
          "client at ring position {} carries index {}", k, c.index));
    }
    if (c.data.empty()) {
      throw DataError(
          fmt::format("client {} has no samples (visit r=1, k={})", k, k));
    }
    for (std::size_t j = 0; j < c.data.size(); ++j) {
      const FeatureVector& s = c.data[j];
      if (s.label < 0 || s.label >= class_count) {
        throw DataError(fmt::format(
            "client {} sample {} has label {} outside [0, {}) (visit r=1, "
            "k={})",
            k, j, s.label, class_count, k));
      }
      if (s.features.size() != basis.feature_dim()) {
        throw ConfigError(fmt::format(
            "client {} sample {}: expected F={}, got {} (visit r=1, k={})", k,
            j, basis.feature_dim(), s.features.size(), k));
      }
    }
  }
}

std::string ExpectLine(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw LoadError(fmt::format("model file truncated before {}", what));
  }
  return line;
}

}  // namespace

ModelState RunFederation(const std::vector<Client>& clients,
                         const PrivacyParams& params,
                         const EncoderBasis& basis, int class_count,
                         const FederationOptions& options) {
  params.Validate();
  if (options.retrain_passes < 1) {
    throw ConfigError(fmt::format("retrain_passes must be >= 1, got {}",
                                  options.retrain_passes));
  }
  CheckClients(clients, params, basis, class_count);

  std::vector<EncodedSet> encoded;
  encoded.reserve(clients.size());
  for (const Client& c : clients) encoded.push_back(EncodeAll(c.data, basis));

  ModelState state;
  state.prototypes = ClassPrototypes(class_count, params.dimension);
  state.non_private = !params.noise_enabled();

  for (int r = 1; r <= params.rounds; ++r) {
    for (int k = 1; k <= params.clients; ++k) {
      const EncodedSet& local = encoded[k - 1];
      if (r == 1) {
        AccumulateInto(state.prototypes, local);
      } else {
        for (int pass = 0; pass < options.retrain_passes; ++pass) {
          RetrainInPlace(state.prototypes, local);
        }
      }

      const double added = IncrementalVariance(params, r, k);
      if (added > 0.0) {
        std::mt19937_64 stream = StepStream(options.noise_seed, r, k);
        state.prototypes.vectors() +=
            DrawNoise(added, params.dimension, class_count, stream);
      }
      state.ledger.Record(r, k, added, params);
      const LedgerEntry& entry = state.ledger.entries().back();
      if (std::abs(entry.cumulative_variance - entry.required_variance) >
          kTelescopeTolerance * entry.required_variance) {
        throw InvariantError(fmt::format(
            "cumulative variance {} drifted from required {} at (r={}, k={})",
            FormatReal(entry.cumulative_variance),
            FormatReal(entry.required_variance), r, k));
      }
      state.round = r;
      state.client = k;
    }
    if (options.on_round_complete) options.on_round_complete(state);
  }
  return state;
}

Evaluation Evaluate(const ClassPrototypes& model, const EncodedSet& test) {
  if (test.size() == 0) throw ConfigError("test set must be non-empty");
  const int s = model.class_count();
  Evaluation out;
  out.confusion.assign(s, std::vector<int>(s, 0));
  int correct = 0;
  for (int i = 0; i < test.size(); ++i) {
    const int truth = test.labels[i];
    if (truth < 0 || truth >= s) {
      throw DataError(fmt::format("test sample {} has label {} outside [0, {})",
                                  i, truth, s));
    }
    const int guess = Predict(test.vectors.row(i).transpose(), model).label;
    ++out.confusion[truth][guess];
    if (guess == truth) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / test.size();
  out.per_class_accuracy.assign(s, 0.0);
  for (int c = 0; c < s; ++c) {
    int total = 0;
    for (int v : out.confusion[c]) total += v;
    if (total > 0) {
      out.per_class_accuracy[c] =
          static_cast<double>(out.confusion[c][c]) / total;
    }
  }
  return out;
}

Evaluation Evaluate(const ClassPrototypes& model, const SampleSet& test,
                    const EncoderBasis& basis) {
  return Evaluate(model, EncodeAll(test, basis));
}

Evaluation Evaluate(const ModelState& model, const SampleSet& test,
                    const EncoderBasis& basis) {
  return Evaluate(model.prototypes, test, basis);
}

void ModelState::Write(std::ostream& out) const {
  out << kModelMagic << '\n';
  out << "non_private " << (non_private ? 1 : 0) << '\n';
  out << "position " << round << ' ' << client << '\n';
  const RowMatrix& c = prototypes.vectors();
  out << "prototypes " << c.rows() << ' ' << c.cols() << '\n';
  for (Eigen::Index s = 0; s < c.rows(); ++s) {
    for (Eigen::Index d = 0; d < c.cols(); ++d) {
      if (d > 0) out << ' ';
      out << FormatReal(c(s, d));
    }
    out << '\n';
  }
  out << "ledger " << ledger.size() << '\n';
  ledger.WriteCsv(out);
}

ModelState ModelState::Read(std::istream& in) {
  if (ExpectLine(in, "header") != kModelMagic) {
    throw LoadError("model file: bad magic line");
  }
  ModelState state;
  int flag = 0;
  std::string key;
  {
    std::istringstream line(ExpectLine(in, "non_private"));
    if (!(line >> key >> flag) || key != "non_private") {
      throw LoadError("model file: malformed non_private line");
    }
    state.non_private = flag != 0;
  }
  {
    std::istringstream line(ExpectLine(in, "position"));
    if (!(line >> key >> state.round >> state.client) || key != "position") {
      throw LoadError("model file: malformed position line");
    }
  }
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  {
    std::istringstream line(ExpectLine(in, "prototypes"));
    if (!(line >> key >> rows >> cols) || key != "prototypes" || rows < 1 ||
        cols < 1) {
      throw LoadError("model file: malformed prototypes line");
    }
  }
  RowMatrix c(rows, cols);
  for (Eigen::Index s = 0; s < rows; ++s) {
    std::istringstream line(ExpectLine(in, "prototype row"));
    std::string token;
    for (Eigen::Index d = 0; d < cols; ++d) {
      if (!(line >> token)) {
        throw LoadError(fmt::format("model file: prototype row {} is short", s));
      }
      try {
        c(s, d) = std::stod(token);
      } catch (const std::exception&) {
        throw LoadError(fmt::format(
            "model file: non-numeric value '{}' in prototype row {}", token,
            s));
      }
    }
  }
  state.prototypes = ClassPrototypes(std::move(c));
  std::size_t entries = 0;
  {
    std::istringstream line(ExpectLine(in, "ledger"));
    if (!(line >> key >> entries) || key != "ledger") {
      throw LoadError("model file: malformed ledger line");
    }
  }
  state.ledger = NoiseLedger::ReadCsv(in);
  if (state.ledger.size() != entries) {
    throw LoadError(fmt::format("model file: ledger declares {} entries, has {}",
                                entries, state.ledger.size()));
  }
  return state;
}

}  // namespace hdring
