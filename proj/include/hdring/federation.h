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

#ifndef HDRING_FEDERATION_H_
#define HDRING_FEDERATION_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "hdring/dp_accountant.h"
#include "hdring/hd_core.h"

namespace hdring {

// The model token passed around the ring: noisy prototypes plus the ledger
// that says how much noise they already carry.
struct ModelState {
  ClassPrototypes prototypes{1, 1};
  NoiseLedger ledger;
  int round = 0;   // position of the last visit; (0, 0) before any
  int client = 0;
  bool non_private = false;

  // Text format: a header, the position, the S x D prototype matrix and the
  // ledger CSV, all reals at 17 significant digits. Round-trips exactly.
  void Write(std::ostream& out) const;
  static ModelState Read(std::istream& in);
};

struct Client {
  int index = 1;  // k in [1, K]
  SampleSet data;
};

struct FederationOptions {
  // Seeds the per-visit noise streams, see StepStream().
  std::uint64_t noise_seed = 0;
  int retrain_passes = 1;
  // Called with the token after client K finishes each round.
  std::function<void(const ModelState&)> on_round_complete;
};

// Runs the ring schedule. Round 1: client 1 forms prototypes from its data,
// later clients add their encodings onto the received state. Rounds >= 2:
// each client retrains the received state on its data. Every visit then adds
// N(0, IncrementalVariance) to all S prototypes and records the injection.
//
// `clients` must hold K = params.clients entries with indices 1..K in order.
ModelState RunFederation(const std::vector<Client>& clients,
                         const PrivacyParams& params,
                         const EncoderBasis& basis, int class_count,
                         const FederationOptions& options = {});

struct Evaluation {
  double accuracy = 0.0;
  // confusion[truth][predicted]
  std::vector<std::vector<int>> confusion;
  // Recall per class; 0 for classes absent from the test set.
  std::vector<double> per_class_accuracy;
};

Evaluation Evaluate(const ClassPrototypes& model, const EncodedSet& test);
Evaluation Evaluate(const ClassPrototypes& model, const SampleSet& test,
                    const EncoderBasis& basis);
Evaluation Evaluate(const ModelState& model, const SampleSet& test,
                    const EncoderBasis& basis);

}  // namespace hdring

#endif  // HDRING_FEDERATION_H_
