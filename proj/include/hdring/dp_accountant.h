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

// Gaussian-mechanism noise accounting for a ring of K clients visited for R
// rounds. Visit (r, k) is global step m = K(r-1) + k. With sensitivity sqrt(D)
// and delta = delta0 / (m N), the variance needed to protect everything
// aggregated up to step m is
//
//   required(m) = (2D / eps^2) * ln(1.25 m N / delta0).
//
// Because the model already carries required(m-1), a client only adds the
// difference, which telescopes:
//
//   incremental(1) = (2D / eps^2) * ln(1.25 N / delta0)
//   incremental(m) = (2D / eps^2) * ln(m / (m-1)),   m >= 2.
//
// An untracked ("black-box") ring re-adds required(i) at every step i <= m,
// for a cumulative (2D / eps^2) * [m ln(1.25 N / delta0) + lnGamma(m + 1)].

#ifndef HDRING_DP_ACCOUNTANT_H_
#define HDRING_DP_ACCOUNTANT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hdring/hd_core.h"

namespace hdring {

struct PrivacyParams {
  double epsilon = 1.0;  // +infinity disables noise (diagnostic mode only)
  double delta0 = 1e-3;
  int dimension = 1;           // D
  int samples_per_client = 1;  // N
  int clients = 1;             // K
  int rounds = 1;              // R

  // Throws ConfigError unless eps > 0, 0 < delta0 < 1 and D, N, K, R >= 1.
  void Validate() const;

  bool noise_enabled() const;
  // 2D / eps^2, or 0 when noise is disabled.
  double variance_scale() const;
  // Throws ConfigError unless 1 <= round <= R and 1 <= client <= K.
  std::int64_t GlobalStep(int round, int client) const;
};

double RequiredVariance(const PrivacyParams& params, int round, int client);
double IncrementalVariance(const PrivacyParams& params, int round, int client);
double BlackboxCumulativeVariance(const PrivacyParams& params, int round,
                                  int client);
// delta0 / (m N).
double EffectiveDelta(const PrivacyParams& params, int round, int client);

namespace internal {

// Unvalidated closed forms in terms of the variance scale 2D/eps^2, the log
// base ln(1.25 N / delta0) and the global step m. The public functions
// validate and forward here.
double RequiredFromStep(double scale, double log_base, std::int64_t step);
double IncrementalFromStep(double scale, double log_base, std::int64_t step);
double BlackboxFromStep(double scale, double log_base, std::int64_t step);

}  // namespace internal

// Independent generator for the injection at visit (round, client).
std::mt19937_64 StepStream(std::uint64_t seed, int round, int client);

// S x D matrix of i.i.d. N(0, variance) draws, row-major fill order.
// Negative or non-finite variance throws InvariantError.
RowMatrix DrawNoise(double variance, int dimension, int class_count,
                    std::mt19937_64& stream);

struct LedgerEntry {
  int round = 0;
  int client = 0;
  double added_variance = 0.0;
  double cumulative_variance = 0.0;
  double required_variance = 0.0;
  double effective_delta = 0.0;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Append-only record of every injection along the ring. The cumulative
// variance of the last entry is what the next client receives.
class NoiseLedger {
 public:
  // Appends visit (round, client). The visit must be (1, 1) on an empty
  // ledger and the ring successor of the last entry otherwise; anything else
  // throws ProtocolError.
  void Record(int round, int client, double added_variance,
              const PrivacyParams& params);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  // Variance carried by the model so far; 0 before the first visit.
  double cumulative_variance() const;

  // Human-readable descriptions of every broken invariant; empty when the
  // ledger is consistent with `params` (relative tolerance `rel_tol`).
  std::vector<std::string> Verify(const PrivacyParams& params,
                                  double rel_tol = 1e-9) const;

  // CSV with header
  //   round,client,added_variance,cumulative_variance,required_variance,
  //   effective_delta
  // and reals printed with 17 significant digits.
  void WriteCsv(std::ostream& out) const;
  static NoiseLedger ReadCsv(std::istream& in);

  friend bool operator==(const NoiseLedger&, const NoiseLedger&) = default;

 private:
  std::vector<LedgerEntry> entries_;
};

inline constexpr char kLedgerHeader[] =
    "round,client,added_variance,cumulative_variance,required_variance,"
    "effective_delta";

// Formats a real with 17 significant digits, the precision used by every
// file the library writes.
std::string FormatReal(double value);

}  // namespace hdring

#endif  // HDRING_DP_ACCOUNTANT_H_
