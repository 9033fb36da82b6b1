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

#include "hdring/dp_accountant.h"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "hdring/errors.h"
#include "hdring/seeding.h"

namespace hdring {
namespace {

double LogBase(const PrivacyParams& params) {
  return std::log(1.25 * params.samples_per_client / params.delta0);
}

bool WithinRelative(double got, double want, double rel_tol) {
  return std::abs(got - want) <= rel_tol * std::abs(want);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void PrivacyParams::Validate() const {
  if (!(epsilon > 0.0)) {
    throw ConfigError(fmt::format("epsilon must be > 0, got {}", epsilon));
  }
  if (!(delta0 > 0.0 && delta0 < 1.0)) {
    throw ConfigError(fmt::format("delta0 must lie in (0, 1), got {}", delta0));
  }
  if (dimension < 1 || samples_per_client < 1 || clients < 1 || rounds < 1) {
    throw ConfigError(fmt::format(
        "D, N, K, R must all be >= 1, got D={} N={} K={} R={}", dimension,
        samples_per_client, clients, rounds));
  }
}

bool PrivacyParams::noise_enabled() const { return std::isfinite(epsilon); }

double PrivacyParams::variance_scale() const {
  if (!noise_enabled()) return 0.0;
  return 2.0 * dimension / (epsilon * epsilon);
}

std::int64_t PrivacyParams::GlobalStep(int round, int client) const {
  if (round < 1 || round > rounds || client < 1 || client > clients) {
    throw ConfigError(fmt::format(
        "visit (r={}, k={}) outside schedule R={} K={}", round, client, rounds,
        clients));
  }
  return static_cast<std::int64_t>(clients) * (round - 1) + client;
}

namespace internal {

double RequiredFromStep(double scale, double log_base, std::int64_t step) {
  return scale * (log_base + std::log(static_cast<double>(step)));
}

double IncrementalFromStep(double scale, double log_base, std::int64_t step) {
  if (step == 1) return scale * log_base;
  // ln(m / (m - 1)) = log1p(1 / (m - 1)), accurate for large m.
  return scale * std::log1p(1.0 / static_cast<double>(step - 1));
}

double BlackboxFromStep(double scale, double log_base, std::int64_t step) {
  const double m = static_cast<double>(step);
  return scale * (m * log_base + std::lgamma(m + 1.0));
}

}  // namespace internal

double RequiredVariance(const PrivacyParams& params, int round, int client) {
  params.Validate();
  return internal::RequiredFromStep(params.variance_scale(), LogBase(params),
                                    params.GlobalStep(round, client));
}

double IncrementalVariance(const PrivacyParams& params, int round,
                           int client) {
  params.Validate();
  return internal::IncrementalFromStep(params.variance_scale(),
                                       LogBase(params),
                                       params.GlobalStep(round, client));
}

double BlackboxCumulativeVariance(const PrivacyParams& params, int round,
                                  int client) {
  params.Validate();
  return internal::BlackboxFromStep(params.variance_scale(), LogBase(params),
                                    params.GlobalStep(round, client));
}

double EffectiveDelta(const PrivacyParams& params, int round, int client) {
  params.Validate();
  const std::int64_t step = params.GlobalStep(round, client);
  return params.delta0 /
         (static_cast<double>(step) * params.samples_per_client);
}

std::mt19937_64 StepStream(std::uint64_t seed, int round, int client) {
  return MakeStream(seed, {0x6e6f697365ULL, static_cast<std::uint64_t>(round),
                           static_cast<std::uint64_t>(client)});
}

RowMatrix DrawNoise(double variance, int dimension, int class_count,
                    std::mt19937_64& stream) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw InvariantError(
        fmt::format("noise variance must be finite and >= 0, got {}",
                    variance));
  }
  if (dimension < 1 || class_count < 1) {
    throw ConfigError(fmt::format("noise shape S={} D={} is empty",
                                  class_count, dimension));
  }
  RowMatrix noise = RowMatrix::Zero(class_count, dimension);
  if (variance == 0.0) return noise;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  for (int s = 0; s < class_count; ++s) {
    for (int d = 0; d < dimension; ++d) noise(s, d) = normal(stream);
  }
  return noise;
}

void NoiseLedger::Record(int round, int client, double added_variance,
                         const PrivacyParams& params) {
  int want_round = 1;
  int want_client = 1;
  if (!entries_.empty()) {
    const LedgerEntry& last = entries_.back();
    want_round = last.client == params.clients ? last.round + 1 : last.round;
    want_client = last.client == params.clients ? 1 : last.client + 1;
  }
  if (round != want_round || client != want_client) {
    throw ProtocolError(fmt::format(
        "ledger append (r={}, k={}) out of ring order; expected (r={}, k={})",
        round, client, want_round, want_client));
  }
  if (round > params.rounds) {
    throw ProtocolError(fmt::format(
        "ledger append (r={}, k={}) past the final round R={}", round, client,
        params.rounds));
  }
  if (!(added_variance >= 0.0)) {
    throw InvariantError(fmt::format(
        "negative added variance {} at (r={}, k={})", added_variance, round,
        client));
  }
  LedgerEntry entry;
  entry.round = round;
  entry.client = client;
  entry.added_variance = added_variance;
  entry.cumulative_variance = cumulative_variance() + added_variance;
  entry.required_variance = RequiredVariance(params, round, client);
  entry.effective_delta = EffectiveDelta(params, round, client);
  entries_.push_back(entry);
}

double NoiseLedger::cumulative_variance() const {
  return entries_.empty() ? 0.0 : entries_.back().cumulative_variance;
}

std::vector<std::string> NoiseLedger::Verify(const PrivacyParams& params,
                                             double rel_tol) const {
  std::vector<std::string> problems;
  int round = 1;
  int client = 1;
  double previous = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const LedgerEntry& e = entries_[i];
    if (e.round != round || e.client != client) {
      problems.push_back(fmt::format(
          "entry {}: visit (r={}, k={}) expected (r={}, k={})", i, e.round,
          e.client, round, client));
      break;
    }
    if (round > params.rounds) {
      problems.push_back(
          fmt::format("entry {}: round {} exceeds R={}", i, round,
                      params.rounds));
      break;
    }
    if (!(e.added_variance >= 0.0)) {
      problems.push_back(
          fmt::format("entry {}: negative added variance", i));
    }
    const double chained = previous + e.added_variance;
    if (!WithinRelative(e.cumulative_variance, chained, rel_tol)) {
      problems.push_back(fmt::format(
          "entry {}: cumulative {} != previous {} + added {}", i,
          FormatReal(e.cumulative_variance), FormatReal(previous),
          FormatReal(e.added_variance)));
    }
    const double required = RequiredVariance(params, round, client);
    if (!WithinRelative(e.required_variance, required, rel_tol)) {
      problems.push_back(fmt::format(
          "entry {}: recorded required {} != closed form {}", i,
          FormatReal(e.required_variance), FormatReal(required)));
    }
    if (!WithinRelative(e.cumulative_variance, required, rel_tol)) {
      problems.push_back(fmt::format(
          "entry {}: cumulative {} differs from required {}", i,
          FormatReal(e.cumulative_variance), FormatReal(required)));
    }
    const double delta = EffectiveDelta(params, round, client);
    if (!WithinRelative(e.effective_delta, delta, rel_tol)) {
      problems.push_back(fmt::format(
          "entry {}: effective delta {} != delta0/(mN) = {}", i,
          FormatReal(e.effective_delta), FormatReal(delta)));
    }
    previous = e.cumulative_variance;
    if (++client > params.clients) {
      client = 1;
      ++round;
    }
  }
  return problems;
}

void NoiseLedger::WriteCsv(std::ostream& out) const {
  out << kLedgerHeader << '\n';
  for (const LedgerEntry& e : entries_) {
    out << e.round << ',' << e.client << ',' << FormatReal(e.added_variance)
        << ',' << FormatReal(e.cumulative_variance) << ','
        << FormatReal(e.required_variance) << ','
        << FormatReal(e.effective_delta) << '\n';
  }
}

NoiseLedger NoiseLedger::ReadCsv(std::istream& in) {
  NoiseLedger ledger;
  std::string line;
  if (!std::getline(in, line) || line != kLedgerHeader) {
    throw LoadError("ledger: missing or unexpected header line");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 6) {
      throw LoadError(fmt::format("ledger line {}: expected 6 fields, got {}",
                                  line_no, f.size()));
    }
    LedgerEntry e;
    try {
      std::size_t used = 0;
      auto whole_int = [&used](const std::string& s) {
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      auto whole_real = [&used](const std::string& s) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      e.round = whole_int(f[0]);
      e.client = whole_int(f[1]);
      e.added_variance = whole_real(f[2]);
      e.cumulative_variance = whole_real(f[3]);
      e.required_variance = whole_real(f[4]);
      e.effective_delta = whole_real(f[5]);
    } catch (const std::exception&) {
      throw LoadError(
          fmt::format("ledger line {}: non-numeric field in '{}'", line_no,
                      line));
    }
    ledger.entries_.push_back(e);
  }
  return ledger;
}

std::string FormatReal(double value) { return fmt::format("{:.17g}", value); }

}  // namespace hdring
