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

// Experiment driver: YAML configs, single and replicated runs, parameter
// sweeps and the analytic noise schedule table.
//
// Files written by a run (into output_dir, or output_dir/seed_<s> when the
// config lists several seeds):
//   metrics.csv    round,mode,accuracy,cumulative_variance,required_variance,
//                  blackbox_variance,acc_class_0..acc_class_{S-1}
//                  (mode is "private" or "non_private")
//   timing.csv     round,wall_seconds (kept apart so metrics.csv is
//                  byte-reproducible)
//   ledger.csv     see NoiseLedger::WriteCsv
//   model.txt      see ModelState::Write
//   manifest.yaml  the resolved config plus run facts

#ifndef HDRING_EXPERIMENTS_H_
#define HDRING_EXPERIMENTS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdring/datasets.h"
#include "hdring/dp_accountant.h"
#include "hdring/federation.h"

namespace hdring {

enum class EvalCadence { kPerRound, kFinal };

// Overrides output_dir when set.
inline constexpr char kOutputDirEnv[] = "HDRING_OUTPUT_DIR";

struct ExperimentConfig {
  std::string dataset = "synthetic";
  std::map<std::string, std::string> paths;
  std::string normalization;
  int train_limit = 0;
  int test_limit = 0;
  SyntheticSpec synthetic;

  PartitionMode partition = PartitionMode::kIid;
  int clients = 2;
  int samples_per_client = 0;  // 0: split the whole train set
  int rounds = 1;
  int dimension = 1000;
  double epsilon = 1.0;
  double delta0 = 1e-3;
  bool noise = true;
  int retrain_passes = 1;
  EvalCadence evaluation = EvalCadence::kPerRound;
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "hdring-out";

  // Parses YAML text. Unknown keys and malformed values throw ConfigError.
  // Relative paths are resolved against `base_dir` when it is non-empty.
  static ExperimentConfig Parse(const std::string& yaml_text,
                                const std::string& base_dir = "");
  // Reads a file, resolves paths against its directory and applies the
  // output-directory environment override.
  static ExperimentConfig Load(const std::string& path);

  void Validate() const;
  std::string ToYaml() const;

  // Privacy parameters for the resolved per-client sample count. Epsilon is
  // +infinity when noise is off.
  PrivacyParams Privacy(int samples_per_client) const;
};

// Sub-seeds of a replicate's master seed.
struct RunSeeds {
  std::uint64_t basis;
  std::uint64_t partition;
  std::uint64_t noise;
};
RunSeeds DeriveRunSeeds(std::uint64_t master_seed);

struct MetricsRecord {
  int round = 0;
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  double cumulative_variance = 0.0;
  double required_variance = 0.0;
  double blackbox_variance = 0.0;
  double wall_seconds = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  PartitionPlan plan;
  PrivacyParams privacy;
  std::vector<MetricsRecord> metrics;
  ModelState model;

  double final_accuracy() const;
};

// Everything short of disk I/O: partition, encode, federate, evaluate.
RunResult RunOnce(const ExperimentConfig& cfg, const Dataset& data,
                  std::uint64_t seed);

Dataset LoadDataset(const ExperimentConfig& cfg);

void WriteMetricsCsv(const std::vector<MetricsRecord>& metrics, int class_count,
                     std::ostream& out);
void WriteTimingCsv(const std::vector<MetricsRecord>& metrics,
                    std::ostream& out);
// Writes metrics, timing, ledger, model and manifest files into `dir`.
void WriteRunOutputs(const std::string& dir, const ExperimentConfig& cfg,
                     const Dataset& data, const RunResult& result);

struct ReplicateSummary {
  std::vector<RunResult> runs;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;  // sample stddev; 0 for a single run
};

// Runs every seed in cfg.seeds. With `write_outputs`, files go to
// cfg.output_dir (single seed) or cfg.output_dir/seed_<s>, plus summary.csv
// for several seeds.
ReplicateSummary RunExperiment(const ExperimentConfig& cfg, const Dataset& data,
                               bool write_outputs = true);
ReplicateSummary RunExperiment(const ExperimentConfig& cfg);

// Axes accepted by sweeps.
const std::vector<std::string>& SweepAxes();

// Returns a copy of `cfg` with `axis` set to `value` (text form). Replicate
// seeds are re-derived from (seed, axis, value) so values share no RNG state.
ExperimentConfig ApplySweepValue(const ExperimentConfig& cfg,
                                 const std::string& axis,
                                 const std::string& value);

struct SweepRow {
  std::string value;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
  double final_cumulative_variance = 0.0;
  ReplicateSummary replicates;
};

// One bundle per value under output_dir/<axis>_<value>, plus
// output_dir/sweep_<axis>.csv.
std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const std::string& axis,
                               const std::vector<std::string>& values,
                               const Dataset& data, bool write_outputs = true);
std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const std::string& axis,
                               const std::vector<std::string>& values);
void WriteSweepCsv(const std::string& axis, const std::vector<SweepRow>& rows,
                   std::ostream& out);

struct NoiseRow {
  int round = 0;
  int client = 0;
  std::int64_t step = 0;
  double incremental = 0.0;
  double cumulative = 0.0;  // running sum of incremental
  double required = 0.0;
  double blackbox = 0.0;
  double gap = 0.0;  // blackbox - required
};

// Purely analytic schedule for all R*K visits.
std::vector<NoiseRow> NoiseComparison(const PrivacyParams& params);
void WriteNoiseTableCsv(const std::vector<NoiseRow>& rows, std::ostream& out);

// Cross-checks a run ledger against the analytic table: every entry's added
// variance must match the incremental schedule and the ledger invariants
// must hold. Returns the list of problems (empty when consistent).
std::vector<std::string> CrossCheckLedger(const NoiseLedger& ledger,
                                          const PrivacyParams& params,
                                          double rel_tol = 1e-9);

// Resolves N without training: the configured value, or the IID auto split
// of the (possibly truncated) train set.
int ResolveSamplesPerClient(const ExperimentConfig& cfg);

}  // namespace hdring

#endif  // HDRING_EXPERIMENTS_H_
