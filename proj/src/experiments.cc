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

#include "hdring/experiments.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "hdring/errors.h"
#include "hdring/seeding.h"

namespace hdring {
namespace fs = std::filesystem;
namespace {

const std::set<std::string> kTopLevelKeys = {
    "dataset",   "paths",          "normalization", "train_limit",
    "test_limit", "synthetic",     "partition",     "clients",
    "samples_per_client", "rounds", "dimension",    "epsilon",
    "delta0",    "noise",          "retrain_passes", "evaluation",
    "seed",      "seeds",          "replicates",    "output_dir"};

const std::set<std::string> kSyntheticKeys = {
    "train_samples", "test_samples", "features", "classes",
    "separation",    "spread",       "seed"};

template <typename T>
T As(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("config key '{}' has an invalid value", key));
  }
}

void RejectUnknown(const YAML::Node& map, const std::set<std::string>& known,
                   const std::string& where) {
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!known.count(key)) {
      throw ConfigError(fmt::format("unknown config key '{}{}'", where, key));
    }
  }
}

EvalCadence ParseCadence(const std::string& text) {
  if (text == "per_round") return EvalCadence::kPerRound;
  if (text == "final") return EvalCadence::kFinal;
  throw ConfigError(
      fmt::format("evaluation must be per_round or final, got '{}'", text));
}

const char* ToString(EvalCadence cadence) {
  return cadence == EvalCadence::kPerRound ? "per_round" : "final";
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError(fmt::format("cannot write {}", path.string()));
  }
  out << contents;
}

double Mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double SampleStddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = Mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

bool WithinRelative(double got, double want, double rel_tol) {
  return std::abs(got - want) <= rel_tol * std::abs(want);
}

}  // namespace

ExperimentConfig ExperimentConfig::Parse(const std::string& yaml_text,
                                         const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
  }
  if (!root.IsMap()) throw ConfigError("config must be a YAML mapping");
  RejectUnknown(root, kTopLevelKeys, "");

  ExperimentConfig cfg;
  if (root["dataset"]) cfg.dataset = As<std::string>(root["dataset"], "dataset");
  if (root["paths"]) {
    if (!root["paths"].IsMap()) throw ConfigError("'paths' must be a mapping");
    for (const auto& kv : root["paths"]) {
      const std::string key = kv.first.as<std::string>();
      std::string value = As<std::string>(kv.second, "paths." + key);
      if (!base_dir.empty() && fs::path(value).is_relative()) {
        value = (fs::path(base_dir) / value).lexically_normal().string();
      }
      cfg.paths[key] = value;
    }
  }
  if (root["normalization"]) {
    cfg.normalization = As<std::string>(root["normalization"], "normalization");
  }
  if (root["train_limit"]) cfg.train_limit = As<int>(root["train_limit"], "train_limit");
  if (root["test_limit"]) cfg.test_limit = As<int>(root["test_limit"], "test_limit");
  if (const YAML::Node syn = root["synthetic"]) {
    if (!syn.IsMap()) throw ConfigError("'synthetic' must be a mapping");
    RejectUnknown(syn, kSyntheticKeys, "synthetic.");
    SyntheticSpec& s = cfg.synthetic;
    if (syn["train_samples"]) s.train_samples = As<int>(syn["train_samples"], "synthetic.train_samples");
    if (syn["test_samples"]) s.test_samples = As<int>(syn["test_samples"], "synthetic.test_samples");
    if (syn["features"]) s.feature_dim = As<int>(syn["features"], "synthetic.features");
    if (syn["classes"]) s.class_count = As<int>(syn["classes"], "synthetic.classes");
    if (syn["separation"]) s.separation = As<double>(syn["separation"], "synthetic.separation");
    if (syn["spread"]) s.spread = As<double>(syn["spread"], "synthetic.spread");
    if (syn["seed"]) s.seed = As<std::uint64_t>(syn["seed"], "synthetic.seed");
  }
  if (root["partition"]) {
    cfg.partition = ParsePartitionMode(As<std::string>(root["partition"], "partition"));
  }
  if (root["clients"]) cfg.clients = As<int>(root["clients"], "clients");
  if (root["samples_per_client"]) {
    cfg.samples_per_client = As<int>(root["samples_per_client"], "samples_per_client");
  }
  if (root["rounds"]) cfg.rounds = As<int>(root["rounds"], "rounds");
  if (root["dimension"]) cfg.dimension = As<int>(root["dimension"], "dimension");
  if (root["epsilon"]) cfg.epsilon = As<double>(root["epsilon"], "epsilon");
  if (root["delta0"]) cfg.delta0 = As<double>(root["delta0"], "delta0");
  if (root["noise"]) cfg.noise = As<bool>(root["noise"], "noise");
  if (root["retrain_passes"]) {
    cfg.retrain_passes = As<int>(root["retrain_passes"], "retrain_passes");
  }
  if (root["evaluation"]) {
    cfg.evaluation = ParseCadence(As<std::string>(root["evaluation"], "evaluation"));
  }
  if (root["seed"] && root["seeds"]) {
    throw ConfigError("give either 'seed' or 'seeds', not both");
  }
  if (root["seed"]) cfg.seeds = {As<std::uint64_t>(root["seed"], "seed")};
  if (root["seeds"]) {
    cfg.seeds = As<std::vector<std::uint64_t>>(root["seeds"], "seeds");
    if (cfg.seeds.empty()) throw ConfigError("'seeds' must not be empty");
  }
  if (root["replicates"]) {
    const int n = As<int>(root["replicates"], "replicates");
    if (n < 1) throw ConfigError("replicates must be >= 1");
    if (cfg.seeds.size() != 1) {
      throw ConfigError("'replicates' expands a single 'seed'");
    }
    const std::uint64_t first = cfg.seeds.front();
    cfg.seeds.clear();
    for (int i = 0; i < n; ++i) cfg.seeds.push_back(first + i);
  }
  if (root["output_dir"]) cfg.output_dir = As<std::string>(root["output_dir"], "output_dir");
  cfg.Validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig cfg =
      Parse(buffer.str(), fs::path(path).parent_path().string());
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir) {
    cfg.output_dir = dir;
  }
  return cfg;
}

void ExperimentConfig::Validate() const {
  if (clients < 1 || rounds < 1 || dimension < 1) {
    throw ConfigError(fmt::format(
        "clients, rounds and dimension must be >= 1 (got K={} R={} D={})",
        clients, rounds, dimension));
  }
  if (samples_per_client < 0) throw ConfigError("samples_per_client must be >= 0");
  if (partition == PartitionMode::kNonIid && samples_per_client == 0) {
    throw ConfigError("non_iid partitioning needs samples_per_client >= 1");
  }
  if (retrain_passes < 1) throw ConfigError("retrain_passes must be >= 1");
  if (train_limit < 0 || test_limit < 0) {
    throw ConfigError("train_limit and test_limit must be >= 0");
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  // Checks epsilon and delta0 with a placeholder N.
  Privacy(1).Validate();
}

PrivacyParams ExperimentConfig::Privacy(int n) const {
  PrivacyParams p;
  p.epsilon = noise ? epsilon : std::numeric_limits<double>::infinity();
  p.delta0 = delta0;
  p.dimension = dimension;
  p.samples_per_client = n;
  p.clients = clients;
  p.rounds = rounds;
  return p;
}

std::string ExperimentConfig::ToYaml() const {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "dataset" << YAML::Value << dataset;
  if (!paths.empty()) {
    out << YAML::Key << "paths" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : paths) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  }
  if (!normalization.empty()) {
    out << YAML::Key << "normalization" << YAML::Value << normalization;
  }
  out << YAML::Key << "train_limit" << YAML::Value << train_limit;
  out << YAML::Key << "test_limit" << YAML::Value << test_limit;
  if (dataset == "synthetic") {
    out << YAML::Key << "synthetic" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "train_samples" << YAML::Value << synthetic.train_samples;
    out << YAML::Key << "test_samples" << YAML::Value << synthetic.test_samples;
    out << YAML::Key << "features" << YAML::Value << synthetic.feature_dim;
    out << YAML::Key << "classes" << YAML::Value << synthetic.class_count;
    out << YAML::Key << "separation" << YAML::Value << synthetic.separation;
    out << YAML::Key << "spread" << YAML::Value << synthetic.spread;
    out << YAML::Key << "seed" << YAML::Value << synthetic.seed;
    out << YAML::EndMap;
  }
  out << YAML::Key << "partition" << YAML::Value << ToString(partition);
  out << YAML::Key << "clients" << YAML::Value << clients;
  out << YAML::Key << "samples_per_client" << YAML::Value << samples_per_client;
  out << YAML::Key << "rounds" << YAML::Value << rounds;
  out << YAML::Key << "dimension" << YAML::Value << dimension;
  out << YAML::Key << "epsilon" << YAML::Value << epsilon;
  out << YAML::Key << "delta0" << YAML::Value << delta0;
  out << YAML::Key << "noise" << YAML::Value << noise;
  out << YAML::Key << "retrain_passes" << YAML::Value << retrain_passes;
  out << YAML::Key << "evaluation" << YAML::Value << ToString(evaluation);
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << seeds;
  out << YAML::Key << "output_dir" << YAML::Value << output_dir;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

RunSeeds DeriveRunSeeds(std::uint64_t master_seed) {
  return {DeriveSeed(master_seed, 1), DeriveSeed(master_seed, 2),
          DeriveSeed(master_seed, 3)};
}

double RunResult::final_accuracy() const {
  return metrics.empty() ? 0.0 : metrics.back().accuracy;
}

Dataset LoadDataset(const ExperimentConfig& cfg) {
  Dataset ds = Load(cfg.dataset, cfg.paths, cfg.normalization, cfg.synthetic);
  Truncate(ds, cfg.train_limit, cfg.test_limit);
  return ds;
}

RunResult RunOnce(const ExperimentConfig& cfg, const Dataset& data,
                  std::uint64_t seed) {
  cfg.Validate();
  if (data.test.empty()) throw ConfigError("test set must be non-empty");
  const RunSeeds seeds = DeriveRunSeeds(seed);

  RunResult result;
  result.seed = seed;
  result.plan = Partition(data, cfg.partition, cfg.clients,
                          cfg.samples_per_client, seeds.partition);
  result.privacy = cfg.Privacy(result.plan.samples_per_client);
  result.privacy.Validate();

  const EncoderBasis basis(seeds.basis, data.feature_dim, cfg.dimension);
  std::vector<Client> clients(cfg.clients);
  for (int k = 0; k < cfg.clients; ++k) {
    clients[k].index = k + 1;
    for (int idx : result.plan.assignments[k]) {
      clients[k].data.push_back(data.train[idx]);
    }
  }
  const EncodedSet test = EncodeAll(data.test, basis);

  using Clock = std::chrono::steady_clock;
  auto round_start = Clock::now();
  auto record = [&](const ModelState& state) {
    const Evaluation eval = Evaluate(state.prototypes, test);
    MetricsRecord m;
    m.round = state.round;
    m.accuracy = eval.accuracy;
    m.per_class_accuracy = eval.per_class_accuracy;
    m.cumulative_variance = state.ledger.cumulative_variance();
    m.required_variance =
        RequiredVariance(result.privacy, state.round, cfg.clients);
    m.blackbox_variance =
        BlackboxCumulativeVariance(result.privacy, state.round, cfg.clients);
    const auto now = Clock::now();
    m.wall_seconds = std::chrono::duration<double>(now - round_start).count();
    round_start = now;
    if (!(m.accuracy >= 0.0 && m.accuracy <= 1.0) ||
        m.cumulative_variance < 0.0 || m.required_variance < 0.0 ||
        m.blackbox_variance < m.required_variance) {
      throw InvariantError(
          fmt::format("metrics record for round {} violates its invariants",
                      m.round));
    }
    result.metrics.push_back(std::move(m));
  };

  FederationOptions options;
  options.noise_seed = seeds.noise;
  options.retrain_passes = cfg.retrain_passes;
  if (cfg.evaluation == EvalCadence::kPerRound) {
    options.on_round_complete = record;
  }
  result.model = RunFederation(clients, result.privacy, basis,
                               data.class_count, options);
  if (cfg.evaluation == EvalCadence::kFinal) record(result.model);
  return result;
}

void WriteMetricsCsv(const std::vector<MetricsRecord>& metrics, int class_count,
                     std::ostream& out) {
  out << "round,mode,accuracy,cumulative_variance,required_variance,"
         "blackbox_variance";
  for (int c = 0; c < class_count; ++c) out << ",acc_class_" << c;
  out << '\n';
  for (const MetricsRecord& m : metrics) {
    const bool non_private = m.required_variance == 0.0;
    out << m.round << ',' << (non_private ? "non_private" : "private") << ','
        << FormatReal(m.accuracy) << ',' << FormatReal(m.cumulative_variance)
        << ',' << FormatReal(m.required_variance) << ','
        << FormatReal(m.blackbox_variance);
    for (int c = 0; c < class_count; ++c) {
      const double v = c < static_cast<int>(m.per_class_accuracy.size())
                           ? m.per_class_accuracy[c]
                           : 0.0;
      out << ',' << FormatReal(v);
    }
    out << '\n';
  }
}

void WriteTimingCsv(const std::vector<MetricsRecord>& metrics,
                    std::ostream& out) {
  out << "round,wall_seconds\n";
  for (const MetricsRecord& m : metrics) {
    out << m.round << ',' << fmt::format("{:.6f}", m.wall_seconds) << '\n';
  }
}

void WriteRunOutputs(const std::string& dir, const ExperimentConfig& cfg,
                     const Dataset& data, const RunResult& result) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError(fmt::format("cannot create output directory {}: {}", dir,
                                  ec.message()));
  }
  const fs::path base(dir);
  {
    std::ostringstream s;
    WriteMetricsCsv(result.metrics, data.class_count, s);
    WriteFile(base / "metrics.csv", s.str());
  }
  {
    std::ostringstream s;
    WriteTimingCsv(result.metrics, s);
    WriteFile(base / "timing.csv", s.str());
  }
  {
    std::ostringstream s;
    result.model.ledger.WriteCsv(s);
    WriteFile(base / "ledger.csv", s.str());
  }
  {
    std::ostringstream s;
    result.model.Write(s);
    WriteFile(base / "model.txt", s.str());
  }
  {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "config" << YAML::Value << YAML::Load(cfg.ToYaml());
    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << result.seed;
    out << YAML::Key << "non_private" << YAML::Value
        << result.model.non_private;
    out << YAML::Key << "samples_per_client_resolved" << YAML::Value
        << result.plan.samples_per_client;
    out << YAML::Key << "train_samples" << YAML::Value << data.train.size();
    out << YAML::Key << "test_samples" << YAML::Value << data.test.size();
    out << YAML::Key << "feature_dim" << YAML::Value << data.feature_dim;
    out << YAML::Key << "class_count" << YAML::Value << data.class_count;
    out << YAML::Key << "transforms" << YAML::Value << data.transforms;
    out << YAML::Key << "ledger_entries" << YAML::Value
        << result.model.ledger.size();
    out << YAML::Key << "final_accuracy" << YAML::Value
        << result.final_accuracy();
    out << YAML::EndMap;
    out << YAML::EndMap;
    WriteFile(base / "manifest.yaml", std::string(out.c_str()) + "\n");
  }
}

ReplicateSummary RunExperiment(const ExperimentConfig& cfg, const Dataset& data,
                               bool write_outputs) {
  ReplicateSummary summary;
  std::vector<double> accuracies;
  for (std::uint64_t seed : cfg.seeds) {
    RunResult run = RunOnce(cfg, data, seed);
    if (write_outputs) {
      const std::string dir =
          cfg.seeds.size() == 1
              ? cfg.output_dir
              : (fs::path(cfg.output_dir) / fmt::format("seed_{}", seed))
                    .string();
      WriteRunOutputs(dir, cfg, data, run);
    }
    accuracies.push_back(run.final_accuracy());
    summary.runs.push_back(std::move(run));
  }
  summary.mean_accuracy = Mean(accuracies);
  summary.stddev_accuracy = SampleStddev(accuracies);
  if (write_outputs && cfg.seeds.size() > 1) {
    std::ostringstream s;
    s << "seed,final_accuracy,final_cumulative_variance\n";
    for (const RunResult& run : summary.runs) {
      s << run.seed << ',' << FormatReal(run.final_accuracy()) << ','
        << FormatReal(run.model.ledger.cumulative_variance()) << '\n';
    }
    s << "mean," << FormatReal(summary.mean_accuracy) << ",\n";
    s << "stddev," << FormatReal(summary.stddev_accuracy) << ",\n";
    WriteFile(fs::path(cfg.output_dir) / "summary.csv", s.str());
  }
  return summary;
}

ReplicateSummary RunExperiment(const ExperimentConfig& cfg) {
  const Dataset data = LoadDataset(cfg);
  return RunExperiment(cfg, data, true);
}

const std::vector<std::string>& SweepAxes() {
  static const std::vector<std::string> axes = {
      "epsilon", "delta0",         "dimension",     "clients",
      "samples_per_client", "rounds", "retrain_passes", "partition"};
  return axes;
}

ExperimentConfig ApplySweepValue(const ExperimentConfig& cfg,
                                 const std::string& axis,
                                 const std::string& value) {
  ExperimentConfig out = cfg;
  auto as_int = [&]() {
    try {
      std::size_t used = 0;
      const int v = std::stoi(value, &used);
      if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(
        fmt::format("sweep value '{}' for {} is not an integer", value, axis));
  };
  auto as_real = [&]() {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(
        fmt::format("sweep value '{}' for {} is not a number", value, axis));
  };
  if (axis == "epsilon") {
    out.epsilon = as_real();
  } else if (axis == "delta0") {
    out.delta0 = as_real();
  } else if (axis == "dimension") {
    out.dimension = as_int();
  } else if (axis == "clients") {
    out.clients = as_int();
  } else if (axis == "samples_per_client") {
    out.samples_per_client = as_int();
  } else if (axis == "rounds") {
    out.rounds = as_int();
  } else if (axis == "retrain_passes") {
    out.retrain_passes = as_int();
  } else if (axis == "partition") {
    out.partition = ParsePartitionMode(value);
  } else {
    std::string names;
    for (const std::string& a : SweepAxes()) names += (names.empty() ? "" : ", ") + a;
    throw ConfigError(
        fmt::format("unknown sweep axis '{}' (one of: {})", axis, names));
  }
  const std::uint64_t tag = HashName(axis + "=" + value);
  for (std::uint64_t& seed : out.seeds) seed = DeriveSeed(seed, tag);
  out.output_dir =
      (fs::path(cfg.output_dir) / fmt::format("{}_{}", axis, value)).string();
  out.Validate();
  return out;
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const std::string& axis,
                               const std::vector<std::string>& values,
                               const Dataset& data, bool write_outputs) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<ExperimentConfig> configs;
  for (const std::string& v : values) {
    configs.push_back(ApplySweepValue(base, axis, v));
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepRow row;
    row.value = values[i];
    row.replicates = RunExperiment(configs[i], data, write_outputs);
    row.mean_accuracy = row.replicates.mean_accuracy;
    row.stddev_accuracy = row.replicates.stddev_accuracy;
    std::vector<double> variances;
    for (const RunResult& r : row.replicates.runs) {
      variances.push_back(r.model.ledger.cumulative_variance());
    }
    row.final_cumulative_variance = Mean(variances);
    rows.push_back(std::move(row));
  }
  if (write_outputs) {
    std::error_code ec;
    fs::create_directories(base.output_dir, ec);
    std::ostringstream s;
    WriteSweepCsv(axis, rows, s);
    WriteFile(fs::path(base.output_dir) / fmt::format("sweep_{}.csv", axis),
              s.str());
  }
  return rows;
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                               const std::string& axis,
                               const std::vector<std::string>& values) {
  const Dataset data = LoadDataset(base);
  return RunSweep(base, axis, values, data, true);
}

void WriteSweepCsv(const std::string& axis, const std::vector<SweepRow>& rows,
                   std::ostream& out) {
  out << axis
      << ",final_accuracy_mean,final_accuracy_stddev,final_cumulative_variance,"
         "replicates\n";
  for (const SweepRow& r : rows) {
    out << r.value << ',' << FormatReal(r.mean_accuracy) << ','
        << FormatReal(r.stddev_accuracy) << ','
        << FormatReal(r.final_cumulative_variance) << ','
        << r.replicates.runs.size() << '\n';
  }
}

std::vector<NoiseRow> NoiseComparison(const PrivacyParams& params) {
  params.Validate();
  std::vector<NoiseRow> rows;
  rows.reserve(static_cast<std::size_t>(params.rounds) * params.clients);
  double cumulative = 0.0;
  for (int r = 1; r <= params.rounds; ++r) {
    for (int k = 1; k <= params.clients; ++k) {
      NoiseRow row;
      row.round = r;
      row.client = k;
      row.step = params.GlobalStep(r, k);
      row.incremental = IncrementalVariance(params, r, k);
      cumulative += row.incremental;
      row.cumulative = cumulative;
      row.required = RequiredVariance(params, r, k);
      row.blackbox = BlackboxCumulativeVariance(params, r, k);
      row.gap = row.blackbox - row.required;
      rows.push_back(row);
    }
  }
  return rows;
}

void WriteNoiseTableCsv(const std::vector<NoiseRow>& rows, std::ostream& out) {
  out << "round,client,step,incremental,cumulative,required,blackbox,gap\n";
  for (const NoiseRow& r : rows) {
    out << r.round << ',' << r.client << ',' << r.step << ','
        << FormatReal(r.incremental) << ',' << FormatReal(r.cumulative) << ','
        << FormatReal(r.required) << ',' << FormatReal(r.blackbox) << ','
        << FormatReal(r.gap) << '\n';
  }
}

std::vector<std::string> CrossCheckLedger(const NoiseLedger& ledger,
                                          const PrivacyParams& params,
                                          double rel_tol) {
  std::vector<std::string> problems = ledger.Verify(params, rel_tol);
  const std::vector<NoiseRow> table = NoiseComparison(params);
  if (ledger.size() != table.size()) {
    problems.push_back(fmt::format("ledger has {} entries, schedule has {}",
                                   ledger.size(), table.size()));
  }
  const std::size_t n = std::min(ledger.size(), table.size());
  for (std::size_t i = 0; i < n; ++i) {
    const LedgerEntry& e = ledger.entries()[i];
    const NoiseRow& row = table[i];
    if (e.round != row.round || e.client != row.client) continue;
    if (!WithinRelative(e.added_variance, row.incremental, rel_tol)) {
      problems.push_back(fmt::format(
          "entry {} (r={}, k={}): added {} != incremental {}", i, e.round,
          e.client, FormatReal(e.added_variance), FormatReal(row.incremental)));
    }
    if (!WithinRelative(e.cumulative_variance, row.cumulative, rel_tol)) {
      problems.push_back(fmt::format(
          "entry {} (r={}, k={}): cumulative {} != table {}", i, e.round,
          e.client, FormatReal(e.cumulative_variance),
          FormatReal(row.cumulative)));
    }
  }
  return problems;
}

int ResolveSamplesPerClient(const ExperimentConfig& cfg) {
  if (cfg.samples_per_client > 0) return cfg.samples_per_client;
  const Dataset ds = LoadDataset(cfg);
  const PartitionPlan plan =
      Partition(ds, cfg.partition, cfg.clients, 0, 0);
  return plan.samples_per_client;
}

}  // namespace hdring
