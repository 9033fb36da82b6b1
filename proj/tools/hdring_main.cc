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


// hdring command-line driver.
//
//   hdring run <config>
//   hdring sweep <config> --axis <name> --values <v1,v2,...> [--replicates n]
//         (a config with one seed runs n = 5 replicates per value by default;
//         a config with a seed list uses that list)
//   hdring noise-table <config> [--out file] [--check ledger.csv]
//   hdring partition-dump <config> [--out file] [--seed s]
//
// Exit status: 0 success, 2 config error, 3 data or load error, 4 protocol
// or invariant violation (including a failed ledger check), 1 anything else.
// Failures print one line to stderr:
//   hdring: error kind=<kind> exit=<status> message="<text>"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hdring/datasets.h"
#include "hdring/dp_accountant.h"
#include "hdring/errors.h"
#include "hdring/experiments.h"

namespace {

using hdring::ConfigError;
using hdring::ExperimentConfig;

int ExitStatus(const hdring::Error& e) {
  const std::string kind = e.kind();
  if (kind == "config") return 2;
  if (kind == "load" || kind == "data" || kind == "partition") return 3;
  return 4;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out;
}

int Fail(const char* kind, int status, const std::string& message) {
  std::cerr << fmt::format("hdring: error kind={} exit={} message=\"{}\"\n",
                           kind, status, Escape(message));
  return status;
}

// Writes to `path`, or stdout when it is empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path));
  out << text;
}

std::vector<std::string> SplitValues(const std::string& list) {
  std::vector<std::string> values;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) {
      throw ConfigError(fmt::format("empty entry in --values '{}'", list));
    }
    values.push_back(item.substr(b, e - b + 1));
  }
  if (values.empty()) throw ConfigError("--values is empty");
  return values;
}

int CmdRun(const std::string& config_path) {
  const ExperimentConfig cfg = ExperimentConfig::Load(config_path);
  const hdring::ReplicateSummary summary = hdring::RunExperiment(cfg);
  for (const hdring::RunResult& run : summary.runs) {
    std::cout << fmt::format("seed={} final_accuracy={} ledger_entries={}\n",
                             run.seed, hdring::FormatReal(run.final_accuracy()),
                             run.model.ledger.size());
  }
  if (summary.runs.size() > 1) {
    std::cout << fmt::format("mean_accuracy={} stddev_accuracy={}\n",
                             hdring::FormatReal(summary.mean_accuracy),
                             hdring::FormatReal(summary.stddev_accuracy));
  }
  std::cout << "output_dir=" << cfg.output_dir << '\n';
  return 0;
}

int CmdSweep(const std::string& config_path, const std::string& axis,
             const std::string& values, int replicates, bool replicates_given) {
  ExperimentConfig cfg = ExperimentConfig::Load(config_path);
  if (cfg.seeds.size() == 1) {
    if (replicates < 1) throw ConfigError("--replicates must be >= 1");
    const std::uint64_t first = cfg.seeds.front();
    cfg.seeds.clear();
    for (int i = 0; i < replicates; ++i) cfg.seeds.push_back(first + i);
  } else if (replicates_given) {
    throw ConfigError("--replicates needs a config with a single seed");
  }
  const std::vector<hdring::SweepRow> rows =
      hdring::RunSweep(cfg, axis, SplitValues(values));
  hdring::WriteSweepCsv(axis, rows, std::cout);
  return 0;
}

int CmdNoiseTable(const std::string& config_path, const std::string& out,
                  const std::string& check) {
  const ExperimentConfig cfg = ExperimentConfig::Load(config_path);
  const hdring::PrivacyParams params =
      cfg.Privacy(hdring::ResolveSamplesPerClient(cfg));
  if (check.empty()) {
    std::ostringstream table;
    hdring::WriteNoiseTableCsv(hdring::NoiseComparison(params), table);
    Emit(out, table.str());
    return 0;
  }
  std::ifstream in(check);
  if (!in) throw hdring::LoadError(fmt::format("cannot read ledger {}", check));
  const hdring::NoiseLedger ledger = hdring::NoiseLedger::ReadCsv(in);
  const std::vector<std::string> problems =
      hdring::CrossCheckLedger(ledger, params);
  if (!problems.empty()) {
    throw hdring::InvariantError(fmt::format(
        "ledger check failed with {} problem(s); first: {}", problems.size(),
        problems.front()));
  }
  std::cout << fmt::format("ledger ok: {} entries match the schedule\n",
                           ledger.size());
  return 0;
}

int CmdPartitionDump(const std::string& config_path, const std::string& out,
                     std::uint64_t seed, bool seed_given) {
  const ExperimentConfig cfg = ExperimentConfig::Load(config_path);
  const hdring::Dataset data = hdring::LoadDataset(cfg);
  const std::uint64_t master = seed_given ? seed : cfg.seeds.front();
  const hdring::PartitionPlan plan =
      hdring::Partition(data, cfg.partition, cfg.clients,
                        cfg.samples_per_client,
                        hdring::DeriveRunSeeds(master).partition);
  std::ostringstream text;
  plan.WriteCsv(text);
  Emit(out, text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ring-federated hyperdimensional learning with noise accounting"};
  app.require_subcommand(1);

  std::string config;
  std::string axis;
  std::string values;
  std::string out;
  std::string check;
  int replicates = 5;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config, "YAML config")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one config field");
  sweep->add_option("config", config, "YAML config")->required();
  sweep->add_option("--axis", axis, "Field to sweep")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  CLI::Option* replicates_opt = sweep->add_option(
      "--replicates", replicates,
      "Seeds per value, counting up from a single config seed (default 5)");

  CLI::App* table =
      app.add_subcommand("noise-table", "Print the analytic noise schedule");
  table->add_option("config", config, "YAML config")->required();
  table->add_option("--out", out, "Write the table here instead of stdout");
  table->add_option("--check", check,
                    "Cross-check a run ledger against the schedule");

  CLI::App* dump =
      app.add_subcommand("partition-dump", "Print the client partition plan");
  dump->add_option("config", config, "YAML config")->required();
  dump->add_option("--out", out, "Write the plan here instead of stdout");
  CLI::Option* seed_opt =
      dump->add_option("--seed", seed, "Master seed (default: first seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("config", 2, e.what());
  }

  try {
    if (*run) return CmdRun(config);
    if (*sweep) return CmdSweep(config, axis, values, replicates,
                                  replicates_opt->count() > 0);
    if (*table) return CmdNoiseTable(config, out, check);
    if (*dump) return CmdPartitionDump(config, out, seed, seed_opt->count() > 0);
  } catch (const hdring::Error& e) {
    return Fail(e.kind(), ExitStatus(e), e.what());
  } catch (const std::exception& e) {
    return Fail("internal", 1, e.what());
  }
  return 1;
}
