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


// Python bindings exposed as hdring._core.

#include <sstream>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdring/datasets.h"
#include "hdring/dp_accountant.h"
#include "hdring/errors.h"
#include "hdring/experiments.h"
#include "hdring/federation.h"
#include "hdring/hd_core.h"

namespace py = pybind11;
using namespace pybind11::literals;

namespace hdring {
namespace {

std::string LedgerCsv(const NoiseLedger& ledger) {
  std::ostringstream out;
  ledger.WriteCsv(out);
  return out.str();
}

NoiseLedger LedgerFromCsv(const std::string& text) {
  std::istringstream in(text);
  return NoiseLedger::ReadCsv(in);
}

}  // namespace
}  // namespace hdring

PYBIND11_MODULE(_core, m) {
  using namespace hdring;
  m.doc() = "Ring-federated hyperdimensional learning with noise accounting";

  // Translators registered later are tried first, so the base goes first.
  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<LoadError>(m, "LoadError", error.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", error.ptr());

  py::class_<PrivacyParams>(m, "PrivacyParams")
      .def(py::init([](double epsilon, double delta0, int dimension,
                       int samples_per_client, int clients, int rounds) {
             PrivacyParams p{epsilon, delta0, dimension, samples_per_client,
                             clients, rounds};
             p.Validate();
             return p;
           }),
           "epsilon"_a, "delta0"_a, "dimension"_a, "samples_per_client"_a,
           "clients"_a, "rounds"_a)
      .def_readwrite("epsilon", &PrivacyParams::epsilon)
      .def_readwrite("delta0", &PrivacyParams::delta0)
      .def_readwrite("dimension", &PrivacyParams::dimension)
      .def_readwrite("samples_per_client", &PrivacyParams::samples_per_client)
      .def_readwrite("clients", &PrivacyParams::clients)
      .def_readwrite("rounds", &PrivacyParams::rounds)
      .def("global_step", &PrivacyParams::GlobalStep, "round"_a, "client"_a);

  m.def("required_variance", &RequiredVariance, "params"_a, "round"_a,
        "client"_a);
  m.def("incremental_variance", &IncrementalVariance, "params"_a, "round"_a,
        "client"_a);
  m.def("blackbox_cumulative_variance", &BlackboxCumulativeVariance,
        "params"_a, "round"_a, "client"_a);
  m.def("effective_delta", &EffectiveDelta, "params"_a, "round"_a, "client"_a);

  py::class_<LedgerEntry>(m, "LedgerEntry")
      .def_readonly("round", &LedgerEntry::round)
      .def_readonly("client", &LedgerEntry::client)
      .def_readonly("added_variance", &LedgerEntry::added_variance)
      .def_readonly("cumulative_variance", &LedgerEntry::cumulative_variance)
      .def_readonly("required_variance", &LedgerEntry::required_variance)
      .def_readonly("effective_delta", &LedgerEntry::effective_delta);

  py::class_<NoiseLedger>(m, "NoiseLedger")
      .def(py::init<>())
      .def("record", &NoiseLedger::Record, "round"_a, "client"_a,
           "added_variance"_a, "params"_a)
      .def_property_readonly("entries", &NoiseLedger::entries)
      .def_property_readonly("cumulative_variance",
                             &NoiseLedger::cumulative_variance)
      .def("verify", &NoiseLedger::Verify, "params"_a, "rel_tol"_a = 1e-9)
      .def("to_csv", &LedgerCsv)
      .def_static("from_csv", &LedgerFromCsv, "text"_a)
      .def("__len__", &NoiseLedger::size);

  py::class_<EncoderBasis>(m, "EncoderBasis")
      .def(py::init<std::uint64_t, int, int>(), "seed"_a, "feature_dim"_a,
           "dimension"_a)
      .def_property_readonly("vectors", &EncoderBasis::vectors)
      .def_property_readonly("feature_dim", &EncoderBasis::feature_dim)
      .def_property_readonly("dimension", &EncoderBasis::dimension);

  m.def(
      "encode",
      [](const Eigen::VectorXd& features, const EncoderBasis& basis) {
        return Encode(features, basis);
      },
      "features"_a, "basis"_a);
  m.def(
      "form_class_prototypes",
      [](const RowMatrix& features, const std::vector<int>& labels,
         const EncoderBasis& basis, int class_count) {
        if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
          throw ConfigError("features and labels differ in length");
        }
        SampleSet samples(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
          samples[i].features = features.row(i).transpose();
          samples[i].label = labels[i];
        }
        return FormClassPrototypes(samples, basis, class_count).vectors();
      },
      "features"_a, "labels"_a, "basis"_a, "class_count"_a);
  m.def(
      "predict",
      [](const Eigen::VectorXd& query, const RowMatrix& prototypes) {
        const Prediction p = Predict(query, ClassPrototypes(prototypes));
        return py::make_tuple(p.label, p.scores);
      },
      "query"_a, "prototypes"_a);

  py::class_<NoiseRow>(m, "NoiseRow")
      .def_readonly("round", &NoiseRow::round)
      .def_readonly("client", &NoiseRow::client)
      .def_readonly("step", &NoiseRow::step)
      .def_readonly("incremental", &NoiseRow::incremental)
      .def_readonly("cumulative", &NoiseRow::cumulative)
      .def_readonly("required", &NoiseRow::required)
      .def_readonly("blackbox", &NoiseRow::blackbox)
      .def_readonly("gap", &NoiseRow::gap);
  m.def("noise_comparison", &NoiseComparison, "params"_a);
  m.def("cross_check_ledger", &CrossCheckLedger, "ledger"_a, "params"_a,
        "rel_tol"_a = 1e-9);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("parse", &ExperimentConfig::Parse, "yaml_text"_a,
                  "base_dir"_a = "")
      .def_static("load", &ExperimentConfig::Load, "path"_a)
      .def("to_yaml", &ExperimentConfig::ToYaml)
      .def("privacy", &ExperimentConfig::Privacy, "samples_per_client"_a)
      .def_readwrite("dimension", &ExperimentConfig::dimension)
      .def_readwrite("clients", &ExperimentConfig::clients)
      .def_readwrite("rounds", &ExperimentConfig::rounds)
      .def_readwrite("epsilon", &ExperimentConfig::epsilon)
      .def_readwrite("delta0", &ExperimentConfig::delta0)
      .def_readwrite("noise", &ExperimentConfig::noise)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir);

  py::class_<MetricsRecord>(m, "MetricsRecord")
      .def_readonly("round", &MetricsRecord::round)
      .def_readonly("accuracy", &MetricsRecord::accuracy)
      .def_readonly("per_class_accuracy", &MetricsRecord::per_class_accuracy)
      .def_readonly("cumulative_variance", &MetricsRecord::cumulative_variance)
      .def_readonly("required_variance", &MetricsRecord::required_variance)
      .def_readonly("blackbox_variance", &MetricsRecord::blackbox_variance);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("metrics", &RunResult::metrics)
      .def_readonly("privacy", &RunResult::privacy)
      .def_property_readonly("final_accuracy", &RunResult::final_accuracy)
      .def_property_readonly(
          "ledger", [](const RunResult& r) { return r.model.ledger; })
      .def_property_readonly("prototypes", [](const RunResult& r) {
        return r.model.prototypes.vectors();
      });

  py::class_<ReplicateSummary>(m, "ReplicateSummary")
      .def_readonly("runs", &ReplicateSummary::runs)
      .def_readonly("mean_accuracy", &ReplicateSummary::mean_accuracy)
      .def_readonly("stddev_accuracy", &ReplicateSummary::stddev_accuracy);

  m.def(
      "run_experiment",
      [](const ExperimentConfig& cfg, bool write_outputs) {
        return RunExperiment(cfg, LoadDataset(cfg), write_outputs);
      },
      "config"_a, "write_outputs"_a = false,
      py::call_guard<py::gil_scoped_release>());
}
