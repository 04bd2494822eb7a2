// Copyright 2026 The zpgsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZPGSIM_EXPERIMENT_HPP
#define ZPGSIM_EXPERIMENT_HPP

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zpgsim/decompose.hpp"
#include "zpgsim/figures.hpp"
#include "zpgsim/oracle.hpp"

namespace zpgsim {

using json = nlohmann::json;

namespace cfg {

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
}

inline const json& get_required(const json& obj, const std::string& key,
                                const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

inline double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = get_required(obj, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline double get_number_or(const json& obj, const std::string& key, double fallback,
                            const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return it->get<double>();
}

inline Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ConfigError(where + ": expected a number or [re, im]");
}

inline Matrix parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a matrix (array of rows)");
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw ConfigError(where + ": empty matrix row");
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      throw ConfigError(where + ": ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_complex(v[i][j], where);
  }
  return out;
}

inline json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cfg

struct PulseConfig {
  std::string shape = "square";
  double theta = kPi;
  double tau = 1.0;
  double t_start = 0.0;
};

struct SourceConfig {
  std::string kind = "two_level";  // two_level | vacuum | custom
  // two_level
  double gamma = 1.0;
  std::optional<PulseConfig> pulse;
  double detuning = 0.0;
  std::string initial = "ground";  // ground | excited
  // custom
  int dim = 2;
  std::optional<Matrix> hamiltonian;
  std::vector<std::pair<Matrix, double>> channels;
  std::optional<Matrix> collection_op;
  double collection_rate = 1.0;
  std::optional<Matrix> initial_state;
};

struct CircuitConfig {
  std::string kind = "identity";  // identity | haar | matrix
  std::uint64_t seed = 0;
  std::optional<Matrix> matrix;
};

struct DetectorConfig {
  std::vector<int> truncations;
  bool threshold = false;
  bool auto_truncate = false;
  double tail_tolerance = 1e-9;
};

struct RunConfig {
  double t0 = 0.0;
  std::optional<double> t1;
  double rtol = 1e-10;
  double atol = 1e-12;
  std::optional<double> max_step;
  int workers = 1;
  bool conjugate_pairs = true;
};

struct PnDistTask {};
struct ThresholdTask {};
struct FomTask {
  double eta = 1.0;
  double mu_step = 1e-3;
  double g2_step = 1e-2;
  int cross_check_truncation = 0;  // 0: skip the distribution cross-check
};
struct HomTask {
  double reference_detuning = 100.0;
};
struct TvdBenchmarkTask {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<double> taus = {0.5, 0.1, 0.02};
  int truncation = 4;
};
struct BenchScalingTask {
  int n_max = 3;
  int points_per_lifetime = 20;
  double accuracy = 5e-3;
  int zpg_truncation = 8;
};

using TaskConfig = std::variant<PnDistTask, ThresholdTask, FomTask, HomTask, TvdBenchmarkTask,
                                BenchScalingTask>;

inline const char* task_name(const TaskConfig& task) {
  struct Visitor {
    const char* operator()(const PnDistTask&) const { return "pn_dist"; }
    const char* operator()(const ThresholdTask&) const { return "threshold"; }
    const char* operator()(const FomTask&) const { return "fom"; }
    const char* operator()(const HomTask&) const { return "hom"; }
    const char* operator()(const TvdBenchmarkTask&) const { return "tvd_benchmark"; }
    const char* operator()(const BenchScalingTask&) const { return "bench_scaling"; }
  };
  return std::visit(Visitor{}, task);
}

struct ExperimentConfig {
  double gamma_ref = 1.0;
  std::vector<SourceConfig> sources;
  CircuitConfig circuit;
  DetectorConfig detectors;
  RunConfig run;
  TaskConfig task;
  std::vector<std::string> formats = {"csv", "json"};

  static ExperimentConfig from_json(const json& j);
  json to_json() const;
};

// ---------------------------------------------------------------------------
// Parsing

inline PulseConfig parse_pulse(const json& j, const std::string& where) {
  cfg::check_keys(j, {"shape", "theta", "tau", "t_start"}, where);
  PulseConfig p;
  if (j.contains("shape")) p.shape = j.at("shape").get<std::string>();
  if (p.shape != "square") throw ConfigError(where + ".shape: only 'square' is supported");
  p.theta = cfg::get_number(j, "theta", where);
  p.tau = cfg::get_number(j, "tau", where);
  p.t_start = cfg::get_number_or(j, "t_start", 0.0, where);
  return p;
}

inline SourceConfig parse_source(const json& j, const std::string& where) {
  SourceConfig s;
  s.kind = cfg::get_required(j, "kind", where).get<std::string>();
  if (s.kind == "two_level") {
    cfg::check_keys(j, {"kind", "gamma", "pulse", "detuning", "initial"}, where);
    s.gamma = cfg::get_number_or(j, "gamma", 1.0, where);
    s.detuning = cfg::get_number_or(j, "detuning", 0.0, where);
    if (j.contains("pulse")) s.pulse = parse_pulse(j.at("pulse"), where + ".pulse");
    if (j.contains("initial")) s.initial = j.at("initial").get<std::string>();
    if (s.initial != "ground" && s.initial != "excited")
      throw ConfigError(where + ".initial: expected 'ground' or 'excited'");
  } else if (s.kind == "vacuum") {
    cfg::check_keys(j, {"kind"}, where);
  } else if (s.kind == "custom") {
    cfg::check_keys(j,
                    {"kind", "dim", "hamiltonian", "channels", "collection_op",
                     "collection_rate", "initial_state"},
                    where);
    s.dim = static_cast<int>(cfg::get_number(j, "dim", where));
    if (j.contains("hamiltonian"))
      s.hamiltonian = cfg::parse_matrix(j.at("hamiltonian"), where + ".hamiltonian");
    if (j.contains("channels")) {
      for (std::size_t i = 0; i < j.at("channels").size(); ++i) {
        const json& ch = j.at("channels")[i];
        const std::string chw = where + ".channels[" + std::to_string(i) + "]";
        cfg::check_keys(ch, {"op", "rate"}, chw);
        s.channels.emplace_back(cfg::parse_matrix(cfg::get_required(ch, "op", chw), chw + ".op"),
                                cfg::get_number(ch, "rate", chw));
      }
    }
    s.collection_op =
        cfg::parse_matrix(cfg::get_required(j, "collection_op", where), where + ".collection_op");
    s.collection_rate = cfg::get_number(j, "collection_rate", where);
    s.initial_state =
        cfg::parse_matrix(cfg::get_required(j, "initial_state", where), where + ".initial_state");
  } else {
    throw ConfigError(where + ".kind: expected 'two_level', 'vacuum', or 'custom'");
  }
  return s;
}

inline TaskConfig parse_task(const json& j) {
  const std::string where = "task";
  const std::string name = cfg::get_required(j, "name", where).get<std::string>();
  if (name == "pn_dist") {
    cfg::check_keys(j, {"name"}, where);
    return PnDistTask{};
  }
  if (name == "threshold") {
    cfg::check_keys(j, {"name"}, where);
    return ThresholdTask{};
  }
  if (name == "fom") {
    cfg::check_keys(j, {"name", "eta", "mu_step", "g2_step", "cross_check_truncation"}, where);
    FomTask t;
    t.eta = cfg::get_number_or(j, "eta", 1.0, where);
    t.mu_step = cfg::get_number_or(j, "mu_step", 1e-3, where);
    t.g2_step = cfg::get_number_or(j, "g2_step", 1e-2, where);
    t.cross_check_truncation =
        static_cast<int>(cfg::get_number_or(j, "cross_check_truncation", 0, where));
    return t;
  }
  if (name == "hom") {
    cfg::check_keys(j, {"name", "reference_detuning"}, where);
    HomTask t;
    t.reference_detuning = cfg::get_number_or(j, "reference_detuning", 100.0, where);
    return t;
  }
  if (name == "tvd_benchmark") {
    cfg::check_keys(j, {"name", "seeds", "taus", "truncation"}, where);
    TvdBenchmarkTask t;
    if (j.contains("seeds")) {
      t.seeds.clear();
      for (const auto& s : j.at("seeds")) t.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("taus")) {
      t.taus.clear();
      for (const auto& s : j.at("taus")) t.taus.push_back(s.get<double>());
    }
    t.truncation = static_cast<int>(cfg::get_number_or(j, "truncation", 4, where));
    return t;
  }
  if (name == "bench_scaling") {
    cfg::check_keys(j, {"name", "n_max", "points_per_lifetime", "accuracy", "zpg_truncation"},
                    where);
    BenchScalingTask t;
    t.n_max = static_cast<int>(cfg::get_number_or(j, "n_max", 3, where));
    t.points_per_lifetime =
        static_cast<int>(cfg::get_number_or(j, "points_per_lifetime", 20, where));
    t.accuracy = cfg::get_number_or(j, "accuracy", 5e-3, where);
    t.zpg_truncation = static_cast<int>(cfg::get_number_or(j, "zpg_truncation", 8, where));
    return t;
  }
  throw ConfigError("task.name: unknown task '" + name + "'");
}

inline ExperimentConfig ExperimentConfig::from_json(const json& j) {
  cfg::check_keys(j, {"gamma_ref", "model", "circuit", "detectors", "run", "task", "output"},
                  "config");
  ExperimentConfig c;
  c.gamma_ref = cfg::get_number_or(j, "gamma_ref", 1.0, "config");
  if (c.gamma_ref <= 0.0) throw ConfigError("config.gamma_ref: must be positive");

  const json& model = cfg::get_required(j, "model", "config");
  cfg::check_keys(model, {"sources"}, "model");
  const json& sources = cfg::get_required(model, "sources", "model");
  if (!sources.is_array() || sources.empty())
    throw ConfigError("model.sources: expected a non-empty array");
  for (std::size_t i = 0; i < sources.size(); ++i)
    c.sources.push_back(parse_source(sources[i], "model.sources[" + std::to_string(i) + "]"));

  if (j.contains("circuit")) {
    const json& circuit = j.at("circuit");
    cfg::check_keys(circuit, {"kind", "seed", "matrix"}, "circuit");
    c.circuit.kind = cfg::get_required(circuit, "kind", "circuit").get<std::string>();
    if (c.circuit.kind == "haar") {
      c.circuit.seed = cfg::get_required(circuit, "seed", "circuit").get<std::uint64_t>();
    } else if (c.circuit.kind == "matrix") {
      c.circuit.matrix =
          cfg::parse_matrix(cfg::get_required(circuit, "matrix", "circuit"), "circuit.matrix");
    } else if (c.circuit.kind != "identity") {
      throw ConfigError("circuit.kind: expected 'identity', 'haar', or 'matrix'");
    }
  }

  if (j.contains("detectors")) {
    const json& det = j.at("detectors");
    cfg::check_keys(det, {"truncations", "threshold", "auto_truncate", "tail_tolerance"},
                    "detectors");
    if (det.contains("truncations"))
      for (const auto& n : det.at("truncations")) c.detectors.truncations.push_back(n.get<int>());
    if (det.contains("threshold")) c.detectors.threshold = det.at("threshold").get<bool>();
    if (det.contains("auto_truncate"))
      c.detectors.auto_truncate = det.at("auto_truncate").get<bool>();
    c.detectors.tail_tolerance = cfg::get_number_or(det, "tail_tolerance", 1e-9, "detectors");
  }

  if (j.contains("run")) {
    const json& run = j.at("run");
    cfg::check_keys(run, {"t0", "t1", "rtol", "atol", "max_step", "workers", "conjugate_pairs"},
                    "run");
    c.run.t0 = cfg::get_number_or(run, "t0", 0.0, "run");
    if (run.contains("t1") && !run.at("t1").is_null())
      c.run.t1 = cfg::get_number(run, "t1", "run");
    c.run.rtol = cfg::get_number_or(run, "rtol", 1e-10, "run");
    c.run.atol = cfg::get_number_or(run, "atol", 1e-12, "run");
    if (run.contains("max_step") && !run.at("max_step").is_null())
      c.run.max_step = cfg::get_number(run, "max_step", "run");
    c.run.workers = static_cast<int>(cfg::get_number_or(run, "workers", 1, "run"));
    if (run.contains("conjugate_pairs"))
      c.run.conjugate_pairs = run.at("conjugate_pairs").get<bool>();
  }

  c.task = parse_task(cfg::get_required(j, "task", "config"));

  if (j.contains("output")) {
    const json& output = j.at("output");
    cfg::check_keys(output, {"formats"}, "output");
    if (output.contains("formats")) {
      c.formats.clear();
      for (const auto& f : output.at("formats")) {
        const std::string fmt = f.get<std::string>();
        if (fmt != "csv" && fmt != "json")
          throw ConfigError("output.formats: expected 'csv' or 'json'");
        c.formats.push_back(fmt);
      }
    }
  }
  return c;
}

inline json ExperimentConfig::to_json() const {
  json j;
  j["gamma_ref"] = gamma_ref;
  json srcs = json::array();
  for (const SourceConfig& s : sources) {
    json e;
    e["kind"] = s.kind;
    if (s.kind == "two_level") {
      e["gamma"] = s.gamma;
      e["detuning"] = s.detuning;
      e["initial"] = s.initial;
      if (s.pulse) {
        e["pulse"] = {{"shape", s.pulse->shape},
                      {"theta", s.pulse->theta},
                      {"tau", s.pulse->tau},
                      {"t_start", s.pulse->t_start}};
      }
    } else if (s.kind == "custom") {
      e["dim"] = s.dim;
      if (s.hamiltonian) e["hamiltonian"] = cfg::matrix_to_json(*s.hamiltonian);
      if (!s.channels.empty()) {
        json chans = json::array();
        for (const auto& [op, rate] : s.channels)
          chans.push_back({{"op", cfg::matrix_to_json(op)}, {"rate", rate}});
        e["channels"] = chans;
      }
      e["collection_op"] = cfg::matrix_to_json(*s.collection_op);
      e["collection_rate"] = s.collection_rate;
      e["initial_state"] = cfg::matrix_to_json(*s.initial_state);
    }
    srcs.push_back(e);
  }
  j["model"]["sources"] = srcs;

  j["circuit"]["kind"] = circuit.kind;
  if (circuit.kind == "haar") j["circuit"]["seed"] = circuit.seed;
  if (circuit.kind == "matrix") j["circuit"]["matrix"] = cfg::matrix_to_json(*circuit.matrix);

  if (!detectors.truncations.empty()) j["detectors"]["truncations"] = detectors.truncations;
  j["detectors"]["threshold"] = detectors.threshold;
  j["detectors"]["auto_truncate"] = detectors.auto_truncate;
  j["detectors"]["tail_tolerance"] = detectors.tail_tolerance;

  j["run"]["t0"] = run.t0;
  if (run.t1) j["run"]["t1"] = *run.t1;
  j["run"]["rtol"] = run.rtol;
  j["run"]["atol"] = run.atol;
  if (run.max_step) j["run"]["max_step"] = *run.max_step;
  j["run"]["workers"] = run.workers;
  j["run"]["conjugate_pairs"] = run.conjugate_pairs;

  json t;
  t["name"] = task_name(task);
  if (const auto* fom = std::get_if<FomTask>(&task)) {
    t["eta"] = fom->eta;
    t["mu_step"] = fom->mu_step;
    t["g2_step"] = fom->g2_step;
    t["cross_check_truncation"] = fom->cross_check_truncation;
  } else if (const auto* hom = std::get_if<HomTask>(&task)) {
    t["reference_detuning"] = hom->reference_detuning;
  } else if (const auto* tvd_task = std::get_if<TvdBenchmarkTask>(&task)) {
    t["seeds"] = tvd_task->seeds;
    t["taus"] = tvd_task->taus;
    t["truncation"] = tvd_task->truncation;
  } else if (const auto* bench = std::get_if<BenchScalingTask>(&task)) {
    t["n_max"] = bench->n_max;
    t["points_per_lifetime"] = bench->points_per_lifetime;
    t["accuracy"] = bench->accuracy;
    t["zpg_truncation"] = bench->zpg_truncation;
  }
  j["task"] = t;
  j["output"]["formats"] = formats;
  return j;
}

// ---------------------------------------------------------------------------
// Model assembly

inline SourceSpec build_source(const SourceConfig& s) {
  if (s.kind == "vacuum") return SourceSpec::vacuum();
  if (s.kind == "two_level") {
    TwoLevelParams p;
    p.gamma = s.gamma;
    p.detuning = s.detuning;
    p.start_excited = (s.initial == "excited");
    if (s.pulse) p.pulse = square_pulse(s.pulse->theta, s.pulse->tau, s.pulse->t_start);
    return two_level_source(p);
  }
  SourceSpec out;
  out.dim = s.dim;
  if (s.hamiltonian)
    out.hamiltonian_terms.push_back({*s.hamiltonian, DriveCoefficient::constant(1.0)});
  for (const auto& [op, rate] : s.channels) out.dissipation_channels.push_back({op, rate});
  out.collection_op = *s.collection_op;
  out.collection_rate = s.collection_rate;
  out.initial_state = *s.initial_state;
  return out;
}

inline Matrix build_circuit(const CircuitConfig& c, int modes) {
  if (c.kind == "identity") return Matrix::Identity(modes, modes);
  if (c.kind == "haar") return haar_unitary(modes, c.seed);
  require(c.matrix.has_value(), "circuit: matrix kind without matrix");
  return *c.matrix;
}

inline EmitterNetwork build_network(const ExperimentConfig& c) {
  std::vector<SourceSpec> sources;
  for (const SourceConfig& s : c.sources) sources.push_back(build_source(s));
  return EmitterNetwork(std::move(sources), build_circuit(c.circuit, static_cast<int>(c.sources.size())));
}

inline PropagationSettings build_settings(const RunConfig& run) {
  PropagationSettings s;
  s.t0 = run.t0;
  s.t1 = run.t1;
  s.rtol = run.rtol;
  s.atol = run.atol;
  if (run.max_step) s.max_step = *run.max_step;
  return s;
}

// ---------------------------------------------------------------------------
// Runner

struct ReportBundle {
  json summary;
  json manifest;
  std::string results_csv;  // empty when the task has no columnar output
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

class StageTimer {
 public:
  void start() { begin_ = std::chrono::steady_clock::now(); }
  double stop() {
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(end - begin_).count();
  }

 private:
  std::chrono::steady_clock::time_point begin_;
};

inline json distribution_to_json(const PhotonNumberDistribution& dist) {
  json out;
  out["truncations"] = dist.truncations();
  json probs = json::array();
  for (int flat = 0; flat < dist.size(); ++flat) {
    json row;
    row["n"] = dist.count_vector(flat);
    row["p"] = dist[flat];
    row["imag_residue"] = dist.imag_residue(flat);
    probs.push_back(row);
  }
  out["probs"] = probs;
  out["residue"] = dist.residue;
  out["tail_mass"] = dist.tail_mass;
  out["aliasing_failure"] = dist.aliasing_failure;
  return out;
}

inline std::string distribution_to_csv(const PhotonNumberDistribution& dist) {
  std::ostringstream csv;
  for (int j = 1; j <= dist.detectors(); ++j) csv << "n_" << j << ",";
  csv << "probability,residue\n";
  for (int flat = 0; flat < dist.size(); ++flat) {
    for (int n : dist.count_vector(flat)) csv << n << ",";
    csv << format_double(dist[flat]) << "," << format_double(dist.imag_residue(flat)) << "\n";
  }
  return csv.str();
}

inline std::string threshold_to_csv(const ThresholdDistribution& dist) {
  std::ostringstream csv;
  for (int j = 1; j <= dist.detectors; ++j) csv << "m_" << j << ",";
  csv << "probability\n";
  const int total = 1 << dist.detectors;
  for (int bits = 0; bits < total; ++bits) {
    for (int j = 0; j < dist.detectors; ++j) csv << ((bits >> (dist.detectors - 1 - j)) & 1) << ",";
    csv << format_double(dist.probs[static_cast<std::size_t>(bits)]) << "\n";
  }
  return csv.str();
}

}  // namespace detail

/// Executes the configured task and returns the results, a run manifest
/// (config echo, version, seeds, timings, diagnostics), and columnar data
/// where the task produces a distribution or a curve. Results depend only on
/// the config and seeds, never on the worker count; timings live in the
/// manifest only.
inline ReportBundle run_experiment(ExperimentConfig config,
                                   std::optional<std::uint64_t> seed_override = {},
                                   std::optional<int> workers_override = {}) {
  if (seed_override && config.circuit.kind == "haar") config.circuit.seed = *seed_override;
  if (workers_override) config.run.workers = *workers_override;

  ReportBundle report;
  json timings;
  detail::StageTimer timer;

  BatchOptions batch;
  batch.conjugate_pair_shortcut = config.run.conjugate_pairs;
  batch.workers = config.run.workers;
  const PropagationSettings settings = build_settings(config.run);

  if (std::holds_alternative<PnDistTask>(config.task)) {
    EmitterNetwork network = build_network(config);
    std::vector<int> truncations = config.detectors.truncations;
    if (truncations.empty())
      truncations.assign(static_cast<std::size_t>(network.modes()), 4);
    if (static_cast<int>(truncations.size()) != network.modes())
      throw ConfigError("detectors.truncations: length must match source count");
    timer.start();
    PhotonNumberDistribution dist = [&] {
      if (config.detectors.auto_truncate) {
        AutoTruncationOptions opts;
        opts.initial_truncations = truncations;
        opts.tail_tolerance = config.detectors.tail_tolerance;
        opts.batch = batch;
        return auto_truncated_distribution(network, settings, opts);
      }
      GeneratingTable table =
          batch_generating_solutions(network, fourier_grid(truncations), settings, batch);
      return invert_distribution(table);
    }();
    timings["solve_and_invert_s"] = timer.stop();
    if (dist.aliasing_failure)
      throw NumericalError("pn_dist: inversion residue above aliasing threshold");
    report.summary["task"] = "pn_dist";
    report.summary["distribution"] = detail::distribution_to_json(dist);
    report.results_csv = detail::distribution_to_csv(dist);
    report.manifest["diagnostics"] = {{"residue", dist.residue}, {"tail_mass", dist.tail_mass}};
    report.manifest["grid_size"] = [&] {
      int total = 1;
      for (int n : dist.truncations()) total *= n;
      return total;
    }();
  } else if (std::holds_alternative<ThresholdTask>(config.task)) {
    EmitterNetwork network = build_network(config);
    timer.start();
    GeneratingTable table = batch_generating_solutions(
        network, threshold_corner_grid(network.modes()), settings, batch);
    ThresholdDistribution dist = threshold_distribution(table);
    timings["solve_and_invert_s"] = timer.stop();
    report.summary["task"] = "threshold";
    json probs = json::array();
    const int total = 1 << dist.detectors;
    for (int bits = 0; bits < total; ++bits) {
      std::vector<int> m(static_cast<std::size_t>(dist.detectors));
      for (int j = 0; j < dist.detectors; ++j)
        m[static_cast<std::size_t>(j)] = (bits >> (dist.detectors - 1 - j)) & 1;
      probs.push_back({{"m", m}, {"p", dist.probs[static_cast<std::size_t>(bits)]}});
    }
    report.summary["beta"] = probs;
    report.summary["total"] = dist.sum();
    report.results_csv = detail::threshold_to_csv(dist);
    report.manifest["grid_size"] = total;
  } else if (const auto* fom = std::get_if<FomTask>(&config.task)) {
    EmitterNetwork network = build_network(config);
    timer.start();
    const FomEstimate mu = mean_photon_number(network, fom->eta, settings, fom->mu_step);
    const FomEstimate g = g2(network, settings, fom->g2_step);
    timings["finite_difference_s"] = timer.stop();
    report.summary["task"] = "fom";
    report.summary["mu"] = {{"value", mu.value}, {"error_gauge", mu.error_gauge}};
    report.summary["g2"] = {{"value", g.value}, {"error_gauge", g.error_gauge}};
    if (fom->cross_check_truncation > 1) {
      timer.start();
      GeneratingTable table = batch_generating_solutions(
          network, fourier_grid({fom->cross_check_truncation}), settings, batch);
      PhotonNumberDistribution dist = invert_distribution(table);
      const double mu_dist = dist.mean_total();
      const double g2_dist = dist.second_factorial_moment() / (mu_dist * mu_dist);
      timings["distribution_cross_check_s"] = timer.stop();
      report.summary["mu_from_distribution"] = mu_dist;
      report.summary["g2_from_distribution"] = g2_dist;
    }
  } else if (const auto* hom = std::get_if<HomTask>(&config.task)) {
    if (config.sources.size() != 1 && config.sources.size() != 2)
      throw ConfigError("hom task: model must declare one source (identical twin) or two");
    const SourceSpec source = build_source(config.sources.front());
    std::optional<SourceSpec> twin;
    if (config.sources.size() == 2) twin = build_source(config.sources.back());
    timer.start();
    const double raw = hom_coincidence(source, twin, settings);
    SourceConfig ref_cfg = config.sources.front();
    ref_cfg.detuning += hom->reference_detuning;
    const double reference = hom_coincidence(source, build_source(ref_cfg), settings);
    timings["hom_s"] = timer.stop();
    report.summary["task"] = "hom";
    report.summary["coincidence"] = raw;
    report.summary["distinguishable_reference"] = reference;
    report.summary["coincidence_ratio"] = (reference > 0.0) ? raw / reference : 0.0;
  } else if (const auto* tvd_task = std::get_if<TvdBenchmarkTask>(&config.task)) {
    for (const SourceConfig& s : config.sources)
      if (s.kind != "two_level" || !s.pulse.has_value())
        throw ConfigError("tvd_benchmark: all sources must be pulsed two-level emitters");
    const int modes = static_cast<int>(config.sources.size());
    std::vector<int> occupied(static_cast<std::size_t>(modes), 1);
    json rows = json::array();
    std::ostringstream csv;
    csv << "tau,seed,tvd\n";
    timer.start();
    for (double tau : tvd_task->taus) {
      for (std::uint64_t seed : tvd_task->seeds) {
        std::vector<SourceSpec> sources;
        for (const SourceConfig& sc : config.sources) {
          SourceConfig mod = sc;
          mod.pulse->tau = tau;
          sources.push_back(build_source(mod));
        }
        const Matrix u = haar_unitary(modes, seed);
        EmitterNetwork network(std::move(sources), u);
        GeneratingTable table = batch_generating_solutions(
            network,
            fourier_grid(std::vector<int>(static_cast<std::size_t>(modes), tvd_task->truncation)),
            settings, batch);
        PhotonNumberDistribution dist = invert_distribution(table);
        PhotonNumberDistribution ideal = ideal_interference_distribution(u, occupied);
        const double distance = tvd(dist, ideal);
        rows.push_back({{"tau", tau}, {"seed", seed}, {"tvd", distance}});
        csv << detail::format_double(tau) << "," << seed << ","
            << detail::format_double(distance) << "\n";
      }
    }
    timings["tvd_benchmark_s"] = timer.stop();
    report.summary["task"] = "tvd_benchmark";
    report.summary["rows"] = rows;
    report.results_csv = csv.str();
  } else if (const auto* bench = std::get_if<BenchScalingTask>(&config.task)) {
    EmitterNetwork network = build_network(config);
    json rows = json::array();
    std::ostringstream csv;
    csv << "mesh_points,evaluations,oracle_seconds,zpg_seconds\n";
    const std::vector<int> ladder = {bench->points_per_lifetime, 2 * bench->points_per_lifetime};
    for (int ppl : ladder) {
      QuadratureSettings quad;
      quad.points_per_lifetime = ppl;
      quad.n_max = bench->n_max;
      timer.start();
      RecursiveOracleResult oracle = recursive_pn(network, quad, settings);
      const double oracle_s = timer.stop();
      timer.start();
      GeneratingTable table = batch_generating_solutions(
          network, fourier_grid({bench->zpg_truncation}), settings, batch);
      PhotonNumberDistribution dist = invert_distribution(table);
      const double zpg_s = timer.stop();
      (void)dist;
      rows.push_back({{"mesh_points", oracle.mesh_points},
                      {"evaluations", oracle.evaluations},
                      {"oracle_seconds", oracle_s},
                      {"zpg_seconds", zpg_s}});
      csv << oracle.mesh_points << "," << oracle.evaluations << ","
          << detail::format_double(oracle_s) << "," << detail::format_double(zpg_s) << "\n";
    }
    report.summary["task"] = "bench_scaling";
    report.summary["rows"] = rows;
    report.results_csv = csv.str();
  }

  report.manifest["version"] = kVersion;
  report.manifest["config"] = config.to_json();
  report.manifest["workers"] = config.run.workers;
  report.manifest["timings"] = timings;
  if (config.circuit.kind == "haar") report.manifest["seed"] = config.circuit.seed;
  return report;
}

}  // namespace zpgsim

#endif  // ZPGSIM_EXPERIMENT_HPP
