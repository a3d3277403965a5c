// Copyright 2026 The TRAP Authors
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

#include "trap/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "trap/errors.hpp"
#include "trap/qp.hpp"

namespace trap {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void read(const json& doc, const char* key, T& target) {
  if (!doc.contains(key)) return;
  try {
    target = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_trap(const json& doc, TrapParams& p) {
  static const char* known[] = {"delta0", "sigma1", "sigma2", "sigma3", "eta1", "eta2", "epsilon",
                                "max_iters", "radius_policy", "nu0", "nu1", "nu2", "nu3", "nu4", "nu5",
                                "max_backtracks", "sigma", "xi", "gamma1", "gamma2",
                                "max_cg_iters", "precondition"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown trap key '" + key + "'");
  }
  read(doc, "delta0", p.delta0);
  read(doc, "sigma1", p.sigma1);
  read(doc, "sigma2", p.sigma2);
  read(doc, "sigma3", p.sigma3);
  read(doc, "eta1", p.eta1);
  read(doc, "eta2", p.eta2);
  read(doc, "epsilon", p.epsilon);
  read(doc, "max_iters", p.max_iters);
  if (doc.contains("radius_policy")) {
    std::string policy;
    read(doc, "radius_policy", policy);
    if (policy == "endpoint") {
      p.radius_policy = RadiusPolicy::kEndpoint;
    } else if (policy == "step_aware") {
      p.radius_policy = RadiusPolicy::kStepAware;
    } else {
      throw ConfigError("radius_policy must be 'endpoint' or 'step_aware'");
    }
  }
  read(doc, "nu0", p.cauchy.nu0);
  read(doc, "nu1", p.cauchy.nu1);
  read(doc, "nu2", p.cauchy.nu2);
  read(doc, "nu3", p.cauchy.nu3);
  read(doc, "nu4", p.cauchy.nu4);
  read(doc, "nu5", p.cauchy.nu5);
  read(doc, "max_backtracks", p.cauchy.max_backtracks);
  read(doc, "sigma", p.refine.sigma);
  read(doc, "xi", p.refine.xi);
  read(doc, "gamma1", p.refine.gamma1);
  read(doc, "gamma2", p.refine.gamma2);
  read(doc, "max_cg_iters", p.refine.max_cg_iters);
  read(doc, "precondition", p.refine.precondition);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunOutcome {
  OuterReport report;
  std::string error;
  bool success = false;
};

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const char* known[] = {"problem", "case", "formulation", "outer", "rho0", "factor",
                                "outer_tol", "max_outer", "require_inner_kkt", "start",
                                "schedule", "seed", "repeat", "qp_dimension", "qp_bounded",
                                "trap", "output_dir"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  read(doc, "problem", cfg.problem);
  read(doc, "case", cfg.case_path);
  std::string form = "polar";
  read(doc, "formulation", form);
  if (form == "polar") {
    cfg.formulation = Formulation::kPolar;
  } else if (form == "rect") {
    cfg.formulation = Formulation::kRectangular;
  } else {
    throw ConfigError("formulation must be 'polar' or 'rect'");
  }
  read(doc, "outer", cfg.outer);
  read(doc, "rho0", cfg.rho0);
  read(doc, "factor", cfg.factor);
  read(doc, "outer_tol", cfg.outer_tol);
  read(doc, "max_outer", cfg.max_outer);
  read(doc, "require_inner_kkt", cfg.require_inner_kkt);
  read(doc, "start", cfg.start);
  read(doc, "schedule", cfg.schedule);
  read(doc, "seed", cfg.seed);
  read(doc, "repeat", cfg.repeat);
  read(doc, "qp_dimension", cfg.qp_dimension);
  read(doc, "qp_bounded", cfg.qp_bounded);
  read(doc, "output_dir", cfg.output_dir);
  if (doc.contains("trap")) {
    if (!doc["trap"].is_object()) throw ConfigError("'trap' must be an object");
    read_trap(doc["trap"], cfg.trap);
  }
  if (!base_dir.empty()) {
    if (!cfg.case_path.empty() && fs::path(cfg.case_path).is_relative()) {
      cfg.case_path = (fs::path(base_dir) / cfg.case_path).lexically_normal().string();
    }
    if (!cfg.output_dir.empty() && fs::path(cfg.output_dir).is_relative()) {
      cfg.output_dir = (fs::path(base_dir) / cfg.output_dir).lexically_normal().string();
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), fs::path(path).parent_path().string());
}

void ExperimentConfig::validate() const {
  if (problem != "opf" && problem != "qp") throw ConfigError("problem must be 'opf' or 'qp'");
  if (problem == "opf") {
    if (case_path.empty()) throw ConfigError("'case' is required for problem 'opf'");
    if (!fs::exists(case_path)) throw ConfigError("case file not found: " + case_path);
  }
  if (outer != "al" && outer != "lancelot") throw ConfigError("outer must be 'al' or 'lancelot'");
  if (start != "flat" && start != "random") throw ConfigError("start must be 'flat' or 'random'");
  if (schedule != "colored" && schedule != "single") throw ConfigError("schedule must be 'colored' or 'single'");
  if (!(rho0 > 0.0)) throw ConfigError("rho0 must be positive");
  if (!(factor > 1.0)) throw ConfigError("factor must exceed 1");
  if (!(outer_tol > 0.0)) throw ConfigError("outer_tol must be positive");
  if (max_outer < 1 || max_outer > 1000) throw ConfigError("max_outer must lie in [1, 1000]");
  if (repeat < 1 || repeat > 100000) throw ConfigError("repeat must lie in [1, 100000]");
  if (qp_dimension < 1 || qp_dimension > 200) throw ConfigError("qp_dimension must lie in [1, 200]");
  if (qp_bounded < 0 || qp_bounded > qp_dimension) throw ConfigError("qp_bounded must lie in [0, qp_dimension]");
  if (output_dir.empty()) throw ConfigError("'output_dir' is required");
  try {
    trap.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::string describe_case(const NetworkCase& network) {
  std::ostringstream out;
  out << network.buses.size() << " buses, " << network.branches.size() << " branches, "
      << network.gens.size() << " generators, baseMVA " << network.base_mva
      << ", reference bus " << network.buses[network.reference].id;
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  std::unique_ptr<NetworkCase> network;
  std::unique_ptr<EqualityNlp> problem;
  std::unique_ptr<BoxQpWithSolution> qp;
  const OpfProblem* opf = nullptr;
  if (cfg.problem == "opf") {
    network = std::make_unique<NetworkCase>(parse_case_file(cfg.case_path));
    auto built = std::make_unique<OpfProblem>(*network, cfg.formulation);
    opf = built.get();
    problem = std::move(built);
  } else {
    qp = std::make_unique<BoxQpWithSolution>(box_qp_with_solution(cfg.seed, cfg.qp_dimension, cfg.qp_bounded));
  }

  OuterParams op;
  op.rho0 = cfg.rho0;
  op.factor = cfg.factor;
  op.outer_tol = cfg.outer_tol;
  op.max_outer = cfg.max_outer;
  op.require_inner_kkt = cfg.require_inner_kkt;
  op.inner = cfg.trap;

  ExperimentResult result;
  std::ostringstream trace, runs;
  trace << "run,outer," << trace_csv_header() << '\n';
  runs << "run,seed,success,outer_iterations,objective,constraint_norm,total_scg,termination\n";
  std::string table, ledger_csv, first_error;
  Vector first_x;

  for (int run = 0; run < cfg.repeat; ++run) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(run);
    RunOutcome out;
    std::unique_ptr<CommLedger> ledger;
    try {
      if (opf) {
        const Vector x0 = cfg.start == "flat" ? opf_flat_start(*opf) : opf_random_start(*opf, seed);
        OuterOptions oo;
        const CouplingGraph coupling = lagrangian_coupling(*opf);
        oo.partition = cfg.schedule == "single" ? Partition::single_color(opf->node_sizes())
                                                : opf_coloring(opf->layout(), *network);
        ledger = std::make_unique<CommLedger>(coupling);
        oo.ledger = ledger.get();
        out.report = cfg.outer == "al" ? auglag_outer(*opf, x0, op, oo) : lancelot_outer(*opf, x0, op, oo);
        out.success = out.report.constraint_norm <= cfg.outer_tol &&
                      out.report.termination == OuterTermination::kConverged;
      } else {
        const QuadraticProblem& p = qp->problem;
        TrapOptions to;
        to.partition = cfg.schedule == "single" ? Partition::single_color(p.node_sizes())
                                                : greedy_coloring(p.coupling(), p.node_sizes());
        ledger = std::make_unique<CommLedger>(p.coupling());
        to.ledger = ledger.get();
        to.outer_index = 1;
        const TrapReport tr = trap_solve(p, qp->x0, cfg.trap, to);
        OuterRow row;
        row.outer = 1;
        row.inner_iters = tr.iterations;
        row.cum_scg = tr.cumulative_cg;
        row.inner_kkt = tr.kkt;
        row.constraint_norm = 0.0;
        row.inner_termination = tr.termination;
        out.report.rows.push_back(row);
        out.report.inner_traces.push_back(tr.records);
        out.report.x = tr.x;
        out.report.objective = tr.objective;
        out.report.total_scg = tr.cumulative_cg;
        out.report.termination = tr.termination == TrapTermination::kKktTol ? OuterTermination::kConverged
                                                                           : OuterTermination::kMaxOuter;
        out.success = tr.termination == TrapTermination::kKktTol;
      }
    } catch (const SolverError& e) {
      out.error = e.what();
    }
    if (out.success) ++result.successes;
    if (run == 0) {
      table = table_csv(out.report);
      ledger_csv = ledger ? ledger->to_csv() : std::string();
      first_error = out.error;
      result.objective = out.report.objective;
      result.constraint_norm = out.report.constraint_norm;
      result.total_scg = out.report.total_scg;
      result.outer_iterations = static_cast<int>(out.report.rows.size());
      first_x = out.report.x;
    }
    for (size_t j = 0; j < out.report.inner_traces.size(); ++j) {
      for (const auto& rec : out.report.inner_traces[j]) {
        trace << run << ',' << j + 1 << ',' << trace_csv_row(rec) << '\n';
      }
    }
    runs << run << ',' << seed << ',' << (out.success ? 1 : 0) << ',' << out.report.rows.size() << ','
         << fmt(out.report.objective) << ',' << fmt(out.report.constraint_norm) << ','
         << out.report.total_scg << ','
         << (out.error.empty() ? outer_termination_name(out.report.termination) : "error") << '\n';
    log << "run " << run << ": " << (out.success ? "success" : "failure")
        << ", outer " << out.report.rows.size() << ", objective " << fmt(out.report.objective)
        << ", ||c|| " << fmt(out.report.constraint_norm)
        << (out.error.empty() ? "" : ", error: " + out.error) << '\n';
  }
  result.runs = cfg.repeat;

  json summary;
  summary["problem"] = cfg.problem;
  summary["case"] = cfg.problem == "opf" ? fs::path(cfg.case_path).filename().string() : std::string("box_qp");
  summary["formulation"] = formulation_name(cfg.formulation);
  summary["outer"] = cfg.outer;
  summary["schedule"] = cfg.schedule;
  summary["seed"] = cfg.seed;
  summary["objective"] = result.objective;
  summary["constraint_norm"] = result.constraint_norm;
  summary["total_scg"] = result.total_scg;
  summary["outer_iterations"] = result.outer_iterations;
  summary["runs"] = result.runs;
  summary["successes"] = result.successes;
  summary["success_rate"] = static_cast<double>(result.successes) / result.runs;
  if (!first_error.empty()) summary["error"] = first_error;
  if (opf && first_x.size() == static_cast<Eigen::Index>(opf->layout().num_vars)) {
    summary["dispatch_mw"] = generator_dispatch_mw(*opf, first_x);
  }

  write_file(dir / "table.csv", table);
  write_file(dir / "trace.csv", trace.str());
  write_file(dir / "ledger.csv", ledger_csv);
  write_file(dir / "runs.csv", runs.str());
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  const bool ok = cfg.repeat == 1 ? result.successes == 1 : result.successes > 0;
  result.exit_code = ok ? 0 : 1;
  result.message = ok ? "ok" : (first_error.empty() ? "did not converge" : first_error);
  return result;
}

std::string compare_runs(const std::string& dir_a, const std::string& dir_b) {
  const json sa = json::parse(read_file(fs::path(dir_a) / "summary.json"));
  const json sb = json::parse(read_file(fs::path(dir_b) / "summary.json"));
  if (sa.at("problem") != sb.at("problem") || sa.at("case") != sb.at("case") ||
      sa.at("formulation") != sb.at("formulation")) {
    throw InvalidArgument("compare_runs: bundles come from different problems");
  }
  struct Row {
    double kkt, L;
    long active, scg;
  };
  auto load = [](const std::string& dir) {
    std::map<std::pair<int, int>, Row> rows;
    std::istringstream in(read_file(fs::path(dir) / "trace.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      if (f.size() < 11 || f[0] != "0") continue;
      rows[{std::stoi(f[1]), std::stoi(f[2])}] =
          Row{std::stod(f[6]), std::stod(f[8]), std::stol(f[9]), std::stol(f[10])};
    }
    return rows;
  };
  const auto a = load(dir_a);
  const auto b = load(dir_b);
  std::map<std::pair<int, int>, std::pair<const Row*, const Row*>> merged;
  for (const auto& [k, r] : a) merged[k].first = &r;
  for (const auto& [k, r] : b) merged[k].second = &r;
  std::ostringstream out;
  out << "outer,iter,kkt_a,kkt_b,kkt_delta,L_a,L_b,L_delta,active_a,active_b,active_delta,"
         "cum_scg_a,cum_scg_b,cum_scg_delta\n";
  for (const auto& [k, pr] : merged) {
    const Row* x = pr.first;
    const Row* y = pr.second;
    out << k.first << ',' << k.second << ',';
    auto both = [&](double u, double v, bool has_u, bool has_v) {
      out << (has_u ? fmt(u) : "") << ',' << (has_v ? fmt(v) : "") << ','
          << (has_u && has_v ? fmt(v - u) : "");
    };
    both(x ? x->kkt : 0, y ? y->kkt : 0, x, y);
    out << ',';
    both(x ? x->L : 0, y ? y->L : 0, x, y);
    out << ',';
    both(x ? x->active : 0, y ? y->active : 0, x, y);
    out << ',';
    both(x ? x->scg : 0, y ? y->scg : 0, x, y);
    out << '\n';
  }
  return out.str();
}

}  // namespace trap
