// Copyright 2026 The dedvpe Authors.
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

// dedvpe: solve, audit, export and benchmark dispatch instances.
//
// Exit codes: 0 success, 1 solver failure or failed audit, 2 infeasible,
// 3 stopped at a limit with a schedule, 4 input error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dedvpe/branch_and_bound.h"
#include "dedvpe/cost.h"
#include "dedvpe/errors.h"
#include "dedvpe/feasibility.h"
#include "dedvpe/hybrid.h"
#include "dedvpe/instance_io.h"
#include "dedvpe/milp_builder.h"
#include "dedvpe/mps_writer.h"
#include "dedvpe/nlp_ipm.h"
#include "dedvpe/report.h"
#include "dedvpe/schedule_io.h"

#ifndef DEDVPE_DATA_DIR
#define DEDVPE_DATA_DIR "data"
#endif

namespace dedvpe {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;
constexpr int kExitInput = 4;

// Thrown for bad flag combinations found after parsing.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  std::string instance;
  std::string method = "hybrid";
  std::string loss;     // on, off; empty means off
  std::string reserve;  // on, off, or empty for the file's setting
  int segments = 4;
  double gap = 0.003;
  double tol = 1e-8;
  double time_limit = 600.0;
  long long node_limit = 20000;
  int threads = 1;
  std::string out;
  int round = -1;
  std::string start = "flat";
  double cpu_ghz = kBaseCpuGhz;
  bool quiet = false;
};

bool Flag(const std::string& value, bool fallback) {
  if (value.empty()) return fallback;
  return value == "on";
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

BnbConfig MakeBnbConfig(const SolveOptions& o) {
  BnbConfig cfg;
  cfg.rel_gap = o.gap;
  cfg.time_limit_seconds = o.time_limit;
  cfg.node_limit = o.node_limit;
  cfg.threads = o.threads;
  if (!o.quiet) {
    cfg.progress = [](const BnbProgress& p) {
      std::cerr << std::fixed << std::setprecision(1) << p.elapsed_seconds
                << "s nodes " << p.nodes << " open " << p.open_nodes
                << std::setprecision(4) << " bound " << p.best_bound
                << " incumbent " << p.incumbent << " gap " << p.gap << "\n";
    };
    cfg.progress_interval_seconds = 5.0;
  }
  return cfg;
}

double MaxDeltaP(const AuditReport& a) { return a.max_balance_violation; }

void PrintChanges(const ChangeStatistics& c) {
  std::cout << "unchanged_fraction " << format_double(c.unchanged_fraction())
            << "\n";
  std::cout << "change_buckets 0:" << c.unchanged;
  double lo = 0.0;
  for (size_t k = 0; k < c.counts.size(); ++k) {
    std::cout << " (" << format_double(lo) << ",";
    if (k < c.edges.size()) {
      std::cout << format_double(c.edges[k]) << "]:" << c.counts[k];
      lo = c.edges[k];
    } else {
      std::cout << "inf):" << c.counts[k];
    }
  }
  std::cout << "\n";
}

int RunSolve(const SolveOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Instance inst = read_instance_file(o.instance);
  const bool loss = Flag(o.loss, false);
  const bool reserve = Flag(o.reserve, inst.reserve_enabled);
  if (loss && !inst.has_loss()) {
    throw InputError("--loss on needs a [bmatrix] section");
  }
  if (reserve && !inst.reserve_req.has_value()) {
    throw InputError("--reserve on needs a [reserve] section");
  }
  const Instance audited = audited_instance(inst, loss, reserve);

  IpmConfig ipm;
  ipm.tol = o.tol;
  ipm.compl_tol = o.tol;

  RunSummary summary;
  summary.instance = instance_hash(inst);
  summary.method = o.method;
  summary.given_ghz = o.cpu_ghz;
  ScheduleFile file;
  std::optional<Schedule> schedule;
  int code = kExitOk;

  if (o.method == "milp") {
    MilpModel model = build_milp(inst, o.segments, reserve);
    BnbResult r = solve_milp(model, MakeBnbConfig(o));
    summary.status = ToString(r.status);
    std::cout << "bnb_status " << ToString(r.status) << "\n"
              << "nodes " << r.nodes << "\n"
              << "best_bound " << format_double(r.best_bound) << "\n";
    if (!r.incumbent) return kExitInfeasible;
    schedule = r.incumbent;
    std::cout << "pwl_objective " << format_double(r.incumbent_objective)
              << "\n";
    summary.gap = r.gap;
    file.gap = r.gap;
    if (r.status == BnbStatus::kLimit) code = kExitLimit;
  } else if (o.method == "hybrid") {
    HybridConfig cfg;
    cfg.segments = o.segments;
    cfg.include_loss = loss;
    cfg.reserve = reserve;
    cfg.bnb = MakeBnbConfig(o);
    cfg.ipm = ipm;
    HybridReport r = solve_hybrid(inst, cfg);
    summary.status = ToString(r.status);
    std::cout << "bnb_status " << ToString(r.step1.status) << "\n"
              << "nodes " << r.step1.nodes << "\n"
              << "best_bound " << format_double(r.step1.best_bound) << "\n";
    if (r.status == HybridStatus::kInfeasible) return kExitInfeasible;
    std::cout << "step1_cost " << format_double(r.step1_cost) << "\n"
              << "ipm_status " << ToString(r.step2->status) << "\n"
              << "ipm_iterations " << r.step2->iterations << "\n";
    PrintChanges(r.changes);
    schedule = r.schedule;
    summary.gap = r.step1.gap;
    file.gap = r.step1.gap;
    file.step1_seconds = r.step1_seconds;
    file.step2_seconds = r.step2_seconds;
    if (r.status == HybridStatus::kFallback) code = kExitFailure;
    else if (r.step1.status == BnbStatus::kLimit) code = kExitLimit;
  } else if (o.method == "ipm") {
    const ColdStart cs = o.start == "proportional" ? ColdStart::kProportional
                                                   : ColdStart::kFlatMidpoint;
    IpmResult r = solve_single_ipm(inst, loss, reserve, ipm, cs);
    summary.status = ToString(r.status);
    std::cout << "ipm_status " << ToString(r.status) << "\n"
              << "ipm_iterations " << r.iterations << "\n";
    schedule = r.schedule;
    if (r.status == IpmStatus::kMaxIterations) code = kExitLimit;
    else if (r.status != IpmStatus::kLocalOptimum) code = kExitFailure;
  }

  const AuditReport checked = audit(audited, *schedule);
  if (!checked.pass && code == kExitOk) code = kExitFailure;
  summary.cost = total_cost(inst, *schedule);
  summary.max_delta_p = MaxDeltaP(checked);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  summary.minutes = seconds / 60.0;
  std::cout << "audit " << (checked.pass ? "pass" : "fail") << "\n";
  std::cout << report(summary);

  if (!o.out.empty()) {
    ScheduleFile sf = make_schedule_file(inst, *schedule, loss, reserve);
    sf.instance_hash = summary.instance;
    sf.method = o.method;
    sf.objective = summary.cost;
    sf.gap = file.gap;
    sf.step1_seconds = file.step1_seconds;
    sf.step2_seconds = file.step2_seconds;
    sf.total_seconds = seconds;
    WriteFile(o.out, serialize_schedule(sf, o.round));
  }
  return code;
}

int RunAudit(const std::string& schedule_path, const std::string& instance_path,
             double tol) {
  const Instance inst = read_instance_file(instance_path);
  const ScheduleFile file = read_schedule_file(schedule_path);
  Tolerances t;
  t.balance = tol;
  const ScheduleCheck check = check_schedule(inst, file, t);
  std::cout << "# t loss dP\n";
  for (int p = 0; p < inst.num_periods(); ++p) {
    std::cout << p + 1 << " " << format_double(check.audit.loss[p]) << " "
              << format_double(check.audit.balance_violation[p]) << "\n";
  }
  std::cout << "cost " << format_double(check.cost) << "\n"
            << "max_delta_p " << format_double(check.audit.max_balance_violation)
            << "\n"
            << "max_bound_violation "
            << format_double(check.audit.max_bound_violation) << "\n"
            << "max_ramp_violation "
            << format_double(check.audit.max_ramp_violation) << "\n"
            << "max_reserve_shortfall "
            << format_double(check.audit.max_reserve_shortfall) << "\n"
            << "hash " << (check.hash_matches ? "match" : "mismatch") << "\n";
  if (!file.loss_column.empty()) {
    std::cout << "max_loss_column_mismatch "
              << format_double(check.max_loss_mismatch) << "\n"
              << "max_delta_p_column_mismatch "
              << format_double(check.max_delta_p_mismatch) << "\n";
  }
  if (file.objective.has_value()) {
    std::cout << "objective_mismatch " << format_double(check.objective_mismatch)
              << "\n";
  }
  std::cout << "audit " << (check.pass ? "pass" : "fail") << "\n";
  return check.pass ? kExitOk : kExitFailure;
}

int RunExport(const std::string& instance_path, int segments,
              const std::string& reserve_flag, const std::string& out) {
  const Instance inst = read_instance_file(instance_path);
  const bool reserve = Flag(reserve_flag, inst.reserve_enabled);
  MilpModel model = build_milp(inst, segments, reserve);
  const std::string text = export_mps(model.lp);
  if (out.empty()) std::cout << text;
  else WriteFile(out, text);
  return kExitOk;
}

struct BenchCase {
  const char* label;
  const char* file;
  double gap;
  double ref_hybrid_no_loss;
  double ref_milp;
  double ref_hybrid_loss;
  double ref_ipm_loss;
};

int RunBench(double time_limit, long long node_limit, int threads,
             double cpu_ghz, const std::string& data_dir) {
  const BenchCase cases[] = {
      {"5-unit", "ded5.txt", 0.032, 42524, 42563, 43084, 43443},
      {"10-unit", "ded10.txt", 0.01, 1016311, 0, 1040676, 1047294},
  };
  std::cout << "# costs in $, times in minutes; S-time scales by "
            << format_double(cpu_ghz) << "/" << format_double(kBaseCpuGhz)
            << " GHz\n";
  std::cout << "# the internal B&B has no cutting planes; matching the "
               "reference CPLEX times is not a goal\n";
  std::printf("%-8s %-22s %14s %14s %9s %9s %9s\n", "system", "method",
              "cost", "reference", "rel.diff", "minutes", "S-time");
  auto row = [&](const char* sys, const std::string& method, double cost,
                 double ref, double seconds) {
    const double minutes = seconds / 60.0;
    std::printf("%-8s %-22s %14.2f ", sys, method.c_str(), cost);
    if (ref > 0) {
      std::printf("%14.0f %8.3f%% ", ref, 100.0 * (cost - ref) / ref);
    } else {
      std::printf("%14s %9s ", "-", "-");
    }
    std::printf("%9.3f %9.3f\n", minutes,
                scaled_minutes(minutes, kBaseCpuGhz, cpu_ghz));
  };
  for (const BenchCase& c : cases) {
    const Instance inst = read_instance_file(data_dir + "/" + c.file);
    HybridConfig cfg;
    cfg.bnb.rel_gap = c.gap;
    cfg.bnb.time_limit_seconds = time_limit;
    cfg.bnb.node_limit = node_limit;
    cfg.bnb.threads = threads;
    const auto start = std::chrono::steady_clock::now();
    MilpModel model = build_milp(inst, cfg.segments, false);
    const BnbResult step1 = solve_milp(model, cfg.bnb);
    const double t1 = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    if (!step1.incumbent) {
      std::cout << c.label << " infeasible\n";
      return kExitInfeasible;
    }
    row(c.label, "MILP (" + ToString(step1.status) + ")",
        total_cost(inst, *step1.incumbent), c.ref_milp, t1);
    cfg.include_loss = false;
    HybridReport plain = refine_hybrid(inst, step1, t1, cfg);
    row(c.label, "MILP-IPM, no loss", plain.cost, c.ref_hybrid_no_loss,
        plain.total_seconds);
    cfg.include_loss = true;
    HybridReport lossy = refine_hybrid(inst, step1, t1, cfg);
    row(c.label, "MILP-IPM, loss", lossy.cost, c.ref_hybrid_loss,
        lossy.total_seconds);
    for (ColdStart cs : {ColdStart::kFlatMidpoint, ColdStart::kProportional}) {
      const auto s = std::chrono::steady_clock::now();
      IpmResult r = solve_single_ipm(inst, true, false, {}, cs);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - s)
              .count();
      row(c.label, "IPM " + ToString(cs) + ", loss",
          total_cost(inst, r.schedule), c.ref_ipm_loss, secs);
    }
    std::printf("%-8s gap %.4f nodes %lld unchanged-with-loss %.2f%%\n",
                c.label, step1.gap, step1.nodes,
                100.0 * lossy.changes.unchanged_fraction());
  }
  return kExitOk;
}

}  // namespace
}  // namespace dedvpe

int main(int argc, char** argv) {
  using namespace dedvpe;
  CLI::App app{"Dynamic economic dispatch with valve-point effects"};
  app.require_subcommand(1);

  SolveOptions so;
  CLI::App* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("instance", so.instance, "Instance file")->required();
  solve->add_option("--method", so.method, "hybrid, milp or ipm")
      ->check(CLI::IsMember({"hybrid", "milp", "ipm"}))
      ->capture_default_str();
  solve->add_option("--loss", so.loss, "on|off (default: off)")
      ->check(CLI::IsMember({"on", "off"}));
  solve->add_option("--reserve", so.reserve, "on|off (default: from file)")
      ->check(CLI::IsMember({"on", "off"}));
  solve->add_option("--segments", so.segments, "Chords per half period, M")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--gap", so.gap, "Relative B&B gap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve->add_option("--tol", so.tol, "IPM KKT tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--time-limit", so.time_limit, "B&B seconds, 0 for none")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve->add_option("--node-limit", so.node_limit, "B&B nodes, 0 for none")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve->add_option("--threads", so.threads, "B&B workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--out", so.out, "Schedule file to write");
  solve->add_option("--round", so.round,
                    "Decimals in the dispatch table (default: full precision)")
      ->check(CLI::Range(0, 12));
  solve->add_option("--start", so.start, "IPM cold start: flat or proportional")
      ->check(CLI::IsMember({"flat", "proportional"}))
      ->capture_default_str();
  solve->add_option("--cpu-ghz", so.cpu_ghz, "CPU speed for S-time")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_flag("--quiet", so.quiet, "No B&B progress on stderr");

  std::string audit_schedule, audit_instance;
  double audit_tol = 1e-5;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Re-audit a schedule file against an instance");
  audit_cmd->add_option("schedule", audit_schedule)->required();
  audit_cmd->add_option("instance", audit_instance)->required();
  audit_cmd->add_option("--tol", audit_tol, "Balance tolerance, MW")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string mps_instance, mps_out, mps_reserve;
  int mps_segments = 4;
  CLI::App* mps = app.add_subcommand("export-mps", "Write the MILP as MPS");
  mps->add_option("instance", mps_instance)->required();
  mps->add_option("--segments", mps_segments)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mps->add_option("--reserve", mps_reserve)->check(CLI::IsMember({"on", "off"}));
  mps->add_option("--out", mps_out, "Output file (default: stdout)");

  double bench_time = 600.0;
  long long bench_nodes = 20000;
  int bench_threads = 1;
  double bench_ghz = kBaseCpuGhz;
  std::string bench_data = DEDVPE_DATA_DIR;
  CLI::App* bench =
      app.add_subcommand("bench", "Run the shipped benchmarks and compare");
  bench->add_option("--time-limit", bench_time)->capture_default_str();
  bench->add_option("--node-limit", bench_nodes)->capture_default_str();
  bench->add_option("--threads", bench_threads)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--cpu-ghz", bench_ghz)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--data", bench_data, "Fixture directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return RunSolve(so);
    if (*audit_cmd) return RunAudit(audit_schedule, audit_instance, audit_tol);
    if (*mps) return RunExport(mps_instance, mps_segments, mps_reserve, mps_out);
    if (*bench) {
      return RunBench(bench_time, bench_nodes, bench_threads, bench_ghz,
                      bench_data);
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BuildError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
