// hvi: hierarchical hemi-variational inequality solver CLI.
// Subcommands: run | sweep | compare | check. Exit codes: 0 ok,
// 1 check/assertion failure, 2 divergence, 3 configuration error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hvi/check_suite.hpp"
#include "hvi/config.hpp"
#include "hvi/problems.hpp"
#include "hvi/trace_io.hpp"

namespace fs = std::filesystem;
using namespace hvi;

namespace {

int log_level() {
  const char* v = std::getenv("HVI_LOG");
  return v ? std::atoi(v) : 0;
}

void info(const std::string& msg) {
  if (log_level() > 0) std::cerr << "[hvi] " << msg << "\n";
}

struct Overrides {
  std::string out;
  long k = -1;
  double delta = -1;
  long seed = -1;
};

Config load_config(const std::string& path, const Overrides& ov) {
  Config c = parse_config_file(path);
  if (!ov.out.empty()) c.out_dir = ov.out;
  if (ov.k >= 0) c.iterations = ov.k;
  if (ov.delta > 0) c.delta = ov.delta;
  if (ov.seed >= 0) c.seed = (uint64_t)ov.seed;
  c.validate();
  return c;
}

struct GaveCheckpoint {
  long k;
  double sigma, ave_resid, max_dev, dist_x_oracle;
};

int cmd_run(const std::string& config_path, const Overrides& ov) {
  Config cfg = load_config(config_path, ov);
  GaveSpec gs;
  HierarchicalProblem p =
      cfg.problem == "gave" ? build_gave(cfg.n, cfg.normalize, &gs) : build_problem(cfg);
  SolverConfig sc = solver_config_from(cfg, p);

  std::vector<GaveCheckpoint> gave_rows;
  Vector gave_oracle;
  if (cfg.problem == "gave") {
    gave_oracle = gave_picard_oracle(gs.A, gs.b);
    sc.on_log = [&](long k, const ScheduleState& st, const Vector& z, const Vector&,
                    const Vector&) {
      Vector u = gave_dual_recovery(gs, z, st.sigma);
      double dev = 0;
      for (int i = 0; i < gs.n; ++i)
        dev = std::max(dev, std::abs(u[i] - gs.analytic_u(gs.grid[i])));
      gave_rows.push_back({k, st.sigma, gave_residual(gs.A, gs.b, u), dev,
                           (z.head(gs.n) - gave_oracle).norm()});
    };
  }

  info("running " + p.name + " with " + variant_name(cfg.variant));
  RunTrace trace = run(p, sc);

  fs::create_directories(cfg.out_dir);
  write_trace_csv_file((fs::path(cfg.out_dir) / "trace.csv").string(), trace);

  ReportExtras extras;
  if (cfg.problem == "gave") {
    extras.lines.push_back({"gave_oracle_residual",
                            std::to_string(gave_residual(gs.A, gs.b, gave_oracle))});
    Vector x = trace.z_final.head(gs.n);
    extras.lines.push_back({"gave_xblock_residual", std::to_string(gave_residual(gs.A, gs.b, x))});
    double devx = 0;
    for (int i = 0; i < gs.n; ++i)
      devx = std::max(devx, std::abs(x[i] - gs.analytic_u(gs.grid[i])));
    extras.lines.push_back({"gave_xblock_max_dev", std::to_string(devx)});
    if (!gave_rows.empty()) {
      const auto& last = gave_rows.back();
      extras.lines.push_back({"gave_dual_recovery_residual", std::to_string(last.ave_resid)});
      extras.lines.push_back({"gave_dual_recovery_max_dev", std::to_string(last.max_dev)});
      std::ostringstream tab;
      tab << "k sigma ave_resid max_dev dist_x_oracle";
      extras.lines.push_back({"gave_residual_table_header", tab.str()});
      std::ofstream rt(fs::path(cfg.out_dir) / "gave_residuals.csv");
      rt << "k,sigma,ave_resid,max_dev,dist_x_oracle\n";
      rt.precision(17);
      for (const auto& r : gave_rows)
        rt << r.k << ',' << r.sigma << ',' << r.ave_resid << ',' << r.max_dev << ','
           << r.dist_x_oracle << "\n";
    }
  }

  std::string report = render_report(cfg, p, trace, &extras);
  std::ofstream rep(fs::path(cfg.out_dir) / "report.txt");
  rep << report;
  std::cout << report;
  return 0;
}

int cmd_sweep(const std::string& config_path, const Overrides& ov,
              std::vector<double> deltas) {
  Config base = load_config(config_path, ov);
  if (deltas.empty()) deltas = {base.delta};
  std::sort(deltas.begin(), deltas.end());

  struct SweepRow {
    double delta;
    double feas_slope = kNaN, opt_slope = kNaN;
    bool limiting = false;
    RunTrace trace;
  };
  std::vector<std::future<SweepRow>> futs;
  for (double d : deltas) {
    futs.push_back(std::async(std::launch::async, [base, d]() {
      Config c = base;
      c.delta = d;
      c.validate();
      HierarchicalProblem p = build_problem(c);
      SolverConfig sc = solver_config_from(c, p);
      SweepRow row;
      row.delta = d;
      row.limiting = (d == 1.0);
      row.trace = run(p, sc);
      std::vector<double> ks, feas, opt;
      for (const TraceRow& r : row.trace.rows) {
        ks.push_back((double)r.k);
        feas.push_back(r.feas_gap);
        opt.push_back(r.opt_gap);
      }
      double lo = std::max(1000.0, (double)c.iterations / 100.0);
      try {
        row.feas_slope = rate_slope(ks, feas, lo, (double)c.iterations);
      } catch (const ConfigError&) {
      }
      try {
        row.opt_slope = rate_slope(ks, opt, lo, (double)c.iterations);
      } catch (const ConfigError&) {
      }
      return row;
    }));
  }

  std::vector<SweepRow> rows;
  for (auto& f : futs) rows.push_back(f.get());

  fs::create_directories(base.out_dir);
  std::ofstream longcsv(fs::path(base.out_dir) / "sweep_long.csv");
  longcsv << "# hvi sweep v1\ndelta,k,t,sigma,step_norm,feas_gap,opt_gap,dist\n";
  longcsv.precision(17);
  for (const auto& row : rows)
    for (const TraceRow& r : row.trace.rows)
      longcsv << row.delta << ',' << r.k << ',' << r.t << ',' << r.sigma << ','
              << r.step_norm << ',' << r.feas_gap << ',' << r.opt_gap << ',' << r.dist
              << "\n";

  std::ostringstream rep;
  rep.precision(12);
  rep << "# hvi sweep report v1\n";
  rep << "problem: " << base.problem << "\n";
  rep << "iterations: " << base.iterations << "\n";
  rep << "delta feas_slope opt_slope flags\n";
  for (const auto& row : rows) {
    rep << row.delta << " " << row.feas_slope << " " << row.opt_slope;
    if (row.limiting) rep << " limiting_case";
    rep << "\n";
  }
  std::ofstream repf(fs::path(base.out_dir) / "sweep_report.txt");
  repf << rep.str();
  std::cout << rep.str();
  return 0;
}

int cmd_compare(const std::string& config_path, const Overrides& ov) {
  Config base = load_config(config_path, ov);
  HierarchicalProblem p = build_problem(base);
  struct Entry {
    Variant v;
    RunTrace trace;
  };
  std::vector<Entry> entries;
  for (Variant v : {Variant::oeg, Variant::tseng, Variant::korpelevich}) {
    Config c = base;
    c.variant = v;
    SolverConfig sc = solver_config_from(c, p);
    entries.push_back({v, run(p, sc)});
    info(std::string("compare: finished ") + variant_name(v));
  }
  std::ostringstream rep;
  rep.precision(12);
  rep << "# hvi compare report v1\nproblem: " << base.problem
      << "\niterations: " << base.iterations << "\n";
  for (const auto& e : entries) {
    rep << variant_name(e.v) << ": f_evals=" << e.trace.f1_evals
        << " prox_evals=" << e.trace.prox_evals << " wall=" << e.trace.wall_seconds;
    if (p.solution_point)
      rep << " dist_avg=" << (e.trace.z_avg - *p.solution_point).norm();
    if (!e.trace.rows.empty() && !std::isnan(e.trace.rows.back().feas_gap))
      rep << " feas_gap=" << e.trace.rows.back().feas_gap;
    rep << "\n";
  }
  double maxdiff = 0;
  for (size_t i = 0; i < entries.size(); ++i)
    for (size_t j = i + 1; j < entries.size(); ++j)
      maxdiff = std::max(maxdiff,
                         (entries[i].trace.z_final - entries[j].trace.z_final).norm());
  rep << "pairwise_final_maxdiff: " << maxdiff << "\n";

  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return entries[a].trace.wall_seconds < entries[b].trace.wall_seconds;
  });
  rep << "by_wall_time:";
  for (size_t i : order) rep << " " << variant_name(entries[i].v);
  rep << "\n";

  long oeg_evals = entries[0].trace.f1_evals;
  long korp_evals = entries[2].trace.f1_evals;
  bool economy_ok = (korp_evals == 2 * oeg_evals);
  rep << "evaluation_economy: oeg=" << oeg_evals << " korpelevich=" << korp_evals
      << (economy_ok ? " ok" : " VIOLATED") << "\n";

  fs::create_directories(base.out_dir);
  std::ofstream repf(fs::path(base.out_dir) / "compare_report.txt");
  repf << rep.str();
  std::cout << rep.str();
  return economy_ok ? 0 : 1;
}

int cmd_check(const std::string& config_path, const Overrides& ov,
              const std::string& inject_fault) {
  Config cfg = load_config(config_path, ov);
  auto results = run_check_suite(cfg.seed, inject_fault);
  std::ostringstream rep;
  int failures = 0;
  rep << "# hvi check report v1\nseed: " << cfg.seed << "\n";
  for (const auto& r : results) {
    rep << (r.passed ? "[ok]   " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) rep << "  " << r.detail;
    rep << "\n";
    if (!r.passed) ++failures;
  }
  rep << "failures: " << failures << "\n";
  fs::create_directories(cfg.out_dir);
  std::ofstream repf(fs::path(cfg.out_dir) / "check_report.txt");
  repf << rep.str();
  std::cout << rep.str();
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical hemi-variational inequality solver"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  std::vector<double> deltas;
  std::string inject_fault;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "config file")->required();
    sub->add_option("--out", ov.out, "output directory override");
    sub->add_option("--k", ov.k, "iteration budget override");
    sub->add_option("--seed", ov.seed, "seed override");
  };

  CLI::App* s_run = app.add_subcommand("run", "single solver run");
  add_common(s_run);
  s_run->add_option("--delta", ov.delta, "schedule delta override");

  CLI::App* s_sweep = app.add_subcommand("sweep", "one run per delta");
  add_common(s_sweep);
  s_sweep->add_option("--delta", deltas, "delta values")->delimiter(',');

  CLI::App* s_cmp = app.add_subcommand("compare", "oeg vs tseng vs korpelevich");
  add_common(s_cmp);

  CLI::App* s_chk = app.add_subcommand("check", "invariant suites");
  add_common(s_chk);
  s_chk->add_option("--inject-fault", inject_fault, "inject a known-bad component");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s_run->parsed()) return cmd_run(config_path, ov);
    if (s_sweep->parsed()) return cmd_sweep(config_path, ov, deltas);
    if (s_cmp->parsed()) return cmd_compare(config_path, ov);
    if (s_chk->parsed()) return cmd_check(config_path, ov, inject_fault);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const SolverDivergence& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
