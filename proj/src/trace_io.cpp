#include "hvi/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hvi/gaps.hpp"
#include "hvi/schedules.hpp"

namespace hvi {

namespace {
void put(std::ostream& os, double v) {
  if (std::isnan(v))
    os << "nan";
  else
    os << std::setprecision(17) << v;
}
}  // namespace

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "# hvi trace v1\n" << kTraceHeader << "\n";
  for (const TraceRow& r : trace.rows) {
    os << r.k;
    for (double v : {r.t, r.sigma, r.step_norm, r.feas_gap, r.opt_gap, r.dist, r.E, r.D,
                     r.W, r.resid}) {
      os << ',';
      put(os, v);
    }
    os << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const RunTrace& trace) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open trace file for writing: " + path);
  write_trace_csv(os, trace);
}

std::vector<TraceRow> parse_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# hvi trace v1", 0) != 0)
    throw ConfigError("trace: missing version header");
  if (!std::getline(is, line) || line != kTraceHeader)
    throw ConfigError("trace: unexpected column header");
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) throw ConfigError("trace: malformed row '" + line + "'");
    TraceRow r;
    r.k = std::stol(cells[0]);
    double* fields[10] = {&r.t, &r.sigma, &r.step_norm, &r.feas_gap, &r.opt_gap,
                          &r.dist, &r.E, &r.D, &r.W, &r.resid};
    for (int i = 0; i < 10; ++i)
      *fields[i] = (cells[i + 1] == "nan") ? kNaN : std::stod(cells[i + 1]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> parse_trace_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open trace file: " + path);
  return parse_trace_csv(is);
}

std::string render_report(const Config& cfg, const HierarchicalProblem& p,
                          const RunTrace& trace, const ReportExtras* extras) {
  std::ostringstream o;
  o.precision(12);
  o << "# hvi report v1\n";
  o << "problem: " << p.name << "\n";
  o << "variant: " << variant_name(cfg.variant) << "\n";
  o << "iterations: " << trace.iterations << "\n";
  o << "stopped_early: " << (trace.stopped_early ? "true" : "false") << "\n";
  o << "wall_seconds: " << trace.wall_seconds << "\n";
  o << "f1_evals_in_loop: " << trace.f1_evals << "\n";
  o << "f2_evals_in_loop: " << trace.f2_evals << "\n";
  o << "setup_f_evals: " << trace.setup_f1_evals << "\n";
  o << "prox_evals: " << trace.prox_evals << "\n";
  o << "t_final: " << trace.schedule_final.t << "\n";
  o << "sigma_final: " << trace.schedule_final.sigma << "\n";
  o << "T_K: " << trace.schedule_final.sum_t << "\n";
  o << "z_final:";
  for (Eigen::Index i = 0; i < trace.z_final.size(); ++i) o << " " << trace.z_final[i];
  o << "\n";
  o << "z_avg:";
  for (Eigen::Index i = 0; i < trace.z_avg.size(); ++i) o << " " << trace.z_avg[i];
  o << "\n";
  if (p.solution_point) {
    o << "dist_to_truth_avg: " << (trace.z_avg - *p.solution_point).norm() << "\n";
    o << "dist_to_truth_final: " << (trace.z_final - *p.solution_point).norm() << "\n";
  }
  if (p.lower_set) {
    o << "dist_zfinal_S2: " << dist_to_segment(*p.lower_set, trace.z_final) << "\n";
    o << "dist_zavg_S2: " << dist_to_segment(*p.lower_set, trace.z_avg) << "\n";
  }
  if (!trace.rows.empty()) {
    const TraceRow& last = trace.rows.back();
    if (!std::isnan(last.feas_gap)) o << "feas_gap_avg: " << last.feas_gap << "\n";
    if (!std::isnan(last.opt_gap)) o << "opt_gap_avg: " << last.opt_gap << "\n";
    std::vector<double> ks, feas, opt;
    for (const TraceRow& r : trace.rows) {
      ks.push_back((double)r.k);
      feas.push_back(r.feas_gap);
      opt.push_back(r.opt_gap);
    }
    auto slope_of = [&](const std::vector<double>& v) -> std::string {
      try {
        std::ostringstream s;
        s.precision(12);
        s << rate_slope(ks, v, ks.front(), ks.back());
        return s.str();
      } catch (const ConfigError&) {
        return "nan";
      }
    };
    if (!std::isnan(last.feas_gap)) o << "rate_slope_feas: " << slope_of(feas) << "\n";
    if (!std::isnan(last.opt_gap)) o << "rate_slope_opt: " << slope_of(opt) << "\n";
  }
  if (!std::isnan(trace.max_energy_resid)) {
    o << "max_energy_resid: " << trace.max_energy_resid << "\n";
    o << "energy_recursion_ok: "
      << (trace.max_energy_resid <= 1e-8 * (1.0 + trace.E1) ? "true" : "false") << "\n";
  }
  if (cfg.delta == 1.0) o << "flag: delta=1 limiting case\n";
  if (p.weak_sharp) {
    bool ok = check_ac_sufficient(cfg.delta, p.weak_sharp->rho);
    o << "ac_sufficient: " << (ok ? "true" : "false") << " (delta=" << cfg.delta
      << ", rho=" << p.weak_sharp->rho << ")\n";
  } else {
    o << "ac_sufficient: unknown (no declared weak-sharpness)\n";
  }
  if (extras)
    for (const auto& [k, v] : extras->lines) o << k << ": " << v << "\n";
  o << "config_echo_begin\n" << serialize_config(cfg) << "config_echo_end\n";
  return o.str();
}

std::string report_config_echo(const std::string& report_text) {
  const std::string begin = "config_echo_begin\n", end = "config_echo_end";
  size_t a = report_text.find(begin);
  size_t b = report_text.find(end);
  if (a == std::string::npos || b == std::string::npos || b < a)
    throw ConfigError("report: config echo block not found");
  a += begin.size();
  return report_text.substr(a, b - a);
}

}  // namespace hvi
