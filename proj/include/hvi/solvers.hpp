#ifndef HVI_SOLVERS_HPP
#define HVI_SOLVERS_HPP

#include <optional>
#include <vector>

#include "hvi/core.hpp"
#include "hvi/gaps.hpp"
#include "hvi/schedules.hpp"

namespace hvi {

enum class Variant { oeg, tseng, sm_oeg, korpelevich };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct SolverConfig {
  Variant variant = Variant::oeg;
  ScheduleParams schedule;  // L constants are filled from the problem by run()
  long iterations = 1000;
  long log_every = 100;
  std::optional<Vector> z1;  // default: zero vector pulled into dom(g2) by g2.prox
  std::optional<AnchorSet> feas_anchors;
  std::optional<AnchorSet> opt_anchors;
  std::optional<Vector> energy_ref;  // enables the energy diagnostics
  std::optional<double> stop_tol_step;  // composite stop rule, default off
  std::optional<double> stop_tol_gap;
  double divergence_norm = 1e12;
  // invoked at every logged row with the new iterate, half iterate, and
  // ergodic average
  std::function<void(long k, const ScheduleState&, const Vector& z, const Vector& zh,
                     const Vector& zbar)>
      on_log;
};

struct TraceRow {
  long k = 0;
  double t = kNaN, sigma = kNaN, step_norm = kNaN;
  double feas_gap = kNaN, opt_gap = kNaN, dist = kNaN;
  double E = kNaN, D = kNaN, W = kNaN, resid = kNaN;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  Vector z_final;  // z^K
  Vector z_avg;    // ergodic average (t-weighted; t*sigma*gamma-weighted for sm_oeg)
  long iterations = 0;
  bool stopped_early = false;
  double wall_seconds = 0.0;
  // operator evaluation economy: setup = the one priming evaluation at z^1
  long f1_evals = 0, f2_evals = 0;
  long setup_f1_evals = 0, setup_f2_evals = 0;
  long prox_evals = 0;
  ScheduleState schedule_final;
  // energy diagnostics (populated when energy_ref given and the variant is
  // oeg/tseng; r_k should be <= 0 up to roundoff)
  std::vector<double> energy_residuals;
  double max_energy_resid = kNaN;
  double E1 = kNaN;
};

// Divergence guard tripped; carries the last finite iterate.
struct SolverDivergence : DivergenceError {
  SolverDivergence(const std::string& msg, long k, Vector last)
      : DivergenceError(msg, k), last_finite(std::move(last)) {}
  Vector last_finite;
};

RunTrace run(const HierarchicalProblem& p, const SolverConfig& cfg);

// Max residual of the energy recursion over a completed run.
double max_energy_residual(const RunTrace& trace);

}  // namespace hvi

#endif
