#include "hvi/solvers.hpp"

#include <chrono>
#include <cmath>

namespace hvi {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::oeg: return "oeg";
    case Variant::tseng: return "tseng";
    case Variant::sm_oeg: return "sm_oeg";
    case Variant::korpelevich: return "korpelevich";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "oeg") return Variant::oeg;
  if (name == "tseng") return Variant::tseng;
  if (name == "sm_oeg") return Variant::sm_oeg;
  if (name == "korpelevich") return Variant::korpelevich;
  throw ConfigError("unknown variant: " + name);
}

RunTrace run(const HierarchicalProblem& p, const SolverConfig& cfg) {
  ScheduleParams sp = cfg.schedule;
  sp.L_f2 = p.data.f2.lipschitz;
  sp.L_f1 = p.data.f1.lipschitz;
  if (cfg.variant == Variant::sm_oeg) {
    sp.step_mode = StepMode::strong_mono;
    if (!(sp.mu > 0.0)) sp.mu = p.data.f1.strong_mono;
    if (!(sp.mu > 0.0))
      throw ConfigError(
          "sm_oeg requires a strongly monotone F1 (mu > 0); use the oeg variant");
  } else {
    sp.step_mode = StepMode::constant_monotone;
  }
  sp.validate();

  Vector z = cfg.z1 ? *cfg.z1 : p.data.g2.prox(1.0, Vector::Zero(p.dim));
  require_dim(z, p.dim, "initial point");
  require_finite(z, "initial point");

  const bool korp = (cfg.variant == Variant::korpelevich);
  const bool energy_capable =
      cfg.variant == Variant::oeg || cfg.variant == Variant::tseng;
  bool energy = false;
  Vector zr;
  if (cfg.energy_ref && !korp) {  // the recursion is for the one-call schemes
    zr = *cfg.energy_ref;
    require_dim(zr, p.dim, "energy reference");
    if (!p.data.g1.in_domain(zr) || !p.data.g2.in_domain(zr))
      throw ConfigError("energy reference must lie in dom(g1) and dom(g2)");
    energy = true;
  }

  RunTrace trace;
  auto t_start = std::chrono::steady_clock::now();

  CombinedEval cache;
  if (!korp) {
    cache = eval_operator_pair(p.data, z);  // z^{1/2} = z^1 priming evaluation
    trace.setup_f1_evals = trace.setup_f2_evals = 1;
  }
  if (energy) trace.energy_residuals.reserve((size_t)cfg.iterations);

  ScheduleState sched;
  Vector erg_num = Vector::Zero(p.dim);
  double erg_den = 0.0;
  double D = 0.0;  // D_1 = 0
  double max_resid = -kInf;

  auto ergodic = [&]() -> Vector { return erg_den > 0.0 ? Vector(erg_num / erg_den) : z; };

  for (long k = 1; k <= cfg.iterations; ++k) {
    schedule_advance(sp, sched);
    const double t = sched.t, sg = sched.sigma;

    double Ek = kNaN;
    if (energy) {
      Ek = 0.5 * (z - zr).squaredNorm();
      if (k == 1) trace.E1 = Ek;
    }

    Vector v_old, zh, v_new, z_next;
    if (korp) {
      CombinedEval at_z = eval_operator_pair(p.data, z);
      trace.f1_evals++;
      trace.f2_evals++;
      v_old = at_z.with_sigma(sg);
      zh = p.data.prox(t, sg, z - t * v_old);
      trace.prox_evals++;
      if (!zh.allFinite())
        throw SolverDivergence("non-finite half iterate at k=" + std::to_string(k), k, z);
      CombinedEval fresh = eval_operator_pair(p.data, zh);
      trace.f1_evals++;
      trace.f2_evals++;
      v_new = fresh.with_sigma(sg);
      z_next = p.data.prox(t, sg, z - t * v_new);
      trace.prox_evals++;
    } else {
      // cached raw pair re-weighted with the current sigma: V_k(z^{k-1/2})
      v_old = cache.with_sigma(sg);
      zh = p.data.prox(t, sg, z - t * v_old);
      trace.prox_evals++;
      if (!zh.allFinite())
        throw SolverDivergence("non-finite half iterate at k=" + std::to_string(k), k, z);
      CombinedEval fresh = eval_operator_pair(p.data, zh);
      trace.f1_evals++;
      trace.f2_evals++;
      v_new = fresh.with_sigma(sg);
      if (cfg.variant == Variant::tseng) {
        // z^{k+1} may leave dom(g); kept as-is, the prox acts at the half step
        z_next = zh - t * (v_new - v_old);
      } else {
        z_next = p.data.prox(t, sg, z - t * v_new);
        trace.prox_evals++;
      }
      cache = fresh;
    }

    const double step_norm = (zh - z).norm();

    double resid = kNaN;
    const double D_row = D;  // D_k, before this iteration's update
    if (energy && energy_capable) {
      double D_next = 0.5 * t * t * (v_old - v_new).squaredNorm();
      double G_zh = p.data.g2.value(zh) + sg * p.data.g1.value(zh);
      double G_zr = p.data.g2.value(zr) + sg * p.data.g1.value(zr);
      double Psi = v_new.dot(zh - zr) + G_zh - G_zr;
      double E_next = 0.5 * (z_next - zr).squaredNorm();
      resid = (E_next + D_next) - (Ek + D - t * Psi - 0.25 * step_norm * step_norm);
      trace.energy_residuals.push_back(resid);
      max_resid = std::max(max_resid, resid);
      D = D_next;
    } else if (energy && cfg.variant == Variant::sm_oeg) {
      // strong-mode rows still carry E/D/W; the monotone recursion does not apply
      D = 0.5 * t * t * (v_old - v_new).squaredNorm();
    }

    const double w = (cfg.variant == Variant::sm_oeg) ? t * sg * sched.gamma : t;
    erg_num += w * zh;
    erg_den += w;

    if (!z_next.allFinite() || z_next.norm() > cfg.divergence_norm)
      throw SolverDivergence("iterate diverged (|z| > guard) at k=" + std::to_string(k), k, z);
    z = std::move(z_next);

    bool log_now = (cfg.log_every > 0 && k % cfg.log_every == 0) || k == cfg.iterations;
    bool stop_now = false;
    if (cfg.stop_tol_step && step_norm <= *cfg.stop_tol_step) {
      stop_now = true;  // confirmed against gaps below when anchors exist
      log_now = true;
    }
    if (log_now) {
      TraceRow row;
      row.k = k;
      row.t = t;
      row.sigma = sg;
      row.step_norm = step_norm;
      Vector zbar = ergodic();
      if (cfg.on_log) cfg.on_log(k, sched, z, zh, zbar);
      if (cfg.feas_anchors) row.feas_gap = feas_gap(p, *cfg.feas_anchors, zbar);
      if (cfg.opt_anchors) row.opt_gap = opt_gap(p, *cfg.opt_anchors, zbar);
      if (p.solution_point) row.dist = (zbar - *p.solution_point).norm();
      if (energy) {
        row.E = Ek;
        row.D = D_row;
        row.W = Ek + D_row;
        row.resid = resid;
      }
      trace.rows.push_back(row);
      if (stop_now && cfg.stop_tol_gap) {
        bool gaps_ok = true;
        if (cfg.feas_anchors) gaps_ok = gaps_ok && row.feas_gap <= *cfg.stop_tol_gap;
        if (cfg.opt_anchors) gaps_ok = gaps_ok && row.opt_gap <= *cfg.stop_tol_gap;
        stop_now = gaps_ok;
      }
    }
    trace.iterations = k;
    if (stop_now) {
      trace.stopped_early = true;
      break;
    }
  }

  trace.z_final = z;
  trace.z_avg = ergodic();
  trace.schedule_final = sched;
  if (energy && energy_capable) trace.max_energy_resid = max_resid;
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return trace;
}

double max_energy_residual(const RunTrace& trace) {
  if (trace.energy_residuals.empty())
    throw ConfigError("run has no energy diagnostics");
  return trace.max_energy_resid;
}

}  // namespace hvi
