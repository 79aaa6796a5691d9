#include "hvi/schedules.hpp"

#include <cmath>
#include <string>

namespace hvi {

void ScheduleParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0))
    throw ConfigError("schedule: a and b must be positive");
  if (!(delta > 0.0) || delta > 1.0)
    throw ConfigError("schedule: delta must lie in (0, 1]");
  if (L_f2 < 0.0 || L_f1 < 0.0)
    throw ConfigError("schedule: Lipschitz constants must be nonnegative");
  if (step_mode == StepMode::strong_mono) {
    if (!(mu > 0.0))
      throw ConfigError("schedule: strong_mono mode requires mu > 0");
    if (!(L_f2 > 0.0))
      throw ConfigError("schedule: strong_mono mode requires L_F2 > 0");
  } else {
    if (L_f2 + sigma_poly(1, a, b, delta) * L_f1 <= 0.0 && !explicit_t)
      throw ConfigError(
          "schedule: combined Lipschitz constant is zero (degenerate); "
          "supply explicit_t");
  }
  if (explicit_t && !(*explicit_t > 0.0))
    throw ConfigError("schedule: explicit_t must be positive");
}

double sigma_poly(long k, double a, double b, double delta) {
  if (k < 1) throw ConfigError("sigma_poly: k must be >= 1");
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("sigma_poly: a, b must be positive");
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("sigma_poly: delta must lie in (0, 1]");
  return a / std::pow(static_cast<double>(k) + b, delta);
}

double step_constant_monotone(double L_f2, double L_f1, double sigma1) {
  double L1 = L_f2 + sigma1 * L_f1;
  if (!(L1 > 0.0))
    throw ConfigError("step_constant_monotone: zero combined Lipschitz constant");
  return 1.0 / (std::sqrt(8.0) * L1);
}

StrongStep schedule_strong(long k, double L_f2, double L_f1, double mu) {
  if (!(mu > 0.0)) throw ConfigError("schedule_strong: mu must be positive");
  if (!(L_f2 > 0.0)) throw ConfigError("schedule_strong: L_F2 must be positive");
  if (k < 1) throw ConfigError("schedule_strong: k must be >= 1");
  StrongStep s;
  s.sigma = 4.0 * L_f2 / (mu * static_cast<double>(k));
  s.t = 1.0 / (4.0 * (L_f2 + s.sigma * (L_f1 + mu)));
  double kappa = 4.0 * (L_f1 + mu) / mu;
  s.gamma = (static_cast<double>(k) + kappa) / kappa;
  return s;
}

bool check_ac_sufficient(double delta, double rho) {
  if (rho < 1.0) throw ConfigError("check_ac_sufficient: rho must be >= 1");
  if (!(delta > 0.0) || delta > 1.0)
    throw ConfigError("check_ac_sufficient: delta must lie in (0, 1]");
  return delta < 1.0 && delta > 1.0 - 1.0 / rho;
}

void schedule_advance(const ScheduleParams& p, ScheduleState& st) {
  long k = st.k + 1;
  if (p.step_mode == StepMode::strong_mono) {
    StrongStep s = schedule_strong(k, p.L_f2, p.L_f1, p.mu);
    st.t = s.t;
    st.sigma = s.sigma;
    st.gamma = s.gamma;
  } else {
    st.sigma = sigma_poly(k, p.a, p.b, p.delta);
    if (p.explicit_t)
      st.t = *p.explicit_t;
    else if (k == 1)
      st.t = step_constant_monotone(p.L_f2, p.L_f1, st.sigma);
    st.gamma = 1.0;
  }
  st.L = p.L_f2 + st.sigma * p.L_f1;
  st.k = k;
  st.sum_t += st.t;
  st.sum_t_sigma += st.t * st.sigma;
  st.sum_t_sigma_gamma += st.t * st.sigma * st.gamma;
  st.sum_t_sigma2_gamma += st.t * st.sigma * st.sigma * st.gamma;
}

}  // namespace hvi
