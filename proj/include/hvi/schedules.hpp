#ifndef HVI_SCHEDULES_HPP
#define HVI_SCHEDULES_HPP

#include <optional>

#include "hvi/errors.hpp"

namespace hvi {

enum class StepMode { constant_monotone, strong_mono };

// sigma_k = a/(k+b)^delta plus the step rule appropriate to the regime.
// delta = 1 is accepted and flagged as the limiting case.
struct ScheduleParams {
  double a = 1.0;
  double b = 1.0;
  double delta = 0.5;
  StepMode step_mode = StepMode::constant_monotone;
  double mu = 0.0;      // strong mode only
  double L_f2 = 0.0;    // declared Lipschitz constants, filled from the problem
  double L_f1 = 0.0;
  std::optional<double> explicit_t;

  void validate() const;
  bool limiting_delta() const { return delta == 1.0; }
};

double sigma_poly(long k, double a, double b, double delta);

// t = 1/(sqrt(8) * (L_F2 + sigma_1*L_F1)); satisfies 8 t^2 L_k^2 <= 1 for all
// k since sigma_k is nonincreasing.
double step_constant_monotone(double L_f2, double L_f1, double sigma1);

struct StrongStep {
  double t, sigma, gamma;
};

// sigma_k = 4 L_F2/(mu k), t_k = 1/(4(L_F2 + sigma_k(L_F1 + mu))),
// gamma_k = (k + kappa)/kappa with kappa = 4(L_F1 + mu)/mu (closed form of
// the running product 1/prod(1 - t_i sigma_i mu)).
StrongStep schedule_strong(long k, double L_f2, double L_f1, double mu);

// Sufficient condition for the summability assumption under the polynomial
// schedule and (alpha, rho)-weak sharpness: 1 > delta > 1 - 1/rho.
bool check_ac_sufficient(double delta, double rho);

// Per-run mutable schedule state with the running sums the solvers and
// diagnostics need.
struct ScheduleState {
  long k = 0;  // last emitted index
  double t = 0.0, sigma = 0.0, L = 0.0, gamma = 1.0;
  double sum_t = 0.0;               // T_K
  double sum_t_sigma = 0.0;         // sum t_i sigma_i
  double sum_t_sigma_gamma = 0.0;   // sum t_i sigma_i gamma_i
  double sum_t_sigma2_gamma = 0.0;  // sum t_i sigma_i^2 gamma_i
};

// Emit step k = state.k + 1 and update the running sums.
void schedule_advance(const ScheduleParams& p, ScheduleState& state);

}  // namespace hvi

#endif
