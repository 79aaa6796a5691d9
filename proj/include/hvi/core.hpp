#ifndef HVI_CORE_HPP
#define HVI_CORE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hvi/vec.hpp"

namespace hvi {

// A monotone map F: R^n -> R^n with declared Lipschitz constant and
// strong-monotonicity modulus (0 if merely monotone). Declared constants are
// inputs to the step rules; they are spot-checked, not enforced per call.
struct OperatorSpec {
  std::function<Vector(const Vector&)> eval;
  double lipschitz = 0.0;
  double strong_mono = 0.0;
};

OperatorSpec affine_operator(const Matrix& M, const Vector& q);
OperatorSpec zero_operator(Eigen::Index dim);

// ||M||_2 by power iteration on M^T M.
double spectral_norm_power(const Matrix& M, int iters = 200, double tol = 1e-10);

// One-dimensional convex piecewise-linear function plus an interval
// indicator. Closed under nonnegative weighted sums, which is what the
// combined prox of g2 + sigma*g1 needs coordinatewise.
struct Pwl1D {
  double lower = -kInf;
  double upper = kInf;
  std::vector<double> breaks;  // strictly increasing, inside (lower, upper)
  std::vector<double> slopes;  // breaks.size()+1 entries, nondecreasing
  double anchor = 0.0;         // point where the PL part evaluates to anchor_value
  double anchor_value = 0.0;

  double value(double x) const;       // +inf outside [lower, upper]
  double prox(double step, double u) const;  // exact, breakpoint scan then clamp

  static Pwl1D box(double lo, double hi);
  static Pwl1D zero();
  static Pwl1D abs_term(double weight);
  // weight * max(slope*(x-knee), 0) restricted to [lo, hi]
  static Pwl1D hinge_box(double weight, double slope, double knee, double lo, double hi);
  static Pwl1D weighted_sum(double a, const Pwl1D& f, double b, const Pwl1D& g);
};

// A proper convex lsc function given by prox oracle, pointwise value
// (extended real, never NaN) and domain test. `zero` / `separable` are
// structure flags consumed by default_combined_prox.
struct ProxTerm {
  std::function<Vector(double step, const Vector&)> prox;
  std::function<double(const Vector&)> value;
  std::function<bool(const Vector&)> in_domain;
  bool zero = false;
  std::shared_ptr<const std::vector<Pwl1D>> separable;
};

ProxTerm zero_prox_term();
ProxTerm box_prox_term(const Vector& lo, const Vector& hi);
ProxTerm separable_prox_term(std::vector<Pwl1D> terms);

// Componentwise clamp of u into [lower, upper]; hard error if lower > upper.
Vector prox_box(const Vector& lower, const Vector& upper, const Vector& u);
double prox_box1(double lower, double upper, double u);

// Exact minimizer of step*(lam*max{slope*(x-knee),0} + i_[lower,upper]) + (x-u)^2/2.
double prox_hinge_box(double lam, double slope, double knee, double lower,
                      double upper, double step, double u);

// Tikhonov-combined data V_sigma = F2 + sigma*F1, G_sigma = g2 + sigma*g1.
struct CombinedData {
  OperatorSpec f2, f1;
  ProxTerm g2, g1;
  // prox of step*(g2 + sigma*g1); empty => default_combined_prox
  std::function<Vector(double step, double sigma, const Vector&)> combined_prox;

  Vector prox(double step, double sigma, const Vector& u) const;
};

// Both raw evaluations, so callers can re-weight a cached pair with a
// different sigma without re-evaluating.
struct CombinedEval {
  Vector f2, f1;
  Vector with_sigma(double sigma) const { return f2 + sigma * f1; }
};

CombinedEval eval_operator_pair(const CombinedData& data, const Vector& z);
Vector eval_combined_operator(const CombinedData& data, double sigma, const Vector& z);

inline double combined_lipschitz(double L2, double L1, double sigma) {
  return L2 + sigma * L1;
}

// prox of step*(g2 + sigma*g1) under a registered composition pattern:
// (a) g1 == 0, (b) g2 == 0, (c) both coordinatewise-separable Pwl1D.
Vector default_combined_prox(const ProxTerm& g2, const ProxTerm& g1, double step,
                             double sigma, const Vector& u);

// {base + s*direction : s in [lo, hi]}
struct SegmentSet {
  Vector base;
  Vector direction;  // nonzero
  double lo = 0.0, hi = 1.0;
};

struct WeakSharpness {
  double alpha = 1.0;  // > 0
  double rho = 1.0;    // >= 1
};

struct HierarchicalProblem {
  CombinedData data;
  Eigen::Index dim = 0;
  std::optional<Vector> solution_point;   // known z*, if any
  std::optional<SegmentSet> lower_set;    // parametric S2 descriptor, if any
  std::optional<WeakSharpness> weak_sharp;
  // box used by randomized spot-checks and the weak-sharpness probe
  Vector sample_lo, sample_hi;
  std::string name;
};

}  // namespace hvi

#endif
