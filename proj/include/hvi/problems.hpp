#ifndef HVI_PROBLEMS_HPP
#define HVI_PROBLEMS_HPP

#include <functional>
#include <string>

#include "hvi/core.hpp"

namespace hvi {

// Fixed 4-player hierarchical game instance. The fourth lower-level cost as
// printed carries a repeated quadratic cross term whose reading changes one
// pseudogradient coefficient; the build report documents both readings and
// the finite-difference cross-check (the implemented reading is the monotone
// one, under which the equilibrium segment is exact).
struct GnepBuildReport {
  double fd_max_err_implemented = 0.0;  // FD of the implemented costs vs coded F2
  double fd_gap_alternate = 0.0;        // FD of the alternate reading vs coded F2
  double min_eig_sym_implemented = 0.0;
  double min_eig_sym_alternate = 0.0;
  Vector f2_at_equilibrium;
  std::string note;
};

HierarchicalProblem build_gnep(GnepBuildReport* report = nullptr);

struct GaveSpec {
  int n = 0;
  double h = 0.0;
  Matrix A;     // five-point stencil of -u'' with boundary closures, scaled 1/(12h^2)
  Matrix B;     // identity
  Vector b;     // f(x_i) plus boundary corrections, f(x) = x^2 - 1
  Matrix M;     // [I, -(B-A)^T, -I], the lower-level coupling
  Vector grid;  // interior nodes x_i = i*h
  double scale_f1 = 1.0;  // operators are divided by these when normalized
  double scale_f2 = 1.0;  // (||A+B|| and ||M||^2 estimates)
  std::function<double(double)> analytic_u;
};

// z = (x, y, w) in R^{3n}. normalize_operators rescales F1 and F2 to unit
// declared Lipschitz constants (solution sets are invariant under positive
// rescaling of either level's operator).
HierarchicalProblem build_gave(int n, bool normalize_operators = true,
                               GaveSpec* out = nullptr);

// Solves A x + |x| = b by fixed-point iteration x <- (A+I)^{-1}(b + x - |x|).
Vector gave_picard_oracle(const Matrix& A, const Vector& b, double tol = 1e-13,
                          int max_iters = 1000);

double gave_residual(const Matrix& A, const Vector& b, const Vector& x);

// Recovers the AVE variable from the dual block:  -(B-A)^T y / (sigma * c)
// with c = ||M||^2 / L_F1 in the problem's stored scales.
Vector gave_dual_recovery(const GaveSpec& spec, const Vector& z, double sigma);

struct MinMaxSpec {
  Matrix K;                       // coupling
  OperatorSpec grad_f1, grad_f2;  // on the x- and y-blocks
  ProxTerm phi, psi;
  Matrix A, B;  // constraint matrices, A: X->Z, B: Y->Z
  Vector c;
  Eigen::Index nx = 0, ny = 0;
};

HierarchicalProblem build_minmax(const MinMaxSpec& spec);

HierarchicalProblem build_simple_bilevel(OperatorSpec grad_f1, ProxTerm g1,
                                         OperatorSpec grad_f2, ProxTerm g2,
                                         Eigen::Index dim);

// GNEP cost functions, exposed for the finite-difference oracles in tests.
double gnep_lower_cost(int player, const Vector& y, bool duplicated_reading);
double gnep_upper_cost(int player, const Vector& y);

}  // namespace hvi

#endif
