#include "hvi/problems.hpp"

#include <cmath>

namespace hvi {

// ---------------- GNEP ----------------
//
// Lower-level costs h^l_nu(y) = 0.5*y_nu^2 + y_nu * <coupling>, with box and
// hinge terms in g2; upper level is a two-player game over the blocks
// (y2, y4) and (y1, y3).

double gnep_lower_cost(int player, const Vector& y, bool duplicated_reading) {
  double y1 = y[0], y2 = y[1], y3 = y[2], y4 = y[3];
  switch (player) {
    case 1: return 0.5 * y1 * y1 + y1 * (y2 + 2 * y3 + y4 - 100);
    case 2: return 0.5 * y2 * y2 + y2 * (y1 + y3 + y4 - 50);
    case 3: return 0.5 * y3 * y3 + y3 * (y2 + y4 - 100);
    case 4: {
      double cross = duplicated_reading ? (y1 + y2 + y2 + y3 - 50) : (y1 + y2 + y3 - 50);
      return 0.5 * y4 * y4 + y4 * cross;
    }
  }
  throw ConfigError("gnep_lower_cost: player index out of range");
}

double gnep_upper_cost(int player, const Vector& y) {
  double y1 = y[0], y2 = y[1], y3 = y[2], y4 = y[3];
  switch (player) {
    case 1:
      return (y2 - 20) * (y2 - 20) + (y4 - 50) * (y4 - 50) + (y2 + y4) * (y1 + y3);
    case 2:
      return y1 * y1 + y1 * (y2 + y3) + y3 * y3 + y3 * (y2 + y4);
  }
  throw ConfigError("gnep_upper_cost: player index out of range");
}

namespace {

Matrix gnep_lower_matrix(bool duplicated) {
  Matrix M(4, 4);
  M << 1, 1, 2, 1,
       1, 1, 1, 1,
       0, 1, 1, 1,
       1, (duplicated ? 2 : 1), 1, 1;
  return M;
}

// pseudogradient of the lower game by central differences of the costs
Vector gnep_fd_pseudogradient(const Vector& y, bool duplicated) {
  Vector g(4);
  const double h = 1e-5;
  for (int i = 0; i < 4; ++i) {
    Vector yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g[i] = (gnep_lower_cost(i + 1, yp, duplicated) - gnep_lower_cost(i + 1, ym, duplicated)) /
           (2 * h);
  }
  return g;
}

}  // namespace

HierarchicalProblem build_gnep(GnepBuildReport* report) {
  const Matrix M2 = gnep_lower_matrix(false);
  const Vector q2 = (Vector(4) << -100, -50, -100, -50).finished();
  Matrix M1(4, 4);
  M1 << 2, 1, 1, 0,
        1, 2, 1, 0,
        1, 1, 2, 1,
        1, 0, 1, 2;
  const Vector q1 = (Vector(4) << 0, -40, 0, -100).finished();
  const Vector zstar = (Vector(4) << -50, 15, 50, 35).finished();

  // build-time cross-check of the hard-coded coefficients against finite
  // differences of the cost functions, both readings of h^l_4
  {
    Vector probes[3] = {zstar, (Vector(4) << 1, 2, 3, 4).finished(),
                        (Vector(4) << -10, 5, 40, 7).finished()};
    double err_single = 0.0, gap_dup = 0.0;
    for (const Vector& y : probes) {
      Vector coded = M2 * y + q2;
      err_single = std::max(err_single, (gnep_fd_pseudogradient(y, false) - coded).lpNorm<Eigen::Infinity>());
      gap_dup = std::max(gap_dup, (gnep_fd_pseudogradient(y, true) - coded).lpNorm<Eigen::Infinity>());
    }
    if (err_single > 1e-6)
      throw NumericsError("gnep build: coded pseudogradient disagrees with finite differences");
    if (report) {
      report->fd_max_err_implemented = err_single;
      report->fd_gap_alternate = gap_dup;
      Eigen::SelfAdjointEigenSolver<Matrix> es1(0.5 * (M2 + M2.transpose()));
      report->min_eig_sym_implemented = es1.eigenvalues().minCoeff();
      Matrix M2d = gnep_lower_matrix(true);
      Eigen::SelfAdjointEigenSolver<Matrix> es2(0.5 * (M2d + M2d.transpose()));
      report->min_eig_sym_alternate = es2.eigenvalues().minCoeff();
      report->f2_at_equilibrium = M2 * zstar + q2;
      report->note =
          "h^l_4 cross term read as y1+y2+y3-50 (single y2). With the repeated-y2 "
          "reading the pseudogradient is not monotone (negative symmetric "
          "eigenvalue) and does not vanish on the equilibrium segment.";
    }
  }

  HierarchicalProblem p;
  p.name = "gnep";
  p.dim = 4;
  p.data.f2 = affine_operator(M2, q2);
  p.data.f1 = affine_operator(M1, q1);
  // g2: boxes [-100,50]x[0,50]x[0,100]x[0,50] with hinge max{-10(y2-15),0} on y2
  std::vector<Pwl1D> g2t;
  g2t.push_back(Pwl1D::box(-100, 50));
  g2t.push_back(Pwl1D::hinge_box(1.0, -10.0, 15.0, 0, 50));
  g2t.push_back(Pwl1D::box(0, 100));
  g2t.push_back(Pwl1D::box(0, 50));
  p.data.g2 = separable_prox_term(std::move(g2t));
  p.data.g1 = zero_prox_term();

  p.solution_point = zstar;
  SegmentSet seg;
  seg.base = (Vector(4) << -50, 0, 50, 50).finished();
  seg.direction = (Vector(4) << 0, 1, 0, -1).finished();
  seg.lo = 15;
  seg.hi = 50;
  p.lower_set = seg;
  p.weak_sharp = WeakSharpness{1.0, 1.0};
  p.sample_lo = (Vector(4) << -100, 0, 0, 0).finished();
  p.sample_hi = (Vector(4) << 50, 50, 100, 50).finished();
  return p;
}

// ---------------- GAVE ----------------

namespace {

Matrix gave_stencil(int n, double h) {
  const double c = 1.0 / (12.0 * h * h);
  Matrix A = Matrix::Zero(n, n);
  A.block(0, 0, 1, 4) << 20, -6, -4, 1;
  A.block(1, 0, 1, 4) << -16, 30, -16, 1;
  for (int i = 2; i < n - 2; ++i) {
    A(i, i - 2) = 1;
    A(i, i - 1) = -16;
    A(i, i) = 30;
    A(i, i + 1) = -16;
    A(i, i + 2) = 1;
  }
  A.block(n - 2, n - 4, 1, 4) << 1, -16, 30, -16;
  A.block(n - 1, n - 4, 1, 4) << 1, -4, -6, 20;
  return c * A;
}

}  // namespace

HierarchicalProblem build_gave(int n, bool normalize_operators, GaveSpec* out) {
  if (n < 5) throw ConfigError("build_gave: the stencil needs n >= 5");
  GaveSpec spec;
  spec.n = n;
  spec.h = 1.0 / (n + 1);
  const double c = 1.0 / (12.0 * spec.h * spec.h);
  spec.A = gave_stencil(n, spec.h);
  spec.B = Matrix::Identity(n, n);
  spec.grid.resize(n);
  for (int i = 0; i < n; ++i) spec.grid[i] = (i + 1) * spec.h;
  const double u_left = -1.0, u_right = 0.0;
  spec.b.resize(n);
  for (int i = 0; i < n; ++i) spec.b[i] = spec.grid[i] * spec.grid[i] - 1.0;
  spec.b[0] += 11.0 * u_left * c;
  spec.b[1] -= u_left * c;
  spec.b[n - 2] -= u_right * c;
  spec.b[n - 1] += 11.0 * u_right * c;
  spec.analytic_u = [](double x) {
    return 0.1961 * std::sin(x) - 4.0 * std::cos(x) - x * x + 3.0;
  };

  spec.M.resize(n, 3 * n);
  spec.M << Matrix::Identity(n, n), -(spec.B - spec.A).transpose(), -Matrix::Identity(n, n);

  Matrix ApB = spec.A + spec.B;
  Matrix N = Matrix::Zero(3 * n, 3 * n);
  N.block(0, n, n, n) = -ApB.transpose();
  N.block(n, 0, n, n) = ApB;
  Vector r = Vector::Zero(3 * n);
  r.segment(n, n) = -spec.b;

  double normM = spectral_norm_power(spec.M);
  double normN = spectral_norm_power(ApB);
  spec.scale_f1 = normalize_operators ? normN : 1.0;
  spec.scale_f2 = normalize_operators ? normM * normM : 1.0;

  Matrix H2 = spec.M.transpose() * spec.M / spec.scale_f2;
  Matrix N_s = N / spec.scale_f1;
  Vector r_s = r / spec.scale_f1;

  HierarchicalProblem p;
  p.name = "gave";
  p.dim = 3 * n;
  p.data.f2 = affine_operator(H2, Vector::Zero(3 * n));
  p.data.f1 = affine_operator(N_s, r_s);
  // x >= 0, y free, w >= 0 at the upper level; lower level is the plain
  // least-squares coupling
  std::vector<Pwl1D> g1t;
  for (int i = 0; i < n; ++i) g1t.push_back(Pwl1D::box(0, kInf));
  for (int i = 0; i < n; ++i) g1t.push_back(Pwl1D::zero());
  for (int i = 0; i < n; ++i) g1t.push_back(Pwl1D::box(0, kInf));
  p.data.g1 = separable_prox_term(std::move(g1t));
  p.data.g2 = zero_prox_term();
  p.sample_lo = Vector::Constant(3 * n, -5.0);
  p.sample_hi = Vector::Constant(3 * n, 5.0);
  if (out) *out = spec;
  return p;
}

Vector gave_picard_oracle(const Matrix& A, const Vector& b, double tol, int max_iters) {
  const Eigen::Index n = A.rows();
  Eigen::PartialPivLU<Matrix> lu(A + Matrix::Identity(n, n));
  Vector x = lu.solve(b);
  for (int it = 0; it < max_iters; ++it) {
    Vector xn = lu.solve(b + x - x.cwiseAbs());
    if ((xn - x).lpNorm<Eigen::Infinity>() <= tol) return xn;
    x = xn;
  }
  throw NumericsError("gave_picard_oracle: fixed-point iteration did not converge");
}

double gave_residual(const Matrix& A, const Vector& b, const Vector& x) {
  return (A * x + x.cwiseAbs() - b).norm() / b.norm();
}

Vector gave_dual_recovery(const GaveSpec& spec, const Vector& z, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gave_dual_recovery: sigma must be positive");
  const int n = spec.n;
  Vector y = z.segment(n, n);
  double c = spec.scale_f2 / spec.scale_f1;
  return -((spec.B - spec.A).transpose() * y) / (sigma * c);
}

// ---------------- generic min-max with joint linear constraints ----------------

HierarchicalProblem build_minmax(const MinMaxSpec& spec) {
  const Eigen::Index nx = spec.nx, ny = spec.ny;
  if (nx <= 0 || ny <= 0) throw ConfigError("build_minmax: block dimensions must be positive");
  if (spec.K.size() && (spec.K.rows() != nx || spec.K.cols() != ny))
    throw ConfigError("build_minmax: coupling matrix K has wrong shape");
  const Eigen::Index nz = spec.A.size() ? spec.A.rows() : (spec.B.size() ? spec.B.rows() : 0);
  if (spec.A.size() && spec.A.cols() != nx) throw ConfigError("build_minmax: A has wrong shape");
  if (spec.B.size() && spec.B.cols() != ny) throw ConfigError("build_minmax: B has wrong shape");
  if (spec.c.size() && spec.c.size() != nz) throw ConfigError("build_minmax: c has wrong length");

  Matrix K = spec.K.size() ? spec.K : Matrix::Zero(nx, ny);
  Matrix A = spec.A.size() ? spec.A : Matrix::Zero(std::max<Eigen::Index>(nz, 1), nx);
  Matrix B = spec.B.size() ? spec.B : Matrix::Zero(A.rows(), ny);
  Vector c = spec.c.size() ? spec.c : Vector::Zero(A.rows());

  OperatorSpec gf1 = spec.grad_f1.eval ? spec.grad_f1 : zero_operator(nx);
  OperatorSpec gf2 = spec.grad_f2.eval ? spec.grad_f2 : zero_operator(ny);

  HierarchicalProblem p;
  p.name = "minmax";
  p.dim = nx + ny;

  OperatorSpec f1;
  f1.lipschitz = gf1.lipschitz + gf2.lipschitz + 1.01 * spectral_norm_power(K);
  f1.strong_mono = std::min(gf1.strong_mono, gf2.strong_mono);
  f1.eval = [gf1, gf2, K, nx, ny](const Vector& z) -> Vector {
    Vector x = z.head(nx), y = z.tail(ny);
    Vector out(nx + ny);
    out.head(nx) = gf1.eval(x) + K * y;
    out.tail(ny) = gf2.eval(y) - K.transpose() * x;
    return out;
  };
  p.data.f1 = f1;

  Matrix S(A.rows(), nx + ny);
  S << A, B;
  Matrix H = S.transpose() * S;
  Vector q = -S.transpose() * c;
  p.data.f2 = affine_operator(H, q);

  ProxTerm phi = spec.phi.prox ? spec.phi : zero_prox_term();
  ProxTerm psi = spec.psi.prox ? spec.psi : zero_prox_term();
  ProxTerm g1;
  g1.zero = phi.zero && psi.zero;
  g1.prox = [phi, psi, nx, ny](double step, const Vector& u) -> Vector {
    Vector out(nx + ny);
    out.head(nx) = phi.prox(step, u.head(nx));
    out.tail(ny) = psi.prox(step, u.tail(ny));
    return out;
  };
  g1.value = [phi, psi, nx, ny](const Vector& z) -> double {
    double a = phi.value(z.head(nx));
    if (a == kInf) return kInf;
    double b2 = psi.value(z.tail(ny));
    if (b2 == kInf) return kInf;
    return a + b2;
  };
  g1.in_domain = [phi, psi, nx, ny](const Vector& z) {
    return phi.in_domain(z.head(nx)) && psi.in_domain(z.tail(ny));
  };
  if (phi.separable && psi.separable) {
    auto joined = std::make_shared<std::vector<Pwl1D>>(*phi.separable);
    joined->insert(joined->end(), psi.separable->begin(), psi.separable->end());
    g1.separable = joined;
  }
  p.data.g1 = g1;
  p.data.g2 = zero_prox_term();
  p.sample_lo = Vector::Constant(p.dim, -10.0);
  p.sample_hi = Vector::Constant(p.dim, 10.0);
  return p;
}

HierarchicalProblem build_simple_bilevel(OperatorSpec grad_f1, ProxTerm g1,
                                         OperatorSpec grad_f2, ProxTerm g2,
                                         Eigen::Index dim) {
  if (!grad_f1.eval || !grad_f2.eval)
    throw ConfigError("build_simple_bilevel: gradient oracles are required");
  HierarchicalProblem p;
  p.name = "bilevel";
  p.dim = dim;
  p.data.f1 = std::move(grad_f1);
  p.data.f2 = std::move(grad_f2);
  p.data.g1 = g1.prox ? std::move(g1) : zero_prox_term();
  p.data.g2 = g2.prox ? std::move(g2) : zero_prox_term();
  p.sample_lo = Vector::Constant(dim, -10.0);
  p.sample_hi = Vector::Constant(dim, 10.0);
  return p;
}

}  // namespace hvi
