#include <doctest.h>

#include <cmath>
#include <random>

#include "hvi/gaps.hpp"
#include "hvi/problems.hpp"
#include "hvi/solvers.hpp"

using namespace hvi;

namespace {

// central-difference pseudogradient of the printed lower-level costs
Vector fd_lower_pseudogradient(const Vector& y, bool duplicated) {
  Vector g(4);
  const double h = 1e-5;
  for (int i = 0; i < 4; ++i) {
    Vector yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g[i] = (gnep_lower_cost(i + 1, yp, duplicated) -
            gnep_lower_cost(i + 1, ym, duplicated)) /
           (2 * h);
  }
  return g;
}

Vector fd_upper_pseudogradient(const Vector& y) {
  // player 1 controls (y2, y4), player 2 controls (y1, y3)
  Vector g(4);
  const double h = 1e-5;
  int owner[4] = {2, 1, 2, 1};
  for (int i = 0; i < 4; ++i) {
    Vector yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g[i] = (gnep_upper_cost(owner[i], yp) - gnep_upper_cost(owner[i], ym)) / (2 * h);
  }
  return g;
}

// 1-D subdifferential interval of the gnep g2 coordinate terms
void g2_subdiff(int coord, double x, double& lo, double& hi) {
  const double blo[4] = {-100, 0, 0, 0};
  const double bhi[4] = {50, 50, 100, 50};
  lo = 0.0;
  hi = 0.0;
  if (coord == 1) {  // hinge max{-10(x-15), 0}
    if (x < 15) lo = hi = -10;
    else if (x == 15) lo = -10, hi = 0;
  }
  if (x <= blo[coord]) lo = -kInf;
  if (x >= bhi[coord]) hi = kInf;
}

}  // namespace

TEST_CASE("gnep pseudogradients match finite differences of the costs") {
  GnepBuildReport rep;
  HierarchicalProblem p = build_gnep(&rep);
  Vector zstar = *p.solution_point;

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(-60, 60);
  for (int i = 0; i < 20; ++i) {
    Vector y(4);
    for (int j = 0; j < 4; ++j) y[j] = U(rng);
    CHECK((p.data.f2.eval(y) - fd_lower_pseudogradient(y, false)).norm() <= 1e-5);
    CHECK((p.data.f1.eval(y) - fd_upper_pseudogradient(y)).norm() <= 1e-5);
  }

  // the equilibrium nulls the implemented pseudogradient exactly
  CHECK(p.data.f2.eval(zstar).norm() <= 1e-12);
  CHECK((rep.f2_at_equilibrium).norm() <= 1e-12);

  // build report documents both readings of the printed h^l_4
  CHECK(rep.fd_max_err_implemented <= 1e-6);
  CHECK(rep.fd_gap_alternate > 1.0);             // differs by the y2 coefficient
  CHECK(rep.min_eig_sym_implemented >= -1e-9);   // implemented reading: monotone
  CHECK(rep.min_eig_sym_alternate <= -0.49);     // repeated-y2 reading is not
}

TEST_CASE("gnep equilibrium respects the constraint boxes") {
  HierarchicalProblem p = build_gnep();
  Vector z = *p.solution_point;
  CHECK(p.data.g2.in_domain(z));
  CHECK(z[0] == -50);
  CHECK(z[1] == 15);
  CHECK(z[2] == 50);
  CHECK(z[3] == 35);
  // hinge pull below the knee: prox shifts up by 10*t
  double t = 0.03;
  Vector u = z;
  u[1] = 10.0;
  Vector px = p.data.g2.prox(t, u);
  CHECK(px[1] == doctest::Approx(10.0 + 10 * t).epsilon(1e-14));
}

TEST_CASE("gnep: inclusion 0 in F2 + dg2 holds along the declared segment") {
  HierarchicalProblem p = build_gnep();
  const SegmentSet& seg = *p.lower_set;
  for (int i = 0; i < 50; ++i) {
    double s = seg.lo + (seg.hi - seg.lo) * i / 49.0;
    Vector y = seg.base + s * seg.direction;
    Vector f = p.data.f2.eval(y);
    for (int c = 0; c < 4; ++c) {
      double lo, hi;
      g2_subdiff(c, y[c], lo, hi);
      CHECK(-f[c] >= lo - 1e-8);
      CHECK(-f[c] <= hi + 1e-8);
    }
  }
}

TEST_CASE("gnep: equilibrium is invariant under one unregularized step") {
  HierarchicalProblem p = build_gnep();
  Vector zstar = *p.solution_point;
  // sigma = 0: prox_{t g2}(z* - t F2(z*)) = z* for any admissible t
  for (double t : {0.01, 0.05, 1.0 / (std::sqrt(8.0) * p.data.f2.lipschitz)}) {
    Vector u = zstar - t * p.data.f2.eval(zstar);
    CHECK((p.data.prox(t, 0.0, u) - zstar).norm() <= 1e-12);
  }
  // with sigma > 0 the regularized fixed point drifts by O(sigma)
  double t = 0.05;
  for (double sg : {0.1, 0.01, 0.001}) {
    Vector u = zstar - t * (p.data.f2.eval(zstar) + sg * p.data.f1.eval(zstar));
    double drift = (p.data.prox(t, sg, u) - zstar).norm();
    CHECK(drift <= sg * t * p.data.f1.eval(zstar).norm() + 1e-12);
  }
}

TEST_CASE("gave assembly matches the printed stencil and vector") {
  GaveSpec gs;
  build_gave(9, true, &gs);
  const double c = 1.0 / (12.0 * 0.1 * 0.1);
  // oracle: re-derived five-point coefficients (1,-16,30,-16,1)/(12h^2)
  CHECK(gs.A(4, 4) == doctest::Approx(30 * c));
  CHECK(gs.A(4, 4) == doctest::Approx(250.0));
  CHECK(gs.A(4, 2) == doctest::Approx(c));
  CHECK(gs.A(4, 3) == doctest::Approx(-16 * c));
  // boundary closures as printed
  CHECK(gs.A(0, 0) == doctest::Approx(20 * c));
  CHECK(gs.A(0, 1) == doctest::Approx(-6 * c));
  CHECK(gs.A(0, 2) == doctest::Approx(-4 * c));
  CHECK(gs.A(0, 3) == doctest::Approx(c));
  CHECK(gs.A(1, 0) == doctest::Approx(-16 * c));
  CHECK(gs.A(8, 8) == doctest::Approx(20 * c));
  CHECK(gs.A(8, 6) == doctest::Approx(-4 * c));
  // b_1 = f(0.1) + 11*(-1)/(12 h^2)
  double b1 = (0.1 * 0.1 - 1.0) + 11.0 * (-1.0) * c;
  CHECK(gs.b[0] == doctest::Approx(b1));
  CHECK(gs.b[0] == doctest::Approx(-92.6566666666667));
  // b_2 = f(0.2) - (-1)/(12 h^2); interior entries carry no correction
  CHECK(gs.b[1] == doctest::Approx((0.04 - 1.0) + c));
  CHECK(gs.b[4] == doctest::Approx(0.25 - 1.0));
  // right boundary corrections vanish since u(1) = 0
  CHECK(gs.b[7] == doctest::Approx(0.64 - 1.0));
  CHECK(gs.b[8] == doctest::Approx(0.81 - 1.0));
  // analytic boundary value
  CHECK(gs.analytic_u(0.0) == doctest::Approx(-1.0));
  CHECK(gs.analytic_u(1.0) == doctest::Approx(0.0).epsilon(1e-2));
  CHECK_THROWS_AS(build_gave(4), ConfigError);
}

TEST_CASE("gave stencil truncation error is fourth order at interior rows") {
  auto probe = [](int n) {
    GaveSpec gs;
    build_gave(n, true, &gs);
    const double cc = 1.0 / (12.0 * gs.h * gs.h);
    auto v = [](double x) { return std::sin(2 * x); };
    auto vpp = [](double x) { return -4.0 * std::sin(2 * x); };
    Vector vg(n);
    for (int i = 0; i < n; ++i) vg[i] = v(gs.grid[i]);
    Vector corr = Vector::Zero(n);
    corr[0] = 11 * v(0.0) * cc;
    corr[1] = -v(0.0) * cc;
    corr[n - 2] = -v(1.0) * cc;
    corr[n - 1] = 11 * v(1.0) * cc;
    Vector approx = gs.A * vg - corr;  // ~ -v''
    double err = 0.0;
    for (int i = 2; i < n - 2; ++i)
      err = std::max(err, std::abs(approx[i] + vpp(gs.grid[i])));
    return err;
  };
  double e9 = probe(9), e19 = probe(19);
  CHECK(e9 <= 1e-4);
  double order = std::log(e9 / e19) / std::log(2.0);  // h halves from n=9 to n=19
  CHECK(order >= 3.5);
  CHECK(order <= 4.5);
}

TEST_CASE("gave picard oracle solves the discrete equation") {
  GaveSpec gs;
  build_gave(9, true, &gs);
  Vector xhat = gave_picard_oracle(gs.A, gs.b);
  CHECK(gave_residual(gs.A, gs.b, xhat) <= 1e-10);
  // the discrete solution tracks the analytic one (truncation-level error)
  for (int i = 0; i < gs.n; ++i)
    CHECK(std::abs(xhat[i] - gs.analytic_u(gs.grid[i])) <= 5e-3);
  CHECK((xhat.array() < 0.0).all());
}

TEST_CASE("gave hierarchical data shape and scales") {
  GaveSpec gs;
  HierarchicalProblem p = build_gave(9, true, &gs);
  CHECK(p.dim == 27);
  CHECK(p.data.g2.zero);
  CHECK(p.data.f2.lipschitz <= 1.02);  // normalized
  CHECK(p.data.f1.lipschitz <= 1.02);
  CHECK(gs.scale_f2 > 1e4);
  // S2 is the kernel of M: F2 vanishes there
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N(0, 1);
  Vector y(9);
  for (int i = 0; i < 9; ++i) y[i] = N(rng);
  Vector z(27);
  Vector w = Vector::Ones(9);
  z.segment(9, 9) = y;
  z.segment(18, 9) = w;
  z.head(9) = (gs.B - gs.A).transpose() * y + w;  // M z = 0
  CHECK(p.data.f2.eval(z).norm() <= 1e-9);

  GaveSpec raw;
  HierarchicalProblem praw = build_gave(9, false, &raw);
  CHECK(praw.data.f2.lipschitz > 1e4);
  CHECK(raw.scale_f2 == 1.0);
}

TEST_CASE("gave dual recovery reconstructs u on the regularized path") {
  GaveSpec gs;
  HierarchicalProblem p = build_gave(9, true, &gs);
  SolverConfig c;
  c.variant = Variant::oeg;
  c.schedule.a = 1;
  c.schedule.b = 3;
  c.schedule.delta = 0.5;
  c.iterations = 200000;
  c.log_every = 200000;
  RunTrace tr = run(p, c);
  Vector u = gave_dual_recovery(gs, tr.z_final, tr.schedule_final.sigma);
  double dev = 0.0;
  for (int i = 0; i < gs.n; ++i)
    dev = std::max(dev, std::abs(u[i] - gs.analytic_u(gs.grid[i])));
  CHECK(dev <= 5e-2);
  CHECK(gave_residual(gs.A, gs.b, u) <= 2e-2);
}

TEST_CASE("minmax builder degenerate and skew structure") {
  MinMaxSpec spec;
  spec.nx = spec.ny = 3;
  HierarchicalProblem p0 = build_minmax(spec);  // K = 0, f1 = f2 = 0
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0, 1);
  Vector z(6);
  for (int i = 0; i < 6; ++i) z[i] = N(rng);
  CHECK(p0.data.f1.eval(z).norm() == 0.0);
  CHECK(p0.data.f2.eval(z).norm() == 0.0);  // A = B = 0, c = 0

  MinMaxSpec sk = spec;
  sk.K = Matrix(3, 3);
  sk.K << 1, 2, 0, -1, 0.5, 3, 0, 0, 1;
  HierarchicalProblem pk = build_minmax(sk);
  for (int i = 0; i < 100; ++i) {
    Vector a(6), b(6);
    for (int j = 0; j < 6; ++j) {
      a[j] = N(rng);
      b[j] = N(rng);
    }
    double inner = (pk.data.f1.eval(a) - pk.data.f1.eval(b)).dot(a - b);
    CHECK(std::abs(inner) <= 1e-10);  // pure coupling term is skew
  }

  // monotonicity spot-check of the assembled operator with curvature
  MinMaxSpec full = sk;
  full.grad_f1 = affine_operator(Matrix::Identity(3, 3), Vector::Zero(3));
  full.grad_f2 = affine_operator(2 * Matrix::Identity(3, 3), Vector::Ones(3));
  full.A = Matrix::Identity(3, 3);
  full.B = -Matrix::Identity(3, 3);
  full.c = Vector::Ones(3);
  HierarchicalProblem pf = build_minmax(full);
  for (int i = 0; i < 500; ++i) {
    Vector a(6), b(6);
    for (int j = 0; j < 6; ++j) {
      a[j] = N(rng);
      b[j] = N(rng);
    }
    CHECK((pf.data.f1.eval(a) - pf.data.f1.eval(b)).dot(a - b) >= -1e-8);
    CHECK((pf.data.f2.eval(a) - pf.data.f2.eval(b)).dot(a - b) >= -1e-8);
  }
  // g1 prox acts blockwise
  MinMaxSpec withg = spec;
  withg.phi = box_prox_term(Vector::Zero(3), Vector::Constant(3, kInf));
  HierarchicalProblem pg = build_minmax(withg);
  Vector u(6);
  u << -1, 2, -3, 4, -5, 6;
  Vector px = pg.data.g1.prox(0.5, u);
  CHECK(px[0] == 0.0);
  CHECK(px[1] == 2.0);
  CHECK(px[4] == -5.0);  // psi defaults to zero: y block untouched
  CHECK_THROWS_AS(([&] {
                    MinMaxSpec badspec;
                    badspec.nx = 2;
                    badspec.ny = 2;
                    badspec.K = Matrix::Zero(3, 3);
                    build_minmax(badspec);
                  }()),
                  ConfigError);
}

TEST_CASE("simple bilevel: singleton lower level pins the solution") {
  Vector c = (Vector(2) << 2, -1).finished();
  HierarchicalProblem p = build_simple_bilevel(
      affine_operator(Matrix::Identity(2, 2), Vector::Zero(2)), zero_prox_term(),
      affine_operator(Matrix::Identity(2, 2), -c), zero_prox_term(), 2);
  SolverConfig sc;
  sc.variant = Variant::oeg;
  sc.schedule.a = 1;
  sc.schedule.b = 3;
  sc.schedule.delta = 0.5;
  sc.iterations = 20000;
  sc.log_every = 20000;
  RunTrace tr = run(p, sc);
  CHECK((tr.z_avg - c).norm() <= 0.05);
}

TEST_CASE("simple bilevel: flat lower-level minimum selects the min-norm point") {
  // f2 = 0.5 max(|x|-1, 0)^2 has the unit ball as argmin; f1 = |x|^2/2 selects 0
  OperatorSpec gf2;
  gf2.lipschitz = 1.0;
  gf2.eval = [](const Vector& x) -> Vector {
    double n = x.norm();
    if (n <= 1.0) return Vector::Zero(x.size());
    return Vector((1.0 - 1.0 / n) * x);
  };
  HierarchicalProblem p = build_simple_bilevel(
      affine_operator(Matrix::Identity(2, 2), Vector::Zero(2)), zero_prox_term(), gf2,
      zero_prox_term(), 2);
  SolverConfig sc;
  sc.variant = Variant::oeg;
  sc.schedule.a = 1;
  sc.schedule.b = 3;
  sc.schedule.delta = 0.5;
  sc.iterations = 200000;
  sc.log_every = 200000;
  sc.z1 = (Vector(2) << 4, 3).finished();
  RunTrace tr = run(p, sc);
  CHECK(tr.z_avg.norm() <= 0.15);
}

TEST_CASE("bilevel gradient consistency against finite differences") {
  // supplied f2 with its gradient oracle; FD of f2 must match on 100 points
  auto f2 = [](const Vector& x) { return 0.5 * (x - Vector::Ones(3)).squaredNorm(); };
  OperatorSpec gf2 = affine_operator(Matrix::Identity(3, 3), -Vector::Ones(3));
  std::mt19937_64 rng(31);
  std::normal_distribution<double> N(0, 2);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    Vector x(3);
    for (int j = 0; j < 3; ++j) x[j] = N(rng);
    Vector g = gf2.eval(x);
    for (int j = 0; j < 3; ++j) {
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      CHECK(std::abs((f2(xp) - f2(xm)) / (2 * h) - g[j]) <= 1e-5);
    }
  }
}
