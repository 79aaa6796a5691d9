#include "hvi/check_suite.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hvi/gaps.hpp"
#include "hvi/problems.hpp"
#include "hvi/solvers.hpp"

namespace hvi {

namespace {

struct NamedProx {
  std::string name;
  ProxTerm term;
  Vector lo, hi;  // sampling box
};

struct NamedOp {
  std::string name;
  OperatorSpec op;
  Vector lo, hi;
};

Vector sample_box(std::mt19937_64& rng, const Vector& lo, const Vector& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector z(lo.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
  return z;
}

CheckResult check_nonexpansive(const NamedProx& np, std::mt19937_64& rng) {
  CheckResult r{"prox_nonexpansive(" + np.name + ")", true, ""};
  std::uniform_real_distribution<double> sd(0.05, 2.0);
  for (int i = 0; i < 200; ++i) {
    double t = sd(rng);
    Vector u = sample_box(rng, np.lo, np.hi), v = sample_box(rng, np.lo, np.hi);
    double lhs = (np.term.prox(t, u) - np.term.prox(t, v)).norm();
    double rhs = (u - v).norm() + 1e-10;
    if (lhs > rhs) {
      r.passed = false;
      std::ostringstream d;
      d << "pair " << i << ": |prox(u)-prox(v)| = " << lhs << " > |u-v| = " << rhs;
      r.detail = d.str();
      return r;
    }
  }
  return r;
}

CheckResult check_prox_vi(const NamedProx& np, std::mt19937_64& rng) {
  // x = prox_t(u)  =>  <u-x, z-x> <= t (g(z) - g(x)) for all z
  CheckResult r{"prox_variational(" + np.name + ")", true, ""};
  std::uniform_real_distribution<double> sd(0.05, 2.0);
  for (int i = 0; i < 10; ++i) {
    double t = sd(rng);
    Vector u = sample_box(rng, np.lo, np.hi);
    Vector x = np.term.prox(t, u);
    double gx = np.term.value(x);
    for (int j = 0; j < 100; ++j) {
      Vector z = np.term.prox(1.0, sample_box(rng, np.lo, np.hi));  // point of dom(g)
      double gz = np.term.value(z);
      double lhs = (u - x).dot(z - x);
      if (lhs > t * (gz - gx) + 1e-8) {
        r.passed = false;
        std::ostringstream d;
        d << "u-draw " << i << ", z-draw " << j << ": <u-x,z-x> = " << lhs
          << " > t(g(z)-g(x)) = " << t * (gz - gx);
        r.detail = d.str();
        return r;
      }
    }
  }
  return r;
}

CheckResult check_monotone_lipschitz(const NamedOp& no, std::mt19937_64& rng) {
  CheckResult r{"operator_monotone_lipschitz(" + no.name + ")", true, ""};
  for (int i = 0; i < 500; ++i) {
    Vector z1 = sample_box(rng, no.lo, no.hi), z2 = sample_box(rng, no.lo, no.hi);
    Vector f1 = no.op.eval(z1), f2 = no.op.eval(z2);
    double inner = (f1 - f2).dot(z1 - z2);
    double want = no.op.strong_mono * (z1 - z2).squaredNorm();
    if (inner < want - 1e-8) {
      r.passed = false;
      r.detail = "monotonicity violated: <F(z1)-F(z2), z1-z2> = " + std::to_string(inner);
      return r;
    }
    double lip = (f1 - f2).norm();
    if (lip > (no.op.lipschitz + 1e-8) * (z1 - z2).norm()) {
      r.passed = false;
      r.detail = "Lipschitz bound violated: " + std::to_string(lip);
      return r;
    }
  }
  return r;
}

}  // namespace

std::vector<CheckResult> run_check_suite(uint64_t seed, const std::string& inject_fault) {
  std::mt19937_64 rng(seed ? seed : 0x9e3779b9u);
  std::vector<CheckResult> out;

  HierarchicalProblem gnep = build_gnep();
  GaveSpec gs;
  HierarchicalProblem gave = build_gave(9, true, &gs);

  std::vector<NamedProx> proxes;
  proxes.push_back({"gnep_g2", gnep.data.g2, gnep.sample_lo * 1.5, gnep.sample_hi * 1.5});
  proxes.push_back({"gave_g1", gave.data.g1, gave.sample_lo, gave.sample_hi});
  {
    std::vector<Pwl1D> abs1{Pwl1D::abs_term(1.0)};
    proxes.push_back({"abs_1d", separable_prox_term(std::move(abs1)),
                      Vector::Constant(1, -10.0), Vector::Constant(1, 10.0)});
  }
  if (inject_fault == "prox_clamp") {
    // clamp applied around an expanded point: not nonexpansive, the suite
    // must catch it and name the test
    ProxTerm bad = box_prox_term(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    auto good = bad.prox;
    bad.prox = [good](double t, const Vector& u) { return good(t, Vector(1.5 * u)); };
    proxes.push_back({"faulty_box", bad, Vector::Constant(1, -2.0), Vector::Constant(1, 2.0)});
  }

  for (const auto& np : proxes) {
    out.push_back(check_nonexpansive(np, rng));
    out.push_back(check_prox_vi(np, rng));
  }

  std::vector<NamedOp> ops;
  ops.push_back({"gnep_F2", gnep.data.f2, gnep.sample_lo, gnep.sample_hi});
  ops.push_back({"gnep_F1", gnep.data.f1, gnep.sample_lo, gnep.sample_hi});
  ops.push_back({"gave_F2", gave.data.f2, gave.sample_lo, gave.sample_hi});
  ops.push_back({"gave_F1", gave.data.f1, gave.sample_lo, gave.sample_hi});
  for (const auto& no : ops) out.push_back(check_monotone_lipschitz(no, rng));

  // combined prox at sigma = 0 equals g2.prox
  {
    CheckResult r{"combined_prox_sigma0", true, ""};
    for (int i = 0; i < 50 && r.passed; ++i) {
      Vector u = sample_box(rng, gnep.sample_lo, gnep.sample_hi);
      double t = 0.3;
      double diff = (gnep.data.prox(t, 0.0, u) - gnep.data.g2.prox(t, u)).norm();
      if (diff > 1e-12) {
        r.passed = false;
        r.detail = "mismatch " + std::to_string(diff);
      }
    }
    out.push_back(r);
  }

  // energy recursion on the gnep at the known equilibrium
  {
    CheckResult r{"energy_recursion_gnep", true, ""};
    SolverConfig sc;
    sc.variant = Variant::oeg;
    sc.schedule.a = 1.0;
    sc.schedule.b = 3.0;
    sc.schedule.delta = 0.5;
    sc.iterations = 10000;
    sc.log_every = 1000;
    sc.energy_ref = gnep.solution_point;
    RunTrace tr = run(gnep, sc);
    double bound = 1e-8 * (1.0 + tr.E1);
    if (!(tr.max_energy_resid <= bound)) {
      r.passed = false;
      r.detail = "max residual " + std::to_string(tr.max_energy_resid) + " > " +
                 std::to_string(bound);
    }
    out.push_back(r);
  }

  // gap nonnegativity on anchor members and convexity in z
  {
    AnchorSet anchors = default_anchors(gnep, 16);
    CheckResult r{"gap_nonnegative_on_anchors", true, ""};
    for (const Vector& y : anchors.points) {
      double g = feas_gap(gnep, anchors, y);
      if (g < -1e-12) {
        r.passed = false;
        r.detail = "gap " + std::to_string(g) + " at an anchor";
        break;
      }
    }
    out.push_back(r);

    CheckResult rc{"gap_convexity", true, ""};
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (int i = 0; i < 100 && rc.passed; ++i) {
      Vector z1 = gnep.data.g2.prox(1.0, sample_box(rng, gnep.sample_lo, gnep.sample_hi));
      Vector z2 = gnep.data.g2.prox(1.0, sample_box(rng, gnep.sample_lo, gnep.sample_hi));
      double l = lam(rng);
      double lhs = feas_gap(gnep, anchors, l * z1 + (1 - l) * z2);
      double rhs = l * feas_gap(gnep, anchors, z1) + (1 - l) * feas_gap(gnep, anchors, z2);
      if (lhs > rhs + 1e-9) {
        rc.passed = false;
        rc.detail = "convexity violated by " + std::to_string(lhs - rhs);
      }
    }
    out.push_back(rc);
  }

  // weak sharpness: |x| toy is exactly (1,1)-sharp; alpha = 2 must violate
  {
    HierarchicalProblem toy;
    toy.name = "abs_toy";
    toy.dim = 1;
    toy.data.f2 = zero_operator(1);
    toy.data.f1 = zero_operator(1);
    std::vector<Pwl1D> t1{Pwl1D::abs_term(1.0)};
    toy.data.g2 = separable_prox_term(std::move(t1));
    toy.data.g1 = zero_prox_term();
    SegmentSet seg;
    seg.base = Vector::Zero(1);
    seg.direction = Vector::Ones(1);
    seg.lo = seg.hi = 0.0;
    toy.lower_set = seg;
    toy.sample_lo = Vector::Constant(1, -10.0);
    toy.sample_hi = Vector::Constant(1, 10.0);

    WeakSharpnessReport w1 = weak_sharpness_probe(toy, 500, 1.0, 1.0, seed + 1);
    CheckResult r{"weak_sharpness_abs_toy", w1.violations == 0,
                  "violations=" + std::to_string(w1.violations)};
    out.push_back(r);
    WeakSharpnessReport w2 = weak_sharpness_probe(toy, 500, 2.0, 1.0, seed + 2);
    CheckResult r2{"weak_sharpness_abs_toy_alpha2_rejected", w2.violations == w2.samples,
                   "violations=" + std::to_string(w2.violations)};
    out.push_back(r2);
  }

  // quadratic toy passes at (2, 2): g(x) = x^2, H(z, 0) = z^2 = (2/2) dist^2
  {
    HierarchicalProblem toy;
    toy.name = "quad_toy";
    toy.dim = 1;
    toy.data.f2 = zero_operator(1);
    toy.data.f1 = zero_operator(1);
    ProxTerm quad;
    quad.prox = [](double t, const Vector& u) { return Vector(u / (1.0 + 2.0 * t)); };
    quad.value = [](const Vector& z) { return z.squaredNorm(); };
    quad.in_domain = [](const Vector&) { return true; };
    toy.data.g2 = quad;
    toy.data.g1 = zero_prox_term();
    SegmentSet seg;
    seg.base = Vector::Zero(1);
    seg.direction = Vector::Ones(1);
    seg.lo = seg.hi = 0.0;
    toy.lower_set = seg;
    toy.sample_lo = Vector::Constant(1, -10.0);
    toy.sample_hi = Vector::Constant(1, 10.0);
    WeakSharpnessReport w = weak_sharpness_probe(toy, 500, 2.0, 2.0, seed + 3);
    out.push_back({"weak_sharpness_quad_toy", w.violations == 0,
                   "violations=" + std::to_string(w.violations)});
  }

  return out;
}

}  // namespace hvi
