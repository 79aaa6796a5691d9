#include "hvi/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hvi {

OperatorSpec affine_operator(const Matrix& M, const Vector& q) {
  OperatorSpec op;
  // declared constant: power-iteration estimate inflated by 1% for the step rules
  op.lipschitz = 1.01 * spectral_norm_power(M);
  Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  op.strong_mono = std::max(0.0, es.eigenvalues().minCoeff());
  op.eval = [M, q](const Vector& z) -> Vector { return M * z + q; };
  return op;
}

OperatorSpec zero_operator(Eigen::Index dim) {
  OperatorSpec op;
  op.lipschitz = 0.0;
  op.strong_mono = 0.0;
  op.eval = [dim](const Vector& z) -> Vector {
    require_dim(z, dim, "zero operator");
    return Vector::Zero(dim);
  };
  return op;
}

double spectral_norm_power(const Matrix& M, int iters, double tol) {
  if (M.size() == 0) return 0.0;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(M.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  double nv = v.norm();
  if (nv == 0.0) v.setOnes();
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = M.transpose() * (M * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    double lam_new = std::sqrt(nw);  // w = M^T M v, |w| -> sigma_max^2
    v = w / nw;
    if (it > 0 && std::abs(lam_new - lambda) <= tol * std::max(1.0, lam_new)) {
      lambda = lam_new;
      break;
    }
    lambda = lam_new;
  }
  return lambda;
}

// ---- Pwl1D ----

static double pwl_slope_between(const Pwl1D& f, double probe) {
  size_t i = 0;
  while (i < f.breaks.size() && probe >= f.breaks[i]) ++i;
  return f.slopes[i];
}

double Pwl1D::value(double x) const {
  if (x < lower || x > upper) return kInf;
  // integrate the slope from anchor to x, knot by knot
  double lo = std::min(anchor, x), hi = std::max(anchor, x);
  double acc = 0.0, cur = lo;
  for (double b : breaks) {
    if (b <= lo) continue;
    if (b >= hi) break;
    acc += pwl_slope_between(*this, 0.5 * (cur + b)) * (b - cur);
    cur = b;
  }
  acc += pwl_slope_between(*this, 0.5 * (cur + hi)) * (hi - cur);
  return anchor_value + ((x >= anchor) ? acc : -acc);
}

double Pwl1D::prox(double step, double u) const {
  // minimize step*g(x) + (x-u)^2/2 over R, then clamp into [lower, upper]
  // (exact in 1-D for convex g). Segment i carries slope slopes[i]; its
  // stationary point is u - step*slopes[i]. A kink b absorbs
  // u in [b + step*m_left, b + step*m_right].
  const size_t m = breaks.size();
  double x = u - step * slopes[m];  // rightmost segment as fallback
  for (size_t i = 0; i <= m; ++i) {
    double seg_lo = (i == 0) ? -kInf : breaks[i - 1];
    double seg_hi = (i == m) ? kInf : breaks[i];
    double cand = u - step * slopes[i];
    if (cand >= seg_lo && cand <= seg_hi) {
      x = cand;
      break;
    }
    if (i < m && u >= breaks[i] + step * slopes[i] &&
        u <= breaks[i] + step * slopes[i + 1]) {
      x = breaks[i];
      break;
    }
  }
  return std::clamp(x, lower, upper);
}

Pwl1D Pwl1D::box(double lo, double hi) {
  Pwl1D f;
  f.lower = lo;
  f.upper = hi;
  f.slopes = {0.0};
  f.anchor = std::clamp(0.0, lo, hi);
  return f;
}

Pwl1D Pwl1D::zero() { return box(-kInf, kInf); }

Pwl1D Pwl1D::abs_term(double weight) {
  Pwl1D f;
  f.breaks = {0.0};
  f.slopes = {-weight, weight};
  f.anchor = 0.0;
  return f;
}

Pwl1D Pwl1D::hinge_box(double weight, double slope, double knee, double lo, double hi) {
  Pwl1D f;
  f.lower = lo;
  f.upper = hi;
  f.anchor = knee;
  if (slope == 0.0 || weight == 0.0) {
    f.slopes = {0.0};
    return f;
  }
  f.breaks = {knee};
  if (slope > 0.0)
    f.slopes = {0.0, weight * slope};  // active above the knee
  else
    f.slopes = {weight * slope, 0.0};  // active below the knee
  return f;
}

Pwl1D Pwl1D::weighted_sum(double a, const Pwl1D& f, double b, const Pwl1D& g) {
  Pwl1D h;
  h.lower = std::max(f.lower, g.lower);
  h.upper = std::min(f.upper, g.upper);
  if (h.lower > h.upper)
    throw ConfigError("weighted_sum: empty domain intersection");
  // merged breakpoints
  std::vector<double> bp;
  std::merge(f.breaks.begin(), f.breaks.end(), g.breaks.begin(), g.breaks.end(),
             std::back_inserter(bp));
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  h.breaks = bp;
  h.slopes.resize(bp.size() + 1);
  for (size_t i = 0; i <= bp.size(); ++i) {
    double probe;
    if (bp.empty())
      probe = 0.0;
    else if (i == 0)
      probe = bp[0] - 1.0;
    else if (i == bp.size())
      probe = bp.back() + 1.0;
    else
      probe = 0.5 * (bp[i - 1] + bp[i]);
    h.slopes[i] = a * pwl_slope_between(f, probe) + b * pwl_slope_between(g, probe);
  }
  h.anchor = std::clamp(0.0, h.lower, h.upper);
  if (!bp.empty()) h.anchor = std::clamp(bp[0], h.lower, h.upper);
  h.anchor_value = a * f.value(h.anchor) + b * g.value(h.anchor);
  return h;
}

// ---- ProxTerm factories ----

ProxTerm zero_prox_term() {
  ProxTerm g;
  g.zero = true;
  g.prox = [](double, const Vector& u) { return u; };
  g.value = [](const Vector&) { return 0.0; };
  g.in_domain = [](const Vector&) { return true; };
  return g;
}

ProxTerm separable_prox_term(std::vector<Pwl1D> terms) {
  auto shared = std::make_shared<const std::vector<Pwl1D>>(std::move(terms));
  ProxTerm g;
  g.separable = shared;
  g.prox = [shared](double step, const Vector& u) -> Vector {
    require_dim(u, (Eigen::Index)shared->size(), "separable prox");
    Vector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = (*shared)[i].prox(step, u[i]);
    return out;
  };
  g.value = [shared](const Vector& z) -> double {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      double v = (*shared)[i].value(z[i]);
      if (v == kInf) return kInf;
      acc += v;
    }
    return acc;
  };
  g.in_domain = [shared](const Vector& z) -> bool {
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (z[i] < (*shared)[i].lower || z[i] > (*shared)[i].upper) return false;
    return true;
  };
  return g;
}

ProxTerm box_prox_term(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size()) throw ConfigError("box prox: bound dimensions differ");
  std::vector<Pwl1D> terms;
  terms.reserve(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw ConfigError("box prox: lower > upper at coordinate " + std::to_string(i));
    terms.push_back(Pwl1D::box(lo[i], hi[i]));
  }
  return separable_prox_term(std::move(terms));
}

// ---- free prox operations ----

double prox_box1(double lower, double upper, double u) {
  if (lower > upper) throw ConfigError("prox_box: lower > upper");
  return std::clamp(u, lower, upper);
}

Vector prox_box(const Vector& lower, const Vector& upper, const Vector& u) {
  if (lower.size() != u.size() || upper.size() != u.size())
    throw ConfigError("prox_box: dimension mismatch");
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = prox_box1(lower[i], upper[i], u[i]);
  return out;
}

double prox_hinge_box(double lam, double slope, double knee, double lower,
                      double upper, double step, double u) {
  if (lower > upper) throw ConfigError("prox_hinge_box: lower > upper");
  if (step <= 0.0) throw ConfigError("prox_hinge_box: step must be positive");
  return Pwl1D::hinge_box(lam, slope, knee, lower, upper).prox(step, u);
}

Vector default_combined_prox(const ProxTerm& g2, const ProxTerm& g1, double step,
                             double sigma, const Vector& u) {
  if (g1.zero || sigma == 0.0) return g2.prox(step, u);
  if (g2.zero) return g1.prox(step * sigma, u);
  if (g2.separable && g1.separable) {
    const auto& a = *g2.separable;
    const auto& b = *g1.separable;
    if (a.size() != b.size() || (Eigen::Index)a.size() != u.size())
      throw ConfigError("combined prox: separable term dimensions differ");
    Vector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
      out[i] = Pwl1D::weighted_sum(1.0, a[i], sigma, b[i]).prox(step, u[i]);
    return out;
  }
  throw ConfigError(
      "no combined-prox pattern applies to this (g1, g2) pair; "
      "supply CombinedData::combined_prox directly");
}

Vector CombinedData::prox(double step, double sigma, const Vector& u) const {
  if (combined_prox) return combined_prox(step, sigma, u);
  return default_combined_prox(g2, g1, step, sigma, u);
}

CombinedEval eval_operator_pair(const CombinedData& data, const Vector& z) {
  CombinedEval ev;
  ev.f2 = data.f2.eval(z);
  require_dim(ev.f2, z.size(), "F2");
  require_finite(ev.f2, "F2");
  ev.f1 = data.f1.eval(z);
  require_dim(ev.f1, z.size(), "F1");
  require_finite(ev.f1, "F1");
  return ev;
}

Vector eval_combined_operator(const CombinedData& data, double sigma, const Vector& z) {
  if (sigma < 0.0) throw ConfigError("eval_combined_operator: sigma must be >= 0");
  return eval_operator_pair(data, z).with_sigma(sigma);
}

}  // namespace hvi
