#include "hvi/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace hvi {

double H_bifunction(const OperatorSpec& F, const ProxTerm& g, const Vector& z,
                    const Vector& y) {
  double gy = g.value(y);
  if (!(gy < kInf))
    throw ConfigError("H_bifunction: anchor point lies outside dom(g)");
  double gz = g.value(z);
  if (gz == kInf) return kInf;
  Vector fy = F.eval(y);
  require_finite(fy, "F at anchor");
  return fy.dot(z - y) + gz - gy;
}

double gap_over_anchors(const OperatorSpec& F, const ProxTerm& g,
                        const AnchorSet& anchors, const Vector& z) {
  if (anchors.points.empty())
    throw ConfigError("gap_over_anchors: anchor set is empty");
  double best = -kInf;
  for (const Vector& y : anchors.points) best = std::max(best, H_bifunction(F, g, z, y));
  return best;
}

double feas_gap(const HierarchicalProblem& p, const AnchorSet& anchors_u2,
                const Vector& z) {
  return gap_over_anchors(p.data.f2, p.data.g2, anchors_u2, z);
}

double opt_gap(const HierarchicalProblem& p, const AnchorSet& anchors, const Vector& z) {
  if (p.lower_set) {
    for (const Vector& y : anchors.points)
      if (dist_to_segment(*p.lower_set, y) > 1e-8)
        throw ConfigError("opt_gap: anchor fails the S2 membership test");
  }
  return gap_over_anchors(p.data.f1, p.data.g1, anchors, z);
}

Vector project_segment(const SegmentSet& seg, const Vector& z) {
  double d2 = seg.direction.squaredNorm();
  if (!(d2 > 0.0)) throw ConfigError("segment: direction must be nonzero");
  double s = seg.direction.dot(z - seg.base) / d2;
  s = std::clamp(s, seg.lo, seg.hi);
  return seg.base + s * seg.direction;
}

double dist_to_segment(const SegmentSet& seg, const Vector& z) {
  return (z - project_segment(seg, z)).norm();
}

WeakSharpnessReport weak_sharpness_probe(const HierarchicalProblem& p, int samples,
                                         double alpha, double rho, uint64_t seed) {
  if (!p.lower_set)
    throw ConfigError("weak_sharpness_probe: problem has no S2 descriptor");
  if (p.sample_lo.size() != p.dim || p.sample_hi.size() != p.dim)
    throw ConfigError("weak_sharpness_probe: problem has no sampling box");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WeakSharpnessReport rep;
  rep.samples = samples;
  rep.max_feasible_alpha = kInf;
  const double tol = 1e-9;
  for (int s = 0; s < samples; ++s) {
    Vector z(p.dim);
    for (Eigen::Index i = 0; i < p.dim; ++i)
      z[i] = p.sample_lo[i] + (p.sample_hi[i] - p.sample_lo[i]) * unit(rng);
    if (!p.data.g2.in_domain(z)) {
      z = p.data.g2.prox(1.0, z);  // pull the sample into dom(g2)
    }
    Vector zs = project_segment(*p.lower_set, z);
    double d = (z - zs).norm();
    double h = H_bifunction(p.data.f2, p.data.g2, z, zs);
    double needed = (alpha / rho) * std::pow(d, rho);
    if (h < needed - tol) ++rep.violations;
    if (d > 1e-12) {
      double alpha_here = rho * h / std::pow(d, rho);
      rep.max_feasible_alpha = std::min(rep.max_feasible_alpha, alpha_here);
    }
  }
  if (rep.max_feasible_alpha == kInf) rep.max_feasible_alpha = 0.0;
  return rep;
}

double rate_slope(const std::vector<double>& ks, const std::vector<double>& values,
                  double k_lo, double k_hi, int* n_excluded) {
  if (ks.size() != values.size()) throw ConfigError("rate_slope: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  int excluded = 0;
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < k_lo || ks[i] > k_hi) continue;
    if (!(values[i] > 0.0)) {
      ++excluded;
      continue;
    }
    double x = std::log(ks[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n_excluded) *n_excluded = excluded;
  if (n < 2) throw ConfigError("rate_slope: fewer than two positive values in range");
  double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

AnchorSet default_anchors(const HierarchicalProblem& p, int n_samples, AnchorLabel label) {
  AnchorSet a;
  a.label = label;
  if (p.lower_set) {
    const SegmentSet& seg = *p.lower_set;
    for (int i = 0; i < n_samples; ++i) {
      double s = seg.lo + (seg.hi - seg.lo) * (n_samples == 1 ? 0.0 : double(i) / (n_samples - 1));
      a.points.push_back(seg.base + s * seg.direction);
    }
  }
  if (p.solution_point) a.points.push_back(*p.solution_point);
  if (a.points.empty())
    throw ConfigError("default_anchors: problem has neither descriptor nor known solution; supply anchors");
  return a;
}

AnchorSet load_anchors(const std::string& path, AnchorLabel label) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open anchors file: " + path);
  AnchorSet a;
  a.label = label;
  std::string line;
  Eigen::Index dim = -1;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (row.empty()) continue;
    if (dim < 0) dim = (Eigen::Index)row.size();
    if ((Eigen::Index)row.size() != dim)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": ragged anchor row");
    a.points.push_back(Eigen::Map<Vector>(row.data(), dim));
  }
  if (a.points.empty()) throw ConfigError("anchors file is empty: " + path);
  return a;
}

}  // namespace hvi
