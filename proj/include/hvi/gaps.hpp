#ifndef HVI_GAPS_HPP
#define HVI_GAPS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hvi/core.hpp"

namespace hvi {

enum class AnchorLabel { feasibility, optimality };

// Finite anchor list standing in for the compact set of the localized gap;
// the computed gap is a lower bound on the supremum over any set containing
// the anchors.
struct AnchorSet {
  std::vector<Vector> points;
  AnchorLabel label = AnchorLabel::feasibility;
};

// H^{(F,g)}(z, y) = <F(y), z-y> + g(z) - g(y); +inf when z is outside dom g,
// hard error when y is.
double H_bifunction(const OperatorSpec& F, const ProxTerm& g, const Vector& z,
                    const Vector& y);

double gap_over_anchors(const OperatorSpec& F, const ProxTerm& g,
                        const AnchorSet& anchors, const Vector& z);

double feas_gap(const HierarchicalProblem& p, const AnchorSet& anchors_u2,
                const Vector& z);

// Anchors must lie in the declared S2 descriptor (tolerance 1e-8).
double opt_gap(const HierarchicalProblem& p, const AnchorSet& anchors_u1_cap_s2,
               const Vector& z);

Vector project_segment(const SegmentSet& seg, const Vector& z);
double dist_to_segment(const SegmentSet& seg, const Vector& z);

struct WeakSharpnessReport {
  int samples = 0;
  int violations = 0;
  double max_feasible_alpha = 0.0;  // empirical sup of alpha passing at fixed rho
};

// Samples the problem's box and tests H^{(F2,g2)}(z, proj_S2(z)) >=
// (alpha/rho) dist(z,S2)^rho - 1e-9.
WeakSharpnessReport weak_sharpness_probe(const HierarchicalProblem& p, int samples,
                                         double alpha, double rho, uint64_t seed);

// Least-squares slope of log(value) against log(k) over k in [k_lo, k_hi];
// nonpositive values are excluded (count reported via n_excluded).
double rate_slope(const std::vector<double>& ks, const std::vector<double>& values,
                  double k_lo, double k_hi, int* n_excluded = nullptr);

// Default anchors for descriptor-equipped problems: n_samples uniform
// parameter samples of the segment plus the known solution point.
AnchorSet default_anchors(const HierarchicalProblem& p, int n_samples = 64,
                          AnchorLabel label = AnchorLabel::feasibility);

// Plain-text matrix file: one point per row, whitespace-separated decimals.
AnchorSet load_anchors(const std::string& path, AnchorLabel label);

}  // namespace hvi

#endif
