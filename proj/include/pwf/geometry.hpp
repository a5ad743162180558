#pragma once

#include <cstdint>
#include <vector>

#include "pwf/linalg.hpp"
#include "pwf/rng.hpp"

namespace pwf {

// ---------------------------------------------------------------------------
// Descent-cone models with projection oracles, plus Monte Carlo estimation of
// the statistical dimension E||P_C(g)||^2, the estimator for the minimal
// sample function m0 = omega^2(C intersect B^n).
// ---------------------------------------------------------------------------

enum class ConeKind { subspace, nonneg_orthant, l1_descent };

struct ConeModel {
  ConeKind kind = ConeKind::nonneg_orthant;
  std::size_t n = 0;
  Mat basis;                      // subspace: n x d, orthonormal columns
  std::vector<int> support_signs; // l1_descent: entries in {-1, 0, +1}
};

ConeModel make_subspace_cone(const Mat& orthonormal_basis);
ConeModel make_orthant_cone(std::size_t n);

/// Descent cone of the l1 ball at an exactly sparse point. It depends on the
/// point only through its support and sign pattern, which is what makes the
/// polar projection a one-dimensional problem.
ConeModel make_l1_descent_cone(const std::vector<int>& support_signs);
ConeModel l1_descent_cone_of(const Vec& sparse_x);

/// Membership test used by sampling oracles (1e-12 slack on cone inequalities).
bool cone_contains(const ConeModel& cone, const Vec& h, double slack = 1e-12);

/// Euclidean projection onto the cone. l1_descent goes through the polar cone
/// via Moreau: P_C(v) = v - P_{C°}(v).
Vec project_cone(const ConeModel& cone, const Vec& v);

/// Projection onto the polar of the l1 descent cone,
/// {w : w_i = t * sign_i on the support, |w_i| <= t off it, t >= 0}.
/// Minimizes J(t) = sum_S (g_i - t sign_i)^2 + sum_off ((|g_i| - t)_+)^2 over
/// t >= 0 by bisection on the derivative to an interval of width 1e-10.
Vec polar_project_l1_descent(const ConeModel& cone, const Vec& g);

/// Unit-norm cone direction for Monte Carlo sampling: normalized projection
/// of a Gaussian vector (exact uniform for subspaces).
Vec sample_cone_direction(const ConeModel& cone, Rng& rng);

struct WidthEstimate {
  double mean_sq = 0.0;  // estimate of E||P_C(g)||^2 (statistical dimension)
  double mean = 0.0;     // estimate of E||P_C(g)||, approx omega(C intersect B^n)
  double stderr_ = 0.0;  // standard error of mean_sq
  std::size_t trials = 0;
};

/// Average ||P_C(g)||^2 and ||P_C(g)|| over Gaussian draws. Trials fan out
/// over threads with derived per-trial seeds; the reduction order is fixed,
/// so the result does not depend on the worker count.
WidthEstimate statistical_dimension_mc(const ConeModel& cone, std::size_t trials,
                                       std::uint64_t seed);

/// 2 s ln(n/s): the classic minimal-sample estimate for s-sparse recovery
/// with the l1 regularizer.
double m0_l1_sparse(std::size_t n, std::size_t s);

}  // namespace pwf
