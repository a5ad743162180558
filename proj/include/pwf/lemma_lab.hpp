#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwf/constraints.hpp"
#include "pwf/geometry.hpp"
#include "pwf/model.hpp"

namespace pwf {

// ---------------------------------------------------------------------------
// Empirical verification of the proof machinery behind the solver: closed
// forms checked exactly, concentration statements checked by Monte Carlo at
// desk scale, and the regularity/curvature/smoothness conditions monitored
// along solver trajectories.
//
// Report convention: exact property checks store the largest observed margin
// violation in worst_violation with threshold 0 (plus any stated slack);
// Monte Carlo concentration gates store the empirical failure fraction with
// threshold 0.05, and put raw deviations in notes. The probability bounds in
// the source lemmas carry unquantified constants, so a small empirical
// failure rate is the only desk-scale gate available.
// ---------------------------------------------------------------------------

struct LemmaReport {
  std::string lemma_id;
  std::size_t trials = 0;
  double worst_violation = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string notes;
};

/// Constants for the regularity-condition check, fixed to the values used in
/// the intensity convergence analysis. beta grows linearly with the ambient
/// dimension: beta = beta_per_dim * n.
struct RegularityConstants {
  double alpha = 250.0;
  double lambda = 1.0 / 250.0;
  double gamma = 1.0 / 1000.0;
  double delta = 1.0 / 1000.0;
  double big_delta = 1.0 / 1000.0;
  double beta_per_dim = 13000.0;
  double ball_radius_frac = 1.0 / 8.0;

  double beta(std::size_t n) const { return beta_per_dim * static_cast<double>(n); }
};

/// E|<u,a><a,v>| for a ~ N(0, I):
/// (2/pi) ||u|| ||v|| (sin(theta) + cos(theta)(pi/2 - theta)) with theta the
/// angle between u and v (arccos argument clamped to [-1, 1]).
/// Always >= (2/pi) ||u|| ||v||.
double abs_moment_closed_form(const Vec& u, const Vec& v);

struct MomentEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo average of |<u,a><a,v>| over standard normal a.
MomentEstimate abs_moment_mc(const Vec& u, const Vec& v, std::size_t trials, std::uint64_t seed);

/// Three-piece truncation: 0 below beta(1-Delta), the linear ramp
/// (|h| - beta(1-Delta)) / Delta up to beta, and |h| above beta.
double truncation_map(double h, double beta, double delta);

/// f(z; beta) = sqrt(sum_r S(z_r; beta_r)^2) with Delta = 0.1. Verifies the
/// 1/Delta Lipschitz bound and radial convexity f(alpha z) <= alpha f(z)
/// over random (z, y, beta, alpha), slack 1e-9.
LemmaReport check_truncation_properties(std::size_t m, std::size_t trials, std::uint64_t seed);

/// Mean of squared row products, plain and d^2-weighted. With unit weights
/// the two coincide term for term.
struct IsometryStats {
  double plain = 0.0;     // (1/m) sum p_r^2
  double weighted = 0.0;  // sum d_r^2 p_r^2 / sum d_r^2
};
IsometryStats isometry_statistics(const Vec& products, const Vec& d_sq);

/// Gordon-type isometry on a cone, with cross-term and weighted variants.
/// Per fresh Gaussian matrix, checks over sampled unit cone directions:
///   |(1/m) sum (a_r' h)^2 - 1|                  <= delta
///   |(1/m) sum (a_r' u)(a_r' h) - u'h|          <= delta
///   |sum d_r^2 (a_r' h)^2 / sum d_r^2 - 1|      <= delta   (d_r in [0.5, 1.5])
/// A matrix counts as failed if any sampled direction violates any bound.
LemmaReport check_cone_isometry(const ConeModel& cone, std::size_t m, double delta,
                                std::size_t cone_samples, std::size_t matrix_trials,
                                std::uint64_t seed);

/// Population value ||h||^2 ||x||^2 + 2 (h'x)^2 of the mixed fourth moment.
double mixed_fourth_population(const Vec& h, const Vec& x);

/// One-sided mixed fourth-moment bound over sampled cone directions,
///   (1/m) sum (a_r'h)^2 (a_r'x)^2 - population <= delta,
/// plus the fourth-moment sub-fact |(1/m) sum (a_r'x)^4 - 3| <= delta/4.
/// x must be unit norm.
LemmaReport check_mixed_fourth_moment(const ConeModel& cone, const Vec& x, std::size_t m,
                                      double delta, std::size_t trials, std::uint64_t seed);

/// |(1/m) sum |<a_r,u><a_r,v>| - E| <= delta for sampled unit pairs from the
/// two cones, against the closed form. The stated sample bound is
/// m >= sample_factor * max of the cones' estimated squared widths.
LemmaReport check_abs_product_concentration(const ConeModel& cone_u, const ConeModel& cone_v,
                                            std::size_t m, double delta, std::size_t trials,
                                            std::uint64_t seed, double sample_factor = 100.0);

/// Minimum margin of the regularity condition
///   <grad L_I(z), z - x> >= (1/alpha) ||z-x||^2 + (1/beta) ||grad L_I(z)||^2
/// over trace points inside the ball dist(z, x) <= eps ||x|| (sign-aligned x;
/// outside points are skipped and counted). Also reports the local curvature
/// and local smoothness margins with the same constants.
LemmaReport check_regularity_condition(const MeasurementSet& meas, const ConstraintSet& set,
                                       const Vec& x, const std::vector<Vec>& trace_points,
                                       const RegularityConstants& constants = {});

/// E||g||_2 for g ~ N(0, I_m): sqrt(2) Gamma((m+1)/2) / Gamma(m/2), computed
/// through log-Gamma. Satisfies m - 1/2 <= value^2 <= m.
double expected_gaussian_norm(std::size_t m);

/// Bracket m - 1/2 <= b_m^2 <= m and monotonicity of b_m, m = 1..1000 plus
/// log-spaced samples up to max_m.
LemmaReport check_bm_bracket(std::size_t max_m);

/// Projection contraction factors over random (u in set, v): factor 1 for the
/// convex sets (l1 ball, nonnegative orthant), factor 2 for the nonconvex
/// ones (top-k, discrete). Zero violations expected (slack 1e-9).
LemmaReport check_projection_contraction(std::size_t trials, std::uint64_t seed);

/// |mean of g^4 - 3| <= delta/4 on every trial of m scalar standard normals.
/// m defaults far above the 1536/delta^2 proof threshold so the check can be
/// gated at zero violations.
LemmaReport check_gaussian_fourth_moment(std::size_t m, double delta, std::size_t trials,
                                         std::uint64_t seed);

}  // namespace pwf
