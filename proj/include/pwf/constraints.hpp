#pragma once

#include <stdexcept>
#include <vector>

#include "pwf/linalg.hpp"

namespace pwf {

// ---------------------------------------------------------------------------
// Regularizers R and their sublevel sets K = {z : R(z) <= R(x)}.
//
// TV regularizers are evaluate-only: their sublevel sets have no closed-form
// Euclidean projection, so requesting one raises unsupported_projection.
// ---------------------------------------------------------------------------

/// Raised when a regularizer has no projectable sublevel set (the TV kinds).
struct unsupported_projection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RegKind { l1, l0, tv_iso, tv_aniso, discrete_indicator, none };

struct Regularizer {
  RegKind kind = RegKind::none;
  double p = 1.0;                  // TV exponent, > 0
  std::vector<double> alphabet;    // discrete_indicator: strictly increasing
};

enum class SetKind { unconstrained, l1_ball, top_k, discrete, nonneg };

struct ConstraintSet {
  SetKind kind = SetKind::unconstrained;
  std::size_t n = 0;
  double radius = 0.0;             // l1_ball
  std::size_t k = 0;               // top_k
  std::vector<double> alphabet;    // discrete
};

/// R(z) for 1-D data. TV kinds need a 2-D shape and throw here.
double evaluate(const Regularizer& reg, const Vec& z);

/// R(z) for an image stored row-major as rows x cols. TV uses forward
/// differences; differences past the last row/column are zero.
double evaluate(const Regularizer& reg, const Vec& z, std::size_t rows, std::size_t cols);

/// Sublevel set of R at x: l1 -> l1_ball(||x||_1), l0 -> top_k(nnz(x)),
/// discrete_indicator -> discrete(alphabet), none -> unconstrained.
ConstraintSet sublevel_from_signal(const Regularizer& reg, const Vec& x);

ConstraintSet nonneg_set(std::size_t n);

/// Euclidean projection onto the set; exact for every supported variant.
///   l1_ball   sort-and-threshold (exact theta, no iteration)
///   top_k     keep the k largest magnitudes, ties keep the lower index
///   discrete  round each entry to the nearest member, midpoints down
///   nonneg    clamp negatives to zero
Vec project(const ConstraintSet& set, const Vec& v);

}  // namespace pwf
