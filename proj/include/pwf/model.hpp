#pragma once

#include <cstdint>
#include <vector>

#include "pwf/linalg.hpp"

namespace pwf {

// ---------------------------------------------------------------------------
// Signals and measurements.
//
// The measurement model is y_r = <a_r, x>^2 with real Gaussian rows a_r.
// Everything here is a pure function of its inputs; RNG state enters only
// through explicit seeds.
// ---------------------------------------------------------------------------

enum class StructureKind { sparse, discrete, piecewise_constant, dense };

struct SignalSpec {
  StructureKind kind = StructureKind::dense;
  std::size_t n = 0;
  std::size_t sparsity = 0;           // sparse: exact nonzero count
  std::vector<double> alphabet;       // discrete: sorted admissible values
  std::size_t segments = 1;           // piecewise_constant: contiguous pieces
};

struct Signal {
  Vec values;
  SignalSpec spec;
};

struct MeasurementSet {
  Mat A;              // m x n sensing matrix
  Vec y;              // nonnegative intensities, length m
  std::uint64_t seed = 0;

  std::size_t m() const { return A.rows; }
  std::size_t n() const { return A.cols; }
};

/// m x n matrix of i.i.d. standard normals from the documented generator.
/// Identical (m, n, seed) gives identical matrices.
Mat gen_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

/// y_r = <a_r, x>^2.
Vec forward_intensity(const Mat& A, const Vec& x);

/// Convenience: Gaussian A plus exact intensities of x.
MeasurementSet make_measurements(const Vec& x, std::size_t m, std::uint64_t seed);

/// Quadratic loss on intensities: (1/4m) sum_r (y_r - <a_r,z>^2)^2.
double loss_intensity(const Mat& A, const Vec& y, const Vec& z);

/// grad = (1/m) sum_r (<a_r,z>^2 - y_r) <a_r,z> a_r.
Vec grad_intensity(const Mat& A, const Vec& y, const Vec& z);

/// Quadratic loss on amplitudes: (1/2m) sum_r (sqrt(y_r) - |<a_r,z>|)^2.
double loss_amplitude(const Mat& A, const Vec& y, const Vec& z);

/// Generalized gradient (1/m) sum_r (|<a_r,z>| - sqrt(y_r)) sgn(<a_r,z>) a_r,
/// with sgn(0) := +1 so the selection at kinks is deterministic.
Vec grad_amplitude(const Mat& A, const Vec& y, const Vec& z);

/// min(||z - x||, ||z + x||): the natural metric under the global sign
/// ambiguity of quadratic measurements.
double sign_invariant_dist(const Vec& z, const Vec& x);

/// sqrt(mean(y)), a consistent estimate of ||x|| since E y_r = ||x||^2.
double estimate_signal_norm(const Vec& y);

/// Draw a signal matching the structural spec. Sparse supports are chosen
/// uniformly with standard normal values; discrete entries are uniform over
/// the alphabet; piecewise levels are standard normal.
Signal gen_structured_signal(const SignalSpec& spec, std::uint64_t seed);

}  // namespace pwf
