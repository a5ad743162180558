#include "pwf/model.hpp"

#include <algorithm>
#include <cmath>

#include "pwf/kernels.hpp"
#include "pwf/rng.hpp"

namespace pwf {

Mat gen_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m >= 1 && n >= 1, "gen_gaussian_matrix: dimensions must be positive");
  Mat A(m, n);
  Rng rng(seed);
  rng.fill_normal(A.data);
  return A;
}

Vec forward_intensity(const Mat& A, const Vec& x) {
  require(A.cols == x.size(), "forward_intensity: dimension mismatch");
  Vec p;
  kernels::row_products(A, x, p);
  for (double& v : p) v = v * v;
  return p;
}

MeasurementSet make_measurements(const Vec& x, std::size_t m, std::uint64_t seed) {
  MeasurementSet meas;
  meas.A = gen_gaussian_matrix(m, x.size(), seed);
  meas.y = forward_intensity(meas.A, x);
  meas.seed = seed;
  return meas;
}

double loss_intensity(const Mat& A, const Vec& y, const Vec& z) {
  require(A.cols == z.size() && A.rows == y.size(), "loss_intensity: dimension mismatch");
  Vec p;
  kernels::row_products(A, z, p);
  Vec terms(A.rows);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double d = y[r] - p[r] * p[r];
    terms[r] = d * d;
  }
  return kernels::sum(terms) / (4.0 * static_cast<double>(A.rows));
}

Vec grad_intensity(const Mat& A, const Vec& y, const Vec& z) {
  require(A.cols == z.size() && A.rows == y.size(), "grad_intensity: dimension mismatch");
  Vec p;
  kernels::row_products(A, z, p);
  Vec w(A.rows);
  for (std::size_t r = 0; r < A.rows; ++r) w[r] = (p[r] * p[r] - y[r]) * p[r];
  Vec g;
  kernels::weighted_column_sums(A, w, g);
  scale(g, 1.0 / static_cast<double>(A.rows));
  return g;
}

double loss_amplitude(const Mat& A, const Vec& y, const Vec& z) {
  require(A.cols == z.size() && A.rows == y.size(), "loss_amplitude: dimension mismatch");
  for (double v : y) require(v >= 0.0, "loss_amplitude: negative intensity");
  Vec p;
  kernels::row_products(A, z, p);
  Vec terms(A.rows);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double d = std::sqrt(y[r]) - std::abs(p[r]);
    terms[r] = d * d;
  }
  return kernels::sum(terms) / (2.0 * static_cast<double>(A.rows));
}

Vec grad_amplitude(const Mat& A, const Vec& y, const Vec& z) {
  require(A.cols == z.size() && A.rows == y.size(), "grad_amplitude: dimension mismatch");
  for (double v : y) require(v >= 0.0, "grad_amplitude: negative intensity");
  Vec p;
  kernels::row_products(A, z, p);
  Vec w(A.rows);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double sgn = (p[r] < 0.0) ? -1.0 : 1.0;  // sgn(0) := +1
    w[r] = (std::abs(p[r]) - std::sqrt(y[r])) * sgn;
  }
  Vec g;
  kernels::weighted_column_sums(A, w, g);
  scale(g, 1.0 / static_cast<double>(A.rows));
  return g;
}

double sign_invariant_dist(const Vec& z, const Vec& x) {
  require(z.size() == x.size(), "sign_invariant_dist: dimension mismatch");
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double a = z[i] - x[i];
    const double b = z[i] + x[i];
    dm += a * a;
    dp += b * b;
  }
  return std::sqrt(std::min(dm, dp));
}

double estimate_signal_norm(const Vec& y) {
  require(!y.empty(), "estimate_signal_norm: empty measurement vector");
  double s = 0.0;
  for (double v : y) {
    require(v >= 0.0, "estimate_signal_norm: negative intensity");
    s += v;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

Signal gen_structured_signal(const SignalSpec& spec, std::uint64_t seed) {
  require(spec.n >= 1, "gen_structured_signal: n must be positive");
  Rng rng(seed);
  Signal sig;
  sig.spec = spec;
  sig.values.assign(spec.n, 0.0);

  switch (spec.kind) {
    case StructureKind::sparse: {
      require(spec.sparsity <= spec.n, "gen_structured_signal: sparsity exceeds dimension");
      // Partial Fisher-Yates: first s entries of a shuffled index list.
      std::vector<std::size_t> idx(spec.n);
      for (std::size_t i = 0; i < spec.n; ++i) idx[i] = i;
      for (std::size_t i = 0; i < spec.sparsity; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(spec.n - i));
        std::swap(idx[i], idx[j]);
      }
      for (std::size_t i = 0; i < spec.sparsity; ++i)
        sig.values[idx[i]] = rng.normal_nonzero();
      break;
    }
    case StructureKind::discrete: {
      require(!spec.alphabet.empty(), "gen_structured_signal: empty alphabet");
      for (std::size_t i = 0; i < spec.n; ++i)
        sig.values[i] = spec.alphabet[rng.below(spec.alphabet.size())];
      break;
    }
    case StructureKind::piecewise_constant: {
      require(spec.segments >= 1 && spec.segments <= spec.n,
              "gen_structured_signal: invalid segment count");
      for (std::size_t s = 0; s < spec.segments; ++s) {
        const double level = rng.normal();
        const std::size_t lo = s * spec.n / spec.segments;
        const std::size_t hi = (s + 1) * spec.n / spec.segments;
        for (std::size_t i = lo; i < hi; ++i) sig.values[i] = level;
      }
      break;
    }
    case StructureKind::dense:
      rng.fill_normal(sig.values);
      break;
  }
  return sig;
}

}  // namespace pwf
