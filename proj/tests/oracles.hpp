#pragma once

// Test-only oracles, independent of the library's implementation paths:
// finite differences for gradients, exhaustive enumeration for projections,
// grid search for the polar projection. Expected values frozen in the tests
// were computed with these.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pwf/geometry.hpp"
#include "pwf/linalg.hpp"

namespace oracles {

using pwf::Vec;

/// Central finite differences with step h * (1 + ||z||).
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z,
                       double h = 1e-6) {
  const double step = h * (1.0 + pwf::norm2(z));
  Vec g(z.size());
  Vec zp = z, zm = z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zp[i] = z[i] + step;
    zm[i] = z[i] - step;
    g[i] = (f(zp) - f(zm)) / (2.0 * step);
    zp[i] = z[i];
    zm[i] = z[i];
  }
  return g;
}

/// l1-ball projection by exhaustive active-set enumeration (n <= ~16).
/// For each support S, the KKT candidate soft-thresholds |v| by
/// theta_S = (sum_S |v_i| - r) / |S|; feasible candidates must keep the
/// support positive and dominate the off-support magnitudes.
inline Vec project_l1_oracle(const Vec& v, double radius) {
  const std::size_t n = v.size();
  if (pwf::norm1(v) <= radius) return v;
  if (radius <= 0.0) return Vec(n, 0.0);
  Vec best(n, 0.0);
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t(1) << i)) {
        sum += std::abs(v[i]);
        ++count;
      }
    const double theta = (sum - radius) / static_cast<double>(count);
    if (theta < 0.0) continue;
    bool feasible = true;
    Vec w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t(1) << i)) {
        const double shrunk = std::abs(v[i]) - theta;
        if (shrunk < 0.0) {
          feasible = false;
          break;
        }
        w[i] = v[i] < 0.0 ? -shrunk : shrunk;
      } else if (std::abs(v[i]) > theta) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const double dist = pwf::norm2(pwf::sub(w, v));
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
  }
  return best;
}

/// top-k projection by enumerating all supports of size k.
inline Vec project_topk_oracle(const Vec& v, std::size_t k) {
  const std::size_t n = v.size();
  if (k >= n) return v;
  Vec best(n, 0.0);
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t(1) << i)) ++count;
    if (count != k) continue;
    Vec w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t(1) << i)) w[i] = v[i];
    const double dist = pwf::norm2(pwf::sub(w, v));
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
  }
  return best;
}

/// Discrete projection by enumerating every alphabet assignment (k^n).
inline Vec project_discrete_oracle(const Vec& v, const std::vector<double>& alphabet) {
  const std::size_t n = v.size();
  const std::size_t k = alphabet.size();
  std::vector<std::size_t> assign(n, 0);
  Vec best(n, alphabet[0]);
  double best_dist = std::numeric_limits<double>::infinity();
  for (;;) {
    Vec w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = alphabet[assign[i]];
    const double dist = pwf::norm2(pwf::sub(w, v));
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
    std::size_t pos = 0;
    while (pos < n && ++assign[pos] == k) {
      assign[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return best;
}

/// Polar projection of the l1 descent cone by brute grid search over the ray
/// parameter t in [0, 10 ||g||].
inline Vec polar_l1_descent_grid_oracle(const pwf::ConeModel& cone, const Vec& g,
                                        double step = 1e-5) {
  const std::vector<int>& sg = cone.support_signs;
  auto objective = [&](double t) {
    double j = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (sg[i] != 0) {
        const double d = g[i] - t * sg[i];
        j += d * d;
      } else {
        const double excess = std::abs(g[i]) - t;
        if (excess > 0.0) j += excess * excess;
      }
    }
    return j;
  };
  const double hi = 10.0 * pwf::norm2(g);
  double best_t = 0.0, best_j = objective(0.0);
  for (double t = step; t <= hi; t += step) {
    const double j = objective(t);
    if (j < best_j) {
      best_j = j;
      best_t = t;
    }
  }
  Vec w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    w[i] = sg[i] != 0 ? best_t * sg[i] : std::clamp(g[i], -best_t, best_t);
  return w;
}

}  // namespace oracles
