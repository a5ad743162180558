#include "pwf/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pwf/parallel.hpp"

namespace pwf {

ConeModel make_subspace_cone(const Mat& orthonormal_basis) {
  ConeModel cone;
  cone.kind = ConeKind::subspace;
  cone.n = orthonormal_basis.rows;
  cone.basis = orthonormal_basis;
  const std::size_t d = orthonormal_basis.cols;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < cone.n; ++i)
        s += orthonormal_basis(i, a) * orthonormal_basis(i, b);
      const double want = (a == b) ? 1.0 : 0.0;
      require(std::abs(s - want) <= 1e-10, "make_subspace_cone: basis not orthonormal");
    }
  }
  return cone;
}

ConeModel make_orthant_cone(std::size_t n) {
  require(n >= 1, "make_orthant_cone: n must be positive");
  ConeModel cone;
  cone.kind = ConeKind::nonneg_orthant;
  cone.n = n;
  return cone;
}

ConeModel make_l1_descent_cone(const std::vector<int>& support_signs) {
  ConeModel cone;
  cone.kind = ConeKind::l1_descent;
  cone.n = support_signs.size();
  cone.support_signs = support_signs;
  bool any = false;
  for (int s : support_signs) {
    require(s == -1 || s == 0 || s == 1, "make_l1_descent_cone: signs must be in {-1,0,+1}");
    if (s != 0) any = true;
  }
  require(any, "make_l1_descent_cone: support must be nonempty");
  return cone;
}

ConeModel l1_descent_cone_of(const Vec& sparse_x) {
  std::vector<int> signs(sparse_x.size(), 0);
  for (std::size_t i = 0; i < sparse_x.size(); ++i)
    signs[i] = sparse_x[i] > 0.0 ? 1 : (sparse_x[i] < 0.0 ? -1 : 0);
  return make_l1_descent_cone(signs);
}

bool cone_contains(const ConeModel& cone, const Vec& h, double slack) {
  require(h.size() == cone.n, "cone_contains: dimension mismatch");
  switch (cone.kind) {
    case ConeKind::subspace: {
      // h minus its subspace component must vanish.
      Vec p = project_cone(cone, h);
      double resid = 0.0;
      for (std::size_t i = 0; i < cone.n; ++i) resid = std::max(resid, std::abs(h[i] - p[i]));
      return resid <= slack * (1.0 + norm2(h));
    }
    case ConeKind::nonneg_orthant: {
      for (double v : h)
        if (v < -slack) return false;
      return true;
    }
    case ConeKind::l1_descent: {
      // Directional derivative of the l1 norm along h at the sparse point.
      double dd = 0.0;
      for (std::size_t i = 0; i < cone.n; ++i) {
        if (cone.support_signs[i] != 0)
          dd += cone.support_signs[i] * h[i];
        else
          dd += std::abs(h[i]);
      }
      return dd <= slack * (1.0 + norm2(h));
    }
  }
  return false;
}

Vec polar_project_l1_descent(const ConeModel& cone, const Vec& g) {
  require(cone.kind == ConeKind::l1_descent, "polar_project_l1_descent: wrong cone kind");
  require(g.size() == cone.n, "polar_project_l1_descent: dimension mismatch");
  const std::vector<int>& sg = cone.support_signs;

  double support_size = 0.0, signed_sum = 0.0, off_abs_sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (sg[i] != 0) {
      support_size += 1.0;
      signed_sum += sg[i] * g[i];
    } else {
      off_abs_sum += std::abs(g[i]);
    }
  }

  // J'(t)/2 = support_size * t - signed_sum - sum_off (|g_i| - t)_+, nondecreasing.
  auto half_deriv = [&](double t) {
    double s = support_size * t - signed_sum;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (sg[i] == 0) {
        const double excess = std::abs(g[i]) - t;
        if (excess > 0.0) s -= excess;
      }
    return s;
  };

  double t_star = 0.0;
  if (half_deriv(0.0) < 0.0) {
    double lo = 0.0;
    double hi = std::max(signed_sum + off_abs_sum, 0.0) / support_size + 1.0;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (half_deriv(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    t_star = 0.5 * (lo + hi);
  }

  Vec w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (sg[i] != 0)
      w[i] = t_star * sg[i];
    else
      w[i] = std::clamp(g[i], -t_star, t_star);
  }
  return w;
}

Vec project_cone(const ConeModel& cone, const Vec& v) {
  require(v.size() == cone.n, "project_cone: dimension mismatch");
  switch (cone.kind) {
    case ConeKind::subspace: {
      const std::size_t d = cone.basis.cols;
      Vec coeff(d, 0.0);
      for (std::size_t a = 0; a < d; ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < cone.n; ++i) s += cone.basis(i, a) * v[i];
        coeff[a] = s;
      }
      Vec out(cone.n, 0.0);
      for (std::size_t i = 0; i < cone.n; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < d; ++a) s += cone.basis(i, a) * coeff[a];
        out[i] = s;
      }
      return out;
    }
    case ConeKind::nonneg_orthant: {
      Vec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
      return out;
    }
    case ConeKind::l1_descent: {
      Vec w = polar_project_l1_descent(cone, v);
      Vec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - w[i];
      return out;
    }
  }
  throw std::invalid_argument("project_cone: unknown cone kind");
}

Vec sample_cone_direction(const ConeModel& cone, Rng& rng) {
  for (;;) {
    Vec g = rng.normal_vector(cone.n);
    Vec p = project_cone(cone, g);
    const double pn = norm2(p);
    if (pn > 1e-12) {
      scale(p, 1.0 / pn);
      return p;
    }
  }
}

WidthEstimate statistical_dimension_mc(const ConeModel& cone, std::size_t trials,
                                       std::uint64_t seed) {
  require(trials >= 2, "statistical_dimension_mc: need at least 2 trials");
  Vec sq(trials), len(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    Vec g = rng.normal_vector(cone.n);
    Vec p = project_cone(cone, g);
    const double s = dot(p, p);
    sq[t] = s;
    len[t] = std::sqrt(s);
  });

  WidthEstimate est;
  est.trials = trials;
  const double tn = static_cast<double>(trials);
  double sum_sq = 0.0, sum_len = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    sum_sq += sq[t];
    sum_len += len[t];
  }
  est.mean_sq = sum_sq / tn;
  est.mean = sum_len / tn;
  double var = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double d = sq[t] - est.mean_sq;
    var += d * d;
  }
  var /= (tn - 1.0);
  est.stderr_ = std::sqrt(var / tn);
  return est;
}

double m0_l1_sparse(std::size_t n, std::size_t s) {
  require(s >= 1 && s <= n, "m0_l1_sparse: need 1 <= s <= n");
  return 2.0 * static_cast<double>(s) *
         std::log(static_cast<double>(n) / static_cast<double>(s));
}

}  // namespace pwf
