#include "pwf/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pwf/kernels.hpp"
#include "pwf/parallel.hpp"
#include "pwf/rng.hpp"

namespace pwf {

namespace {

constexpr double kFailureGate = 0.05;  // desk-scale gate on MC failure fractions

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double abs_moment_closed_form(const Vec& u, const Vec& v) {
  require(u.size() == v.size(), "abs_moment_closed_form: dimension mismatch");
  const double nu = norm2(u), nv = norm2(v);
  require(nu > 0.0 && nv > 0.0, "abs_moment_closed_form: zero vector");
  const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
  const double theta = std::acos(c);
  const double half_pi = std::numbers::pi / 2.0;
  return (2.0 / std::numbers::pi) * nu * nv *
         (std::sin(theta) + std::cos(theta) * (half_pi - theta));
}

MomentEstimate abs_moment_mc(const Vec& u, const Vec& v, std::size_t trials, std::uint64_t seed) {
  require(u.size() == v.size(), "abs_moment_mc: dimension mismatch");
  require(trials >= 2, "abs_moment_mc: need at least 2 trials");
  const std::size_t n = u.size();
  Rng rng(seed);
  Vec a(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    rng.fill_normal(a);
    const double s = std::abs(dot(u, a) * dot(a, v));
    sum += s;
    sum_sq += s * s;
  }
  const double tn = static_cast<double>(trials);
  MomentEstimate est;
  est.estimate = sum / tn;
  const double var = std::max(0.0, (sum_sq - tn * est.estimate * est.estimate) / (tn - 1.0));
  est.stderr_ = std::sqrt(var / tn);
  return est;
}

double truncation_map(double h, double beta, double delta) {
  require(delta > 0.0 && delta < 1.0, "truncation_map: Delta must lie in (0,1)");
  require(beta >= 0.0, "truncation_map: beta must be nonnegative");
  const double a = std::abs(h);
  if (a < beta * (1.0 - delta)) return 0.0;
  if (a <= beta) return (a - beta * (1.0 - delta)) / delta;
  return a;
}

LemmaReport check_truncation_properties(std::size_t m, std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, "check_truncation_properties: need at least 1 trial");
  const double delta = 0.1;
  const double slack = 1e-9;

  auto f = [&](const Vec& z, const Vec& beta) {
    double s = 0.0;
    for (std::size_t r = 0; r < z.size(); ++r) {
      const double t = truncation_map(z[r], beta[r], delta);
      s += t * t;
    }
    return std::sqrt(s);
  };

  Rng rng(seed);
  Vec z(m), y(m), beta(m);
  double worst = -1e300;
  for (std::size_t t = 0; t < trials; ++t) {
    // Spread the scales so the ramp region gets exercised.
    const double sz = std::exp(rng.normal());
    for (std::size_t r = 0; r < m; ++r) {
      z[r] = sz * rng.normal();
      y[r] = sz * rng.normal();
      beta[r] = std::abs(rng.normal());
    }
    const double alpha = rng.uniform01();
    const double fz = f(z, beta), fy = f(y, beta);

    const double lip = std::abs(fz - fy) - norm2(sub(z, y)) / delta - slack;
    Vec az = z;
    scale(az, alpha);
    const double rad = f(az, beta) - alpha * fz - slack;
    worst = std::max({worst, lip, rad});
  }

  LemmaReport rep;
  rep.lemma_id = "truncation";
  rep.trials = trials;
  rep.worst_violation = worst;
  rep.threshold = 0.0;
  rep.passed = rep.worst_violation <= rep.threshold;
  rep.notes = "Lipschitz 1/Delta and radial convexity, Delta=0.1, slack 1e-9, m=" +
              std::to_string(m);
  return rep;
}

IsometryStats isometry_statistics(const Vec& products, const Vec& d_sq) {
  require(products.size() == d_sq.size(), "isometry_statistics: length mismatch");
  const std::size_t m = products.size();
  double s = 0.0, sw = 0.0, d_sum = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double q = products[r] * products[r];
    s += q;
    sw += d_sq[r] * q;
    d_sum += d_sq[r];
  }
  return {s / static_cast<double>(m), sw / d_sum};
}

LemmaReport check_cone_isometry(const ConeModel& cone, std::size_t m, double delta,
                                std::size_t cone_samples, std::size_t matrix_trials,
                                std::uint64_t seed) {
  require(m >= 1 && cone_samples >= 1 && matrix_trials >= 1, "check_cone_isometry: empty plan");
  require(delta > 0.0, "check_cone_isometry: delta must be positive");

  const WidthEstimate width =
      statistical_dimension_mc(cone, 2000, substream_seed(seed, 0x57494454u));
  const double omega_sq = width.mean * width.mean;
  const double required =
      std::max({80.0 * omega_sq / (delta * delta), 2.0 / delta - 1.0, 1.0});

  std::vector<int> failed(matrix_trials, 0);
  Vec worst_dev(matrix_trials, 0.0);
  parallel_for(matrix_trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    Mat A = gen_gaussian_matrix(m, cone.n, rng.next_u64());
    Vec d_sq(m);
    for (std::size_t r = 0; r < m; ++r) {
      const double dr = 0.5 + rng.uniform01();  // nonzero weights in [0.5, 1.5]
      d_sq[r] = dr * dr;
    }

    double dev = 0.0;
    Vec ph, pu;
    for (std::size_t i = 0; i < cone_samples; ++i) {
      const Vec h = sample_cone_direction(cone, rng);
      const Vec u = sample_cone_direction(cone, rng);
      kernels::row_products(A, h, ph);
      kernels::row_products(A, u, pu);

      const IsometryStats st = isometry_statistics(ph, d_sq);
      dev = std::max(dev, std::abs(st.plain - 1.0));
      dev = std::max(dev, std::abs(st.weighted - 1.0));

      double cross = 0.0;
      for (std::size_t r = 0; r < m; ++r) cross += pu[r] * ph[r];
      cross /= static_cast<double>(m);
      dev = std::max(dev, std::abs(cross - dot(u, h)));
    }
    worst_dev[t] = dev;
    failed[t] = dev > delta ? 1 : 0;
  });

  std::size_t fails = 0;
  double dev_max = 0.0;
  for (std::size_t t = 0; t < matrix_trials; ++t) {
    fails += failed[t];
    dev_max = std::max(dev_max, worst_dev[t]);
  }

  LemmaReport rep;
  rep.lemma_id = "cone_isometry";
  rep.trials = matrix_trials;
  rep.worst_violation = static_cast<double>(fails) / static_cast<double>(matrix_trials);
  rep.threshold = kFailureGate;
  rep.passed = rep.worst_violation <= rep.threshold;
  std::ostringstream notes;
  notes << "worst deviation " << fmt(dev_max) << " at delta " << fmt(delta) << ", m=" << m
        << ", required m>=" << fmt(required) << " (est. width^2 " << fmt(omega_sq) << "), "
        << cone_samples << " directions/matrix";
  if (static_cast<double>(m) < required) notes << "; WARNING: m below the stated bound";
  rep.notes = notes.str();
  return rep;
}

double mixed_fourth_population(const Vec& h, const Vec& x) {
  const double hx = dot(h, x);
  return dot(h, h) * dot(x, x) + 2.0 * hx * hx;
}

LemmaReport check_mixed_fourth_moment(const ConeModel& cone, const Vec& x, std::size_t m,
                                      double delta, std::size_t trials, std::uint64_t seed) {
  require(x.size() == cone.n, "check_mixed_fourth_moment: dimension mismatch");
  require(std::abs(norm2(x) - 1.0) <= 1e-8, "check_mixed_fourth_moment: x must be unit norm");
  require(trials >= 1, "check_mixed_fourth_moment: need at least 1 trial");

  const WidthEstimate width =
      statistical_dimension_mc(cone, 2000, substream_seed(seed, 0x57494454u));
  const double omega_sq = width.mean * width.mean;
  const double required =
      1600.0 * std::max(omega_sq * std::log(static_cast<double>(cone.n)) / (delta * delta),
                        1.0 / (delta * delta));
  const double fourth_required = 1536.0 / (delta * delta);
  constexpr std::size_t kDirections = 20;

  std::vector<int> failed(trials, 0);
  Vec worst_dev(trials, 0.0), fourth_dev(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    Mat A = gen_gaussian_matrix(m, cone.n, rng.next_u64());
    Vec px;
    kernels::row_products(A, x, px);

    double f4 = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double q = px[r] * px[r];
      f4 += q * q;
    }
    f4 /= static_cast<double>(m);
    fourth_dev[t] = std::abs(f4 - 3.0);

    double dev = -1e300;
    Vec ph;
    for (std::size_t i = 0; i < kDirections; ++i) {
      const Vec h = sample_cone_direction(cone, rng);
      kernels::row_products(A, h, ph);
      double mixed = 0.0;
      for (std::size_t r = 0; r < m; ++r) mixed += ph[r] * ph[r] * px[r] * px[r];
      mixed /= static_cast<double>(m);
      dev = std::max(dev, mixed - mixed_fourth_population(h, x));  // one-sided
    }
    worst_dev[t] = dev;
    failed[t] = (dev > delta || fourth_dev[t] > delta / 4.0) ? 1 : 0;
  });

  std::size_t fails = 0;
  double dev_max = -1e300, f4_max = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    fails += failed[t];
    dev_max = std::max(dev_max, worst_dev[t]);
    f4_max = std::max(f4_max, fourth_dev[t]);
  }

  LemmaReport rep;
  rep.lemma_id = "mixed_fourth_moment";
  rep.trials = trials;
  rep.worst_violation = static_cast<double>(fails) / static_cast<double>(trials);
  rep.threshold = kFailureGate;
  rep.passed = rep.worst_violation <= rep.threshold;
  std::ostringstream notes;
  notes << "worst one-sided deviation " << fmt(dev_max) << " at delta " << fmt(delta)
        << ", worst fourth-moment deviation " << fmt(f4_max) << " at delta/4 "
        << fmt(delta / 4.0) << ", m=" << m << ", required m>=" << fmt(required)
        << ", fourth-moment m>=" << fmt(fourth_required);
  if (static_cast<double>(m) < required) notes << "; WARNING: m below the stated bound";
  rep.notes = notes.str();
  return rep;
}

LemmaReport check_abs_product_concentration(const ConeModel& cone_u, const ConeModel& cone_v,
                                            std::size_t m, double delta, std::size_t trials,
                                            std::uint64_t seed, double sample_factor) {
  require(cone_u.n == cone_v.n, "check_abs_product_concentration: dimension mismatch");
  require(trials >= 1, "check_abs_product_concentration: need at least 1 trial");

  const WidthEstimate wu =
      statistical_dimension_mc(cone_u, 2000, substream_seed(seed, 0x57555555u));
  const WidthEstimate wv =
      statistical_dimension_mc(cone_v, 2000, substream_seed(seed, 0x57565656u));
  const double required =
      sample_factor * std::max(wu.mean * wu.mean, wv.mean * wv.mean);
  constexpr std::size_t kPairs = 50;

  std::vector<int> failed(trials, 0);
  Vec worst_dev(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    Mat A = gen_gaussian_matrix(m, cone_u.n, rng.next_u64());
    double dev = 0.0;
    Vec pu, pv;
    for (std::size_t i = 0; i < kPairs; ++i) {
      const Vec u = sample_cone_direction(cone_u, rng);
      const Vec v = sample_cone_direction(cone_v, rng);
      kernels::row_products(A, u, pu);
      kernels::row_products(A, v, pv);
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += std::abs(pu[r] * pv[r]);
      s /= static_cast<double>(m);
      dev = std::max(dev, std::abs(s - abs_moment_closed_form(u, v)));
    }
    worst_dev[t] = dev;
    failed[t] = dev > delta ? 1 : 0;
  });

  std::size_t fails = 0;
  double dev_max = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    fails += failed[t];
    dev_max = std::max(dev_max, worst_dev[t]);
  }

  LemmaReport rep;
  rep.lemma_id = "abs_product";
  rep.trials = trials;
  rep.worst_violation = static_cast<double>(fails) / static_cast<double>(trials);
  rep.threshold = kFailureGate;
  rep.passed = rep.worst_violation <= rep.threshold;
  std::ostringstream notes;
  notes << "worst deviation " << fmt(dev_max) << " at delta " << fmt(delta) << ", m=" << m
        << ", required m>=" << fmt(required) << " (factor " << fmt(sample_factor) << ")";
  if (static_cast<double>(m) < required) notes << "; WARNING: m below the stated bound";
  rep.notes = notes.str();
  return rep;
}

LemmaReport check_regularity_condition(const MeasurementSet& meas, const ConstraintSet& set,
                                       const Vec& x, const std::vector<Vec>& trace_points,
                                       const RegularityConstants& constants) {
  require(!trace_points.empty(), "check_regularity_condition: no trace points");
  require(x.size() == meas.n(), "check_regularity_condition: dimension mismatch");
  (void)set;

  const double xn = norm2(x);
  const double ball = constants.ball_radius_frac * xn;
  const double beta = constants.beta(meas.n());
  const double md = static_cast<double>(meas.m());

  double rc_min = 1e300, lcc_min = 1e300, lsc_min = 1e300;
  std::size_t skipped = 0, used = 0;
  for (const Vec& z : trace_points) {
    require(z.size() == x.size(), "check_regularity_condition: trace point length mismatch");
    if (sign_invariant_dist(z, x) > ball) {
      ++skipped;
      continue;
    }
    ++used;
    // Align the global sign so h = z - x is the short difference.
    Vec xs = x;
    if (norm2(sub(z, x)) > norm2(add(z, x))) scale(xs, -1.0);
    const Vec h = sub(z, xs);
    const Vec g = grad_intensity(meas.A, meas.y, z);

    const double hh = dot(h, h);
    const double gg = dot(g, g);
    const double gh = dot(g, h);

    Vec ph;
    kernels::row_products(meas.A, h, ph);
    double quartic = 0.0;
    for (double p : ph) quartic += p * p * p * p;
    quartic /= md;

    rc_min = std::min(rc_min, gh - hh / constants.alpha - gg / beta);
    lcc_min = std::min(lcc_min,
                       gh - (1.0 / constants.alpha + constants.lambda) * hh -
                           constants.gamma * quartic);
    lsc_min = std::min(lsc_min, beta * (constants.lambda * hh + constants.gamma * quartic) - gg);
  }

  LemmaReport rep;
  rep.lemma_id = "regularity";
  rep.trials = used;
  rep.worst_violation = used > 0 ? -rc_min : 1e300;
  rep.threshold = 1e-9;
  rep.passed = rep.worst_violation <= rep.threshold;
  std::ostringstream notes;
  notes << "RC min margin " << fmt(used > 0 ? rc_min : 0.0) << ", LCC min margin "
        << fmt(used > 0 ? lcc_min : 0.0) << ", LSC min margin " << fmt(used > 0 ? lsc_min : 0.0)
        << ", points used " << used << ", outside ball " << skipped << ", alpha "
        << fmt(constants.alpha) << ", beta " << fmt(beta);
  rep.notes = notes.str();
  return rep;
}

double expected_gaussian_norm(std::size_t m) {
  require(m >= 1, "expected_gaussian_norm: m must be positive");
  const double md = static_cast<double>(m);
  if (m < 128)
    return std::exp(0.5 * std::log(2.0) + std::lgamma((md + 1.0) / 2.0) - std::lgamma(md / 2.0));
  // The log-Gamma difference cancels catastrophically for large m (the
  // bracket m - 1/2 <= b_m^2 <= m is only ~1/(8m) away from its lower edge),
  // so switch to the Gamma-ratio asymptotic series, accurate to O(m^-5) here.
  const double i = 1.0 / md;
  return std::sqrt(md) *
         (1.0 + i * (-0.25 + i * (1.0 / 32.0 + i * (5.0 / 128.0 + i * (-21.0 / 2048.0)))));
}

LemmaReport check_bm_bracket(std::size_t max_m) {
  require(max_m >= 1, "check_bm_bracket: max_m must be positive");
  std::vector<std::size_t> ms;
  for (std::size_t m = 1; m <= std::min<std::size_t>(max_m, 1000); ++m) ms.push_back(m);
  for (double v = 1000.0; v < static_cast<double>(max_m); v *= 1.25)
    ms.push_back(static_cast<std::size_t>(v));
  ms.push_back(max_m);
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

  double worst = -1e300;
  double prev = 0.0;
  for (std::size_t m : ms) {
    const double b = expected_gaussian_norm(m);
    const double b_sq = b * b;
    const double md = static_cast<double>(m);
    worst = std::max(worst, b_sq - md);             // b_m^2 <= m
    worst = std::max(worst, (md - 0.5) - b_sq);     // b_m^2 >= m - 1/2
    worst = std::max(worst, prev - b);              // monotone increasing
    prev = b;
  }

  LemmaReport rep;
  rep.lemma_id = "bm_bracket";
  rep.trials = ms.size();
  rep.worst_violation = worst;
  rep.threshold = 1e-9;
  rep.passed = rep.worst_violation <= rep.threshold;
  rep.notes = "bracket m-1/2 <= b_m^2 <= m and monotonicity, m up to " + std::to_string(max_m);
  return rep;
}

LemmaReport check_projection_contraction(std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, "check_projection_contraction: need at least 1 trial");
  Rng rng(seed);
  const double slack = 1e-9;
  double worst = -1e300;

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng.below(16);
    const std::size_t which = t % 4;
    ConstraintSet set;
    set.n = n;
    Vec u(n, 0.0);
    double factor = 1.0;
    switch (which) {
      case 0: {  // l1 ball, convex
        set.kind = SetKind::l1_ball;
        set.radius = 0.1 + 3.0 * rng.uniform01();
        u = project(set, rng.normal_vector(n));
        break;
      }
      case 1: {  // nonneg orthant, convex
        set.kind = SetKind::nonneg;
        for (std::size_t i = 0; i < n; ++i) u[i] = std::abs(rng.normal());
        break;
      }
      case 2: {  // top-k, nonconvex
        set.kind = SetKind::top_k;
        set.k = 1 + rng.below(n);
        for (std::size_t i = 0; i < set.k; ++i) u[rng.below(n)] = rng.normal();
        factor = 2.0;
        break;
      }
      default: {  // discrete, nonconvex
        set.kind = SetKind::discrete;
        set.alphabet = {-1.0, 0.0, 0.5, 2.0};
        for (std::size_t i = 0; i < n; ++i) u[i] = set.alphabet[rng.below(4)];
        factor = 2.0;
        break;
      }
    }
    const Vec v = rng.normal_vector(n);
    const Vec pv = project(set, v);
    worst = std::max(worst, norm2(sub(pv, u)) - factor * norm2(sub(v, u)) - slack);
  }

  LemmaReport rep;
  rep.lemma_id = "contraction";
  rep.trials = trials;
  rep.worst_violation = worst;
  rep.threshold = 0.0;
  rep.passed = rep.worst_violation <= rep.threshold;
  rep.notes = "factor 1 for l1 ball and orthant, factor 2 for top-k and discrete, slack 1e-9";
  return rep;
}

LemmaReport check_gaussian_fourth_moment(std::size_t m, double delta, std::size_t trials,
                                         std::uint64_t seed) {
  require(m >= 1 && trials >= 1, "check_gaussian_fourth_moment: empty plan");
  Vec dev(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double g = rng.normal();
      const double q = g * g;
      s += q * q;
    }
    dev[t] = std::abs(s / static_cast<double>(m) - 3.0);
  });

  double worst = 0.0;
  for (double d : dev) worst = std::max(worst, d - delta / 4.0);

  LemmaReport rep;
  rep.lemma_id = "fourth_moment";
  rep.trials = trials;
  rep.worst_violation = worst;
  rep.threshold = 0.0;
  rep.passed = rep.worst_violation <= rep.threshold;
  std::ostringstream notes;
  notes << "E g^4 = 3 within delta/4 = " << fmt(delta / 4.0) << " on each of " << trials
        << " trials of m=" << m << " (proof threshold m>=" << fmt(1536.0 / (delta * delta))
        << ")";
  rep.notes = notes.str();
  return rep;
}

}  // namespace pwf
