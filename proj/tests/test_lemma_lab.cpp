#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pwf/lemma_lab.hpp"
#include "pwf/rng.hpp"
#include "pwf/solver.hpp"

using namespace pwf;

TEST_CASE("closed-form absolute moment: anchors") {
  const Vec e1 = {1.0, 0.0};
  const Vec e2 = {0.0, 1.0};
  CHECK(abs_moment_closed_form(e1, e1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(abs_moment_closed_form(e1, e2) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(abs_moment_closed_form(e1, scaled(e1, -1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(abs_moment_closed_form({0.0, 0.0}, e1), std::invalid_argument);

  // Lower bound (2/pi) ||u|| ||v|| over random pairs; scaling linearity.
  Rng rng(81);
  for (int t = 0; t < 200; ++t) {
    const Vec u = rng.normal_vector(5), v = rng.normal_vector(5);
    const double val = abs_moment_closed_form(u, v);
    CHECK(val >= (2.0 / std::numbers::pi) * norm2(u) * norm2(v) - 1e-12);
    CHECK(abs_moment_closed_form(scaled(u, 2.0), v) == doctest::Approx(2.0 * val));
  }
}

TEST_CASE("Monte Carlo moment agrees with the closed form") {
  const Vec e1 = {1.0, 0.0, 0.0};
  const Vec e2 = {0.0, 1.0, 0.0};
  const MomentEstimate m1 = abs_moment_mc(e1, e1, 100000, 82);
  CHECK(std::abs(m1.estimate - 1.0) <= 4.0 * m1.stderr_);
  const MomentEstimate m2 = abs_moment_mc(e1, e2, 100000, 83);
  CHECK(std::abs(m2.estimate - 2.0 / std::numbers::pi) <= 4.0 * m2.stderr_);

  Rng rng(84);
  std::size_t hits = 0;
  for (int pair = 0; pair < 20; ++pair) {
    const std::size_t n = 2 + rng.below(8);
    const Vec u = rng.normal_vector(n), v = rng.normal_vector(n);
    const MomentEstimate mc = abs_moment_mc(u, v, 100000, rng.next_u64());
    if (std::abs(mc.estimate - abs_moment_closed_form(u, v)) <= 4.0 * mc.stderr_) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("truncation map: branches, continuity, domination") {
  CHECK(truncation_map(0.5, 1.0, 0.1) == 0.0);
  CHECK(truncation_map(0.95, 1.0, 0.1) == doctest::Approx(0.5));
  CHECK(truncation_map(2.0, 1.0, 0.1) == 2.0);
  CHECK(truncation_map(-2.0, 1.0, 0.1) == 2.0);
  CHECK_THROWS_AS(truncation_map(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(truncation_map(1.0, 1.0, 1.0), std::invalid_argument);

  // Continuity at both breakpoints.
  for (double beta : {0.3, 1.0, 2.5}) {
    for (double delta : {0.1, 0.5}) {
      const double lo = beta * (1.0 - delta);
      CHECK(std::abs(truncation_map(lo + 1e-9, beta, delta) -
                     truncation_map(lo - 1e-9, beta, delta)) <= 1e-6);
      CHECK(std::abs(truncation_map(beta + 1e-9, beta, delta) -
                     truncation_map(beta - 1e-9, beta, delta)) <= 1e-6);
    }
  }

  // |h| 1{(1-eps) beta <= |h|} <= S(h; (1-eps) beta), eps = 2/15, Delta = 0.1.
  Rng rng(85);
  const double eps = 2.0 / 15.0;
  for (int t = 0; t < 10000; ++t) {
    const double h = 3.0 * rng.normal();
    const double beta = std::abs(rng.normal()) + 1e-6;
    const double thr = (1.0 - eps) * beta;
    const double indicator = std::abs(h) >= thr ? std::abs(h) : 0.0;
    CHECK(indicator <= truncation_map(h, thr, 0.1) + 1e-12);
  }
}

TEST_CASE("truncation function properties hold") {
  const LemmaReport rep = check_truncation_properties(8, 100000, 86);
  CHECK(rep.passed);
  CHECK(rep.worst_violation <= 0.0);
}

TEST_CASE("expected Gaussian norm: exact values and bracket") {
  CHECK(expected_gaussian_norm(1) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  CHECK(expected_gaussian_norm(2) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)));
  // Reference values from 40-digit Gamma evaluation.
  CHECK(expected_gaussian_norm(10) == doctest::Approx(3.0843277597998639).epsilon(1e-14));
  CHECK(expected_gaussian_norm(200) == doctest::Approx(14.124469071705357).epsilon(1e-12));
  CHECK(expected_gaussian_norm(1000000) == doctest::Approx(999.99975000003125).epsilon(1e-12));
  CHECK_THROWS_AS(expected_gaussian_norm(0), std::invalid_argument);

  const LemmaReport rep = check_bm_bracket(1000000);
  CHECK(rep.passed);

  // b_m / sqrt(m) -> 1
  CHECK(expected_gaussian_norm(1000000) / 1000.0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("projection contraction factors") {
  const LemmaReport rep = check_projection_contraction(100000, 87);
  CHECK(rep.passed);
}

TEST_CASE("Gaussian fourth moment") {
  const LemmaReport rep = check_gaussian_fourth_moment(160000, 0.5, 20, 88);
  CHECK(rep.passed);
  CHECK(rep.worst_violation <= 0.0);
}

TEST_CASE("unit weights reduce the weighted statistic to the plain one") {
  Rng rng(95);
  const Vec products = rng.normal_vector(500);
  const Vec ones(500, 1.0);
  const IsometryStats st = isometry_statistics(products, ones);
  CHECK(st.plain == st.weighted);

  // u = v reduces the absolute product to the squared-product statistic.
  double abs_prod = 0.0;
  for (double p : products) abs_prod += std::abs(p * p);
  abs_prod /= 500.0;
  CHECK(abs_prod == doctest::Approx(st.plain).epsilon(1e-15));
}

TEST_CASE("truncation norm edge cases: alpha = 1 and alpha = 0") {
  const double delta = 0.1;
  auto f = [&](const Vec& z, const Vec& beta) {
    double s = 0.0;
    for (std::size_t r = 0; r < z.size(); ++r) {
      const double t = truncation_map(z[r], beta[r], delta);
      s += t * t;
    }
    return std::sqrt(s);
  };
  Rng rng(96);
  const Vec z = rng.normal_vector(8);
  Vec beta(8);
  for (double& b : beta) b = std::abs(rng.normal());
  CHECK(f(z, beta) == f(z, beta));               // alpha = 1: equality
  CHECK(f(Vec(8, 0.0), beta) == 0.0);            // alpha = 0: f(0) = 0
}

TEST_CASE("regularity constants default to the stated values") {
  const RegularityConstants c;
  CHECK(c.alpha == 250.0);
  CHECK(c.lambda == 1.0 / 250.0);
  CHECK(c.gamma == 1.0 / 1000.0);
  CHECK(c.delta == 1.0 / 1000.0);
  CHECK(c.big_delta == 1.0 / 1000.0);
  CHECK(c.beta(64) == 13000.0 * 64.0);
  CHECK(c.ball_radius_frac == 1.0 / 8.0);
}

TEST_CASE("cone isometry at reduced desk size") {
  Mat basis(16, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = 1.0;
  const ConeModel cone = make_subspace_cone(basis);
  const LemmaReport rep = check_cone_isometry(cone, 800, 0.3, 100, 20, 89);
  CHECK(rep.passed);
}

TEST_CASE("mixed fourth moment population value") {
  Vec x(8, 0.0);
  x[0] = 1.0;
  CHECK(mixed_fourth_population(x, x) == doctest::Approx(3.0));  // h = x, unit norms
  Vec h(8, 0.0);
  h[1] = 1.0;
  CHECK(mixed_fourth_population(h, x) == doctest::Approx(1.0));  // orthogonal unit pair
}

TEST_CASE("mixed fourth moment desk check") {
  Mat basis(16, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = 1.0;
  const ConeModel cone = make_subspace_cone(basis);
  Vec x(16, 0.0);
  x[2] = 1.0;
  // m large enough that the delta/4 fourth-moment gate sits ~3 sigma out.
  const LemmaReport rep = check_mixed_fourth_moment(cone, x, 36000, 0.6, 20, 90);
  CHECK(rep.passed);
  Vec bad = x;
  bad[3] = 1.0;  // not unit norm
  CHECK_THROWS_AS(check_mixed_fourth_moment(cone, bad, 100, 0.5, 2, 1), std::invalid_argument);
}

TEST_CASE("abs product concentration desk check") {
  Mat basis(16, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = 1.0;
  const ConeModel cone_u = make_subspace_cone(basis);
  const ConeModel cone_v = make_orthant_cone(16);
  const LemmaReport rep = check_abs_product_concentration(cone_u, cone_v, 4000, 0.12, 30, 91, 400.0);
  CHECK(rep.passed);
}

TEST_CASE("regularity condition along an intensity trajectory") {
  SignalSpec spec;
  spec.kind = StructureKind::sparse;
  spec.n = 64;
  spec.sparsity = 4;
  const Signal x = gen_structured_signal(spec, 92);
  const std::size_t m = static_cast<std::size_t>(
      std::ceil(8.0 * m0_l1_sparse(64, 4) * std::log(64.0)));
  const MeasurementSet meas = make_measurements(x.values, m, 93);
  Regularizer l1{RegKind::l1, 1.0, {}};
  const ConstraintSet set = sublevel_from_signal(l1, x.values);

  // z = x alone: both sides vanish, margin 0.
  const LemmaReport at_x = check_regularity_condition(meas, set, x.values, {x.values});
  CHECK(at_x.passed);
  CHECK(std::abs(at_x.worst_violation) <= 1e-12);

  std::vector<Vec> points;
  SolverConfig cfg;
  cfg.variant = LossVariant::intensity;
  cfg.max_iters = 600;
  cfg.tol_rel = 1e-9;
  cfg.record_every = 50;
  const Vec z0 = init_oracle(x.values, 1.0 / 8.0, 94);
  pwf_run(meas, set, cfg, z0, x.values, [&](std::size_t tau, const Vec& z) {
    if (tau % 20 == 1) points.push_back(z);
  });
  REQUIRE(points.size() >= 10);
  const LemmaReport rep = check_regularity_condition(meas, set, x.values, points);
  CHECK(rep.passed);

  CHECK_THROWS_AS(check_regularity_condition(meas, set, x.values, {}), std::invalid_argument);
}

TEST_CASE("lemma reports are reproducible") {
  const LemmaReport a = check_truncation_properties(8, 5000, 99);
  const LemmaReport b = check_truncation_properties(8, 5000, 99);
  CHECK(a.worst_violation == b.worst_violation);

  Mat basis(16, 2);
  basis(0, 0) = 1.0;
  basis(1, 1) = 1.0;
  const ConeModel cone = make_subspace_cone(basis);
  const LemmaReport c = check_cone_isometry(cone, 400, 0.35, 50, 10, 100);
  const LemmaReport d = check_cone_isometry(cone, 400, 0.35, 50, 10, 100);
  CHECK(c.worst_violation == d.worst_violation);
  CHECK(c.notes == d.notes);
}
