// pwfbench: timings of the OpenMP kernels against the serial reference, plus
// the Monte Carlo width estimator at 1 vs all threads. Sanity-checks that the
// two implementations agree before timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "pwf/geometry.hpp"
#include "pwf/kernels.hpp"
#include "pwf/model.hpp"
#include "pwf/parallel.hpp"
#include "pwf/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double rel_diff(const pwf::Vec& a, const pwf::Vec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t m = 4096, n = 512, trials = 20000;
  int reps = 20;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const std::string val = argv[i + 1];
    if (key == "--m")
      m = std::stoul(val);
    else if (key == "--n")
      n = std::stoul(val);
    else if (key == "--trials")
      trials = std::stoul(val);
    else if (key == "--reps")
      reps = std::stoi(val);
  }

  std::printf("pwfbench: m=%zu n=%zu trials=%zu reps=%d threads=%d\n", m, n, trials, reps,
              pwf::max_threads());

  const pwf::Mat A = pwf::gen_gaussian_matrix(m, n, 42);
  pwf::Rng rng(43);
  const pwf::Vec z = rng.normal_vector(n);
  const pwf::Vec w = rng.normal_vector(m);

  pwf::Vec p_par, p_ref, g_par, g_ref;
  pwf::kernels::row_products(A, z, p_par);
  pwf::ref::row_products(A, z, p_ref);
  pwf::kernels::weighted_column_sums(A, w, g_par);
  pwf::ref::weighted_column_sums(A, w, g_ref);
  if (rel_diff(p_par, p_ref) > 1e-12 || rel_diff(g_par, g_ref) > 1e-12) {
    std::printf("FAIL: kernel and reference disagree\n");
    return 1;
  }

  const double t_rp_ref = time_best_of(reps, [&] { pwf::ref::row_products(A, z, p_ref); });
  const double t_rp_par = time_best_of(reps, [&] { pwf::kernels::row_products(A, z, p_par); });
  const double t_cs_ref =
      time_best_of(reps, [&] { pwf::ref::weighted_column_sums(A, w, g_ref); });
  const double t_cs_par =
      time_best_of(reps, [&] { pwf::kernels::weighted_column_sums(A, w, g_par); });

  const pwf::ConeModel orthant = pwf::make_orthant_cone(n);
  pwf::set_threads(1);
  const auto width_serial = pwf::statistical_dimension_mc(orthant, trials, 7);
  const double t_mc_1 = time_best_of(std::max(1, reps / 10), [&] {
    pwf::statistical_dimension_mc(orthant, trials, 7);
  });
  pwf::set_threads(pwf::max_threads());
  const auto width_parallel = pwf::statistical_dimension_mc(orthant, trials, 7);
  const double t_mc_all = time_best_of(std::max(1, reps / 10), [&] {
    pwf::statistical_dimension_mc(orthant, trials, 7);
  });
  if (width_serial.mean_sq != width_parallel.mean_sq) {
    std::printf("FAIL: width estimate depends on thread count\n");
    return 1;
  }

  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial (s)", "parallel (s)", "speedup");
  std::printf("%-28s %12.6f %12.6f %8.2f\n", "row_products", t_rp_ref, t_rp_par,
              t_rp_ref / t_rp_par);
  std::printf("%-28s %12.6f %12.6f %8.2f\n", "weighted_column_sums", t_cs_ref, t_cs_par,
              t_cs_ref / t_cs_par);
  std::printf("%-28s %12.6f %12.6f %8.2f\n", "statistical_dimension_mc", t_mc_1, t_mc_all,
              t_mc_1 / t_mc_all);
  std::printf("width(orthant %zu) mean_sq=%.6f (expect %.1f)\n", n, width_parallel.mean_sq,
              static_cast<double>(n) / 2.0);
  return 0;
}
