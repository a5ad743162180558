#include "pwf/solver.hpp"

#include <cmath>

#include "pwf/kernels.hpp"
#include "pwf/rng.hpp"

namespace pwf {

double default_intensity_mu(std::size_t n) { return 0.1 / static_cast<double>(n); }

double step_size(const SolverConfig& config, std::size_t tau, double norm_est) {
  if (tau == 0) return 0.0;
  if (config.variant == LossVariant::amplitude) return 1.0;
  require(norm_est > 0.0, "step_size: intensity schedule needs a positive norm estimate");
  require(config.mu.has_value(), "step_size: intensity mu not resolved");
  const double mu = *config.mu;
  require(mu > 0.0, "step_size: mu must be positive");
  return config.scaling == StepScaling::inverse_norm_sq ? mu / (norm_est * norm_est)
                                                        : mu / norm_est;
}

namespace {

struct Diagnostics {
  double loss;
  Vec grad;
  double grad_norm;
};

Diagnostics evaluate_point(const MeasurementSet& meas, const SolverConfig& config, const Vec& z) {
  Diagnostics d;
  if (config.variant == LossVariant::intensity) {
    d.loss = loss_intensity(meas.A, meas.y, z);
    d.grad = grad_intensity(meas.A, meas.y, z);
  } else {
    d.loss = loss_amplitude(meas.A, meas.y, z);
    d.grad = grad_amplitude(meas.A, meas.y, z);
  }
  d.grad_norm = norm2(d.grad);
  return d;
}

}  // namespace

Trace pwf_run(const MeasurementSet& meas, const ConstraintSet& set, const SolverConfig& config,
              const Vec& z0, const std::optional<Vec>& x_true, const IterObserver& observer) {
  require(z0.size() == meas.n(), "pwf_run: z0 length mismatch");
  require(set.n == meas.n(), "pwf_run: constraint dimension mismatch");
  require(config.max_iters >= 1, "pwf_run: max_iters must be at least 1");
  require(config.record_every >= 1, "pwf_run: record_every must be at least 1");
  if (x_true) require(x_true->size() == meas.n(), "pwf_run: ground truth length mismatch");

  SolverConfig cfg = config;
  if (cfg.variant == LossVariant::intensity && !cfg.mu)
    cfg.mu = default_intensity_mu(meas.n());

  const double norm_est = estimate_signal_norm(meas.y);
  if (cfg.variant == LossVariant::intensity)
    require(norm_est > 0.0, "pwf_run: intensity variant needs nonzero measurements");
  const double x_norm = x_true ? norm2(*x_true) : 0.0;
  const double diverge_bound = 1e6 * norm_est;

  Trace trace;
  auto record = [&](std::size_t tau, const Diagnostics& d, double step, const Vec& z) {
    IterRecord rec;
    rec.tau = tau;
    rec.loss = d.loss;
    rec.grad_norm = d.grad_norm;
    rec.step = step;
    if (x_true) rec.dist = sign_invariant_dist(z, *x_true);
    trace.records.push_back(rec);
  };

  Vec z = z0;
  Diagnostics diag = evaluate_point(meas, cfg, z);
  record(0, diag, 0.0, z);

  for (std::size_t tau = 0; tau < cfg.max_iters; ++tau) {
    const double mu_tau = step_size(cfg, tau, norm_est);
    Vec step_point = z;
    if (mu_tau != 0.0) axpy(-mu_tau, diag.grad, step_point);
    z = project(set, step_point);
    const std::size_t iter = tau + 1;
    trace.iterations_used = iter;

    if (!all_finite(z) || norm2(z) > diverge_bound) {
      trace.final_z = z;
      trace.converged = false;
      throw diverged_error(std::move(trace));
    }
    if (observer) observer(iter, z);

    diag = evaluate_point(meas, cfg, z);
    const double crit = x_true ? sign_invariant_dist(z, *x_true) / (x_norm > 0.0 ? x_norm : 1.0)
                               : diag.grad_norm / (1.0 + norm2(z));
    trace.converged = crit <= cfg.tol_rel;

    const bool last = trace.converged || iter == cfg.max_iters;
    if (iter % cfg.record_every == 0 || last) record(iter, diag, mu_tau, z);
    if (trace.converged) break;
  }

  trace.final_z = std::move(z);
  return trace;
}

Vec init_oracle(const Vec& x, double rho, std::uint64_t seed) {
  require(!x.empty(), "init_oracle: empty signal");
  const double xn = norm2(x);
  require(xn > 0.0, "init_oracle: zero signal");
  require(rho >= 0.0, "init_oracle: rho must be nonnegative");
  if (rho == 0.0) return x;
  Rng rng(seed);
  Vec u = rng.normal_vector(x.size());
  double un = norm2(u);
  while (un == 0.0) {
    u = rng.normal_vector(x.size());
    un = norm2(u);
  }
  Vec z0 = x;
  axpy(rho * xn / un, u, z0);
  return z0;
}

Vec init_spectral(const MeasurementSet& meas, const ConstraintSet& set) {
  const std::size_t m = meas.m(), n = meas.n();
  require(m >= 1, "init_spectral: no measurements");
  bool any = false;
  for (double v : meas.y)
    if (v != 0.0) any = true;
  require(any, "init_spectral: all intensities are zero");

  // Power iteration on M = (1/m) A^T diag(y) A without forming M.
  Rng rng(substream_seed(meas.seed, 0x53504543u));  // spectral start substream
  Vec v = rng.normal_vector(n);
  scale(v, 1.0 / norm2(v));

  Vec p, w(m), mv;
  for (int it = 0; it < 200; ++it) {
    kernels::row_products(meas.A, v, p);
    for (std::size_t r = 0; r < m; ++r) w[r] = meas.y[r] * p[r];
    kernels::weighted_column_sums(meas.A, w, mv);
    scale(mv, 1.0 / static_cast<double>(m));

    const double lambda = dot(v, mv);
    Vec resid = mv;
    axpy(-lambda, v, resid);
    const double mv_norm = norm2(mv);
    if (mv_norm == 0.0) break;
    scale(mv, 1.0 / mv_norm);
    v = mv;
    if (lambda > 0.0 && norm2(resid) <= 1e-8 * lambda) break;
  }

  scale(v, estimate_signal_norm(meas.y));
  return project(set, v);
}

}  // namespace pwf
