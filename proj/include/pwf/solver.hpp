#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pwf/constraints.hpp"
#include "pwf/model.hpp"

namespace pwf {

// ---------------------------------------------------------------------------
// Projected Wirtinger Flow: z_{tau+1} = P_K(z_tau - mu_tau * grad L(z_tau)).
//
// mu_0 = 0 for both loss variants, so the first update is a pure projection.
// Amplitude runs use mu_tau = 1 afterwards. Intensity runs use
// mu_tau = mu / norm_est^2 by default (scale-invariant; the gradient scales
// cubically while distances scale linearly) with mu / norm_est also exposed,
// and mu defaulting to 0.1 / n. The norm estimate comes from the
// measurements once, before iterating, never from the ground truth.
// ---------------------------------------------------------------------------

enum class LossVariant { intensity, amplitude };

enum class StepScaling {
  inverse_norm_sq,  // mu_tau = mu / norm_est^2 (default, scale-invariant)
  inverse_norm,     // mu_tau = mu / norm_est (literal normalized form)
};

struct SolverConfig {
  LossVariant variant = LossVariant::amplitude;
  std::optional<double> mu;  // intensity only; unset means 0.1 / n
  StepScaling scaling = StepScaling::inverse_norm_sq;
  std::size_t max_iters = 200;
  double tol_rel = 1e-7;
  std::size_t record_every = 1;
};

struct IterRecord {
  std::size_t tau = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;                 // step used to produce this iterate
  std::optional<double> dist;        // sign-invariant, when ground truth known
};

struct Trace {
  std::vector<IterRecord> records;
  Vec final_z;
  bool converged = false;
  std::size_t iterations_used = 0;
};

/// Overflow or non-finite iterate; carries whatever was recorded so far.
struct diverged_error : std::runtime_error {
  explicit diverged_error(Trace t) : std::runtime_error("solver diverged"), partial(std::move(t)) {}
  Trace partial;
};

double default_intensity_mu(std::size_t n);

/// Step schedule. tau = 0 gives 0 for both variants; amplitude gives 1
/// afterwards; intensity requires a resolved config.mu and positive norm_est.
double step_size(const SolverConfig& config, std::size_t tau, double norm_est);

using IterObserver = std::function<void(std::size_t tau, const Vec& z)>;

/// Run PWF from z0. Records diagnostics every record_every iterations plus
/// the final one (and the initial point). Stops at max_iters, or when
/// dist/||x|| <= tol_rel if ground truth is supplied, or when
/// ||grad|| / (1 + ||z||) <= tol_rel otherwise. Aborts with diverged_error
/// when an iterate goes non-finite or ||z|| > 1e6 * norm_est.
/// The optional observer sees every iterate z_tau for tau >= 1.
Trace pwf_run(const MeasurementSet& meas, const ConstraintSet& set, const SolverConfig& config,
              const Vec& z0, const std::optional<Vec>& x_true = std::nullopt,
              const IterObserver& observer = nullptr);

/// z0 = x + rho * ||x|| * u with u uniform on the unit sphere, so
/// ||z0 - x|| = rho * ||x|| exactly. rho = 0 degenerates to x itself.
Vec init_oracle(const Vec& x, double rho, std::uint64_t seed);

/// Scaled leading eigenvector of (1/m) sum y_r a_r a_r^T by power iteration
/// (200 steps or relative eigen-residual <= 1e-8), projected onto the set.
/// The start vector is drawn from a substream of meas.seed.
Vec init_spectral(const MeasurementSet& meas, const ConstraintSet& set);

}  // namespace pwf
