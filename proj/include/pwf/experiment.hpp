#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwf/geometry.hpp"
#include "pwf/model.hpp"
#include "pwf/solver.hpp"

namespace pwf {

// ---------------------------------------------------------------------------
// Config-driven experiment harness behind the pwfkit CLI: single recoveries,
// phase-transition grids, width estimation and lemma verification, with
// CSV/JSON outputs that are byte-identical for identical (config, seed) and
// any worker count.
// ---------------------------------------------------------------------------

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { run, grid, width, verify };

enum class ConstraintChoice { none, l1, l0, discrete, nonneg, tv_iso, tv_aniso };

enum class InitChoice { oracle, spectral };

struct ExperimentConfig {
  RunMode mode = RunMode::run;
  std::uint64_t base_seed = 1;
  std::string out_dir = ".";
  int threads = 0;  // 0 keeps the ambient OpenMP setting

  // signal synthesis
  std::size_t n = 0;
  StructureKind structure = StructureKind::sparse;
  std::size_t s = 0;
  std::vector<double> alphabet;
  std::size_t segments = 1;

  // measurements and solver
  std::size_t m = 0;
  LossVariant variant = LossVariant::amplitude;
  ConstraintChoice constraint = ConstraintChoice::l0;
  InitChoice init = InitChoice::oracle;
  double rho = 1.0 / 15.0;
  std::optional<double> mu;
  StepScaling scaling = StepScaling::inverse_norm_sq;
  std::size_t max_iters = 200;
  double tol_rel = 1e-5;
  std::size_t record_every = 1;

  // grid
  std::vector<std::size_t> s_list;
  std::vector<std::size_t> m_list;
  double m_factor = 0.0;  // m = ceil(m_factor * m0(n, s)) when m_list is empty
  std::size_t trials = 25;

  // width
  ConeKind cone = ConeKind::l1_descent;
  std::size_t dim = 1;  // subspace dimension

  // verify
  std::vector<std::string> lemmas;  // empty selects the default suite
};

/// Parse the key = value config format (see README). Unknown keys, malformed
/// values and per-mode validation failures raise config_error.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Sub-stream tags for deriving signal / matrix / init seeds from a trial seed.
namespace seed_tag {
inline constexpr std::uint64_t signal = 0x5349474eULL;
inline constexpr std::uint64_t matrix = 0x4d415452ULL;
inline constexpr std::uint64_t init = 0x494e4954ULL;
}  // namespace seed_tag

/// One recovery with everything derived from trial_seed. Used by cmd_run
/// (trial 0) and by every grid cell trial.
struct TrialResult {
  Trace trace;
  double final_dist_rel = 0.0;
  bool success = false;
  bool diverged = false;
};

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t s, std::size_t m,
                      std::uint64_t trial_seed);

/// Commands return the process exit code: 0 ok, 1 verification failed,
/// 2 config error, 3 unsupported feature, 4 I/O error. Outputs land in
/// cfg.out_dir (trace.csv + summary.json, grid.csv, width.json, verify.json).
int cmd_run(const ExperimentConfig& cfg);
int cmd_grid(const ExperimentConfig& cfg);
int cmd_width(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);

/// Dispatch on cfg.mode, translating exceptions to exit codes.
int run_command(const ExperimentConfig& cfg);

/// 17 significant digits, enough to round-trip any double.
std::string fmt_double(double v);

}  // namespace pwf
