#include "pwf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pwf/constraints.hpp"
#include "pwf/lemma_lab.hpp"
#include "pwf/parallel.hpp"
#include "pwf/rng.hpp"

namespace pwf {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// Minimal JSON emitter with caller-controlled field order; numbers go out
// with 17 significant digits so files are byte-stable and round-trippable.
class JsonObject {
 public:
  JsonObject& field(const std::string& key, const std::string& raw_value) {
    if (!first_) os_ << ",";
    first_ = false;
    os_ << "\"" << key << "\":" << raw_value;
    return *this;
  }
  JsonObject& str(const std::string& key, const std::string& value) {
    return field(key, "\"" + value + "\"");
  }
  JsonObject& num(const std::string& key, double value) { return field(key, fmt_double(value)); }
  JsonObject& integer(const std::string& key, std::uint64_t value) {
    return field(key, std::to_string(value));
  }
  JsonObject& boolean(const std::string& key, bool value) {
    return field(key, value ? "true" : "false");
  }
  std::string done() const { return "{" + os_.str() + "}"; }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory '" + dir + "'");
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("failed writing '" + path + "'");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SignalSpec signal_spec_of(const ExperimentConfig& cfg, std::size_t s) {
  SignalSpec spec;
  spec.kind = cfg.structure;
  spec.n = cfg.n;
  spec.sparsity = s;
  spec.alphabet = cfg.alphabet;
  spec.segments = cfg.segments;
  return spec;
}

ConstraintSet constraint_of(const ExperimentConfig& cfg, const Vec& x) {
  Regularizer reg;
  switch (cfg.constraint) {
    case ConstraintChoice::none:
      reg.kind = RegKind::none;
      break;
    case ConstraintChoice::l1:
      reg.kind = RegKind::l1;
      break;
    case ConstraintChoice::l0:
      reg.kind = RegKind::l0;
      break;
    case ConstraintChoice::discrete:
      reg.kind = RegKind::discrete_indicator;
      reg.alphabet = cfg.alphabet;
      break;
    case ConstraintChoice::nonneg:
      return nonneg_set(x.size());
    case ConstraintChoice::tv_iso:
      reg.kind = RegKind::tv_iso;
      break;
    case ConstraintChoice::tv_aniso:
      reg.kind = RegKind::tv_aniso;
      break;
  }
  return sublevel_from_signal(reg, x);
}

SolverConfig solver_config_of(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.variant = cfg.variant;
  sc.mu = cfg.mu;
  sc.scaling = cfg.scaling;
  sc.max_iters = cfg.max_iters;
  sc.tol_rel = cfg.tol_rel;
  sc.record_every = cfg.record_every;
  return sc;
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  os << "# schema: pwfkit-trace/1\n";
  os << "tau,loss,grad_norm,step,dist\n";
  for (const IterRecord& r : trace.records) {
    os << r.tau << "," << fmt_double(r.loss) << "," << fmt_double(r.grad_norm) << ","
       << fmt_double(r.step) << "," << (r.dist ? fmt_double(*r.dist) : std::string()) << "\n";
  }
  return os.str();
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t s, std::size_t m,
                      std::uint64_t trial_seed) {
  const Signal x = gen_structured_signal(signal_spec_of(cfg, s),
                                         substream_seed(trial_seed, seed_tag::signal));
  const MeasurementSet meas =
      make_measurements(x.values, m, substream_seed(trial_seed, seed_tag::matrix));
  const ConstraintSet set = constraint_of(cfg, x.values);

  Vec z0;
  if (cfg.init == InitChoice::oracle)
    z0 = init_oracle(x.values, cfg.rho, substream_seed(trial_seed, seed_tag::init));
  else
    z0 = init_spectral(meas, set);

  TrialResult result;
  try {
    result.trace = pwf_run(meas, set, solver_config_of(cfg), z0, x.values);
  } catch (diverged_error& e) {
    result.trace = std::move(e.partial);
    result.diverged = true;
  }
  const double xn = norm2(x.values);
  result.final_dist_rel =
      xn > 0.0 ? sign_invariant_dist(result.trace.final_z, x.values) / xn : 0.0;
  result.success = !result.diverged && result.final_dist_rel <= cfg.tol_rel;
  return result;
}

int cmd_run(const ExperimentConfig& cfg) {
  set_threads(cfg.threads);
  const TrialResult result = run_trial(cfg, cfg.s, cfg.m, cfg.base_seed);

  JsonObject summary;
  summary.str("schema", "pwfkit-summary/1")
      .boolean("converged", result.trace.converged)
      .boolean("diverged", result.diverged)
      .integer("iterations_used", result.trace.iterations_used)
      .num("final_dist_rel", result.final_dist_rel)
      .integer("seed", cfg.base_seed);

  write_file(cfg.out_dir, "trace.csv", trace_csv(result.trace));
  write_file(cfg.out_dir, "summary.json", summary.done() + "\n");
  return 0;
}

int cmd_grid(const ExperimentConfig& cfg) {
  set_threads(cfg.threads);

  struct Cell {
    std::size_t s, m;
  };
  std::vector<Cell> cells;
  for (std::size_t s : cfg.s_list) {
    if (!cfg.m_list.empty()) {
      for (std::size_t m : cfg.m_list) cells.push_back({s, m});
    } else {
      const std::size_t m =
          static_cast<std::size_t>(std::ceil(cfg.m_factor * m0_l1_sparse(cfg.n, s)));
      cells.push_back({s, std::max<std::size_t>(m, 1)});
    }
  }

  const std::size_t total = cells.size() * cfg.trials;
  std::vector<int> success(total, 0);
  std::vector<double> iters(total, 0.0), dist(total, 0.0);

  // One flat worker pool over (cell, trial) pairs; k indexes document order.
  parallel_for(total, [&](std::size_t k) {
    const Cell& cell = cells[k / cfg.trials];
    const TrialResult r = run_trial(cfg, cell.s, cell.m, derive_seed(cfg.base_seed, k));
    success[k] = r.success ? 1 : 0;
    iters[k] = static_cast<double>(r.trace.iterations_used);
    dist[k] = r.final_dist_rel;
  });

  std::ostringstream os;
  os << "# schema: pwfkit-grid/1\n";
  os << "s,m,trials,successes,median_iters,median_final_dist\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t ok = 0;
    std::vector<double> cell_iters, cell_dist;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const std::size_t k = c * cfg.trials + t;
      ok += success[k];
      cell_iters.push_back(iters[k]);
      cell_dist.push_back(dist[k]);
    }
    os << cells[c].s << "," << cells[c].m << "," << cfg.trials << "," << ok << ","
       << fmt_double(median(cell_iters)) << "," << fmt_double(median(cell_dist)) << "\n";
  }
  write_file(cfg.out_dir, "grid.csv", os.str());
  return 0;
}

namespace {

ConeModel cone_of(const ExperimentConfig& cfg) {
  switch (cfg.cone) {
    case ConeKind::subspace: {
      Mat basis(cfg.n, cfg.dim);
      for (std::size_t j = 0; j < cfg.dim; ++j) basis(j, j) = 1.0;
      return make_subspace_cone(basis);
    }
    case ConeKind::nonneg_orthant:
      return make_orthant_cone(cfg.n);
    case ConeKind::l1_descent: {
      SignalSpec spec;
      spec.kind = StructureKind::sparse;
      spec.n = cfg.n;
      spec.sparsity = cfg.s;
      const Signal x =
          gen_structured_signal(spec, substream_seed(cfg.base_seed, seed_tag::signal));
      return l1_descent_cone_of(x.values);
    }
  }
  throw config_error("width: unknown cone");
}

std::string cone_name(ConeKind kind) {
  switch (kind) {
    case ConeKind::subspace:
      return "subspace";
    case ConeKind::nonneg_orthant:
      return "orthant";
    case ConeKind::l1_descent:
      return "l1_descent";
  }
  return "?";
}

}  // namespace

int cmd_width(const ExperimentConfig& cfg) {
  set_threads(cfg.threads);
  const ConeModel cone = cone_of(cfg);
  const WidthEstimate est = statistical_dimension_mc(cone, cfg.trials, cfg.base_seed);

  double reference = 0.0;
  switch (cfg.cone) {
    case ConeKind::subspace:
      reference = static_cast<double>(cfg.dim);
      break;
    case ConeKind::nonneg_orthant:
      reference = static_cast<double>(cfg.n) / 2.0;
      break;
    case ConeKind::l1_descent:
      reference = m0_l1_sparse(cfg.n, cfg.s);
      break;
  }

  JsonObject out;
  out.str("schema", "pwfkit-width/1")
      .str("cone", cone_name(cfg.cone))
      .integer("n", cfg.n)
      .integer("trials", est.trials)
      .num("mean_sq", est.mean_sq)
      .num("mean", est.mean)
      .num("stderr", est.stderr_)
      .num("reference", reference);
  write_file(cfg.out_dir, "width.json", out.done() + "\n");
  return 0;
}

namespace {

const std::vector<std::string>& default_lemma_suite() {
  static const std::vector<std::string> ids = {
      "abs_moment",   "truncation",     "cone_isometry", "mixed_fourth_moment",
      "abs_product",  "fourth_moment",  "bm_bracket",    "contraction",
      "regularity"};
  return ids;
}

/// Agreement of the Monte Carlo moment with its closed form: a pair fails
/// when |mc - closed| > 4 stderr; the gate allows a 5% failing fraction.
LemmaReport check_abs_moment_agreement(std::size_t pairs, std::size_t trials,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::size_t fails = 0;
  double worst_sigma = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t n = 2 + rng.below(8);
    const Vec u = rng.normal_vector(n);
    const Vec v = rng.normal_vector(n);
    const double closed = abs_moment_closed_form(u, v);
    const MomentEstimate mc = abs_moment_mc(u, v, trials, rng.next_u64());
    const double sigmas = std::abs(mc.estimate - closed) / mc.stderr_;
    worst_sigma = std::max(worst_sigma, sigmas);
    if (sigmas > 4.0) ++fails;
  }
  LemmaReport rep;
  rep.lemma_id = "abs_moment";
  rep.trials = pairs;
  rep.worst_violation = static_cast<double>(fails) / static_cast<double>(pairs);
  rep.threshold = 0.05;
  rep.passed = rep.worst_violation <= rep.threshold;
  rep.notes = "worst |mc-closed| = " + fmt_double(worst_sigma) + " stderr at " +
              std::to_string(trials) + " draws/pair";
  return rep;
}

LemmaReport run_lemma(const std::string& id, std::uint64_t seed) {
  if (id == "abs_moment") return check_abs_moment_agreement(20, 100000, seed);
  if (id == "truncation") return check_truncation_properties(8, 100000, seed);
  if (id == "cone_isometry") {
    Mat basis(32, 2);
    basis(0, 0) = 1.0;
    basis(1, 1) = 1.0;
    const ConeModel cone = make_subspace_cone(basis);
    const double delta = 0.25;
    const WidthEstimate w = statistical_dimension_mc(cone, 2000, substream_seed(seed, 1));
    // 15% headroom over the stated bound so the check's own width estimate
    // cannot land above the sized m.
    const std::size_t m = static_cast<std::size_t>(std::ceil(
        1.15 * std::max(80.0 * w.mean * w.mean / (delta * delta), 2.0 / delta - 1.0)));
    return check_cone_isometry(cone, m, delta, 200, 50, seed);
  }
  if (id == "mixed_fourth_moment") {
    Mat basis(32, 2);
    basis(0, 0) = 1.0;
    basis(1, 1) = 1.0;
    const ConeModel cone = make_subspace_cone(basis);
    Vec x(32, 0.0);
    x[0] = 1.0;
    const double delta = 0.5;
    const WidthEstimate w = statistical_dimension_mc(cone, 2000, substream_seed(seed, 1));
    const double omega_sq = w.mean * w.mean;
    const std::size_t m = static_cast<std::size_t>(std::ceil(
        1.15 * 1600.0 *
        std::max(omega_sq * std::log(32.0) / (delta * delta), 1.0 / (delta * delta))));
    return check_mixed_fourth_moment(cone, x, m, delta, 50, seed);
  }
  if (id == "abs_product") {
    Mat basis(32, 2);
    basis(0, 0) = 1.0;
    basis(1, 1) = 1.0;
    const ConeModel cone_u = make_subspace_cone(basis);
    const ConeModel cone_v = make_orthant_cone(32);
    return check_abs_product_concentration(cone_u, cone_v, 6400, 0.1, 60, seed, 400.0);
  }
  if (id == "fourth_moment") return check_gaussian_fourth_moment(160000, 0.5, 20, seed);
  if (id == "bm_bracket") return check_bm_bracket(1000000);
  if (id == "contraction") return check_projection_contraction(100000, seed);
  if (id == "regularity") {
    // Points along a seeded intensity recovery: n=64, s=4, m = ceil(8 m0 ln n).
    const std::size_t n = 64, s = 4;
    const std::size_t m = static_cast<std::size_t>(
        std::ceil(8.0 * m0_l1_sparse(n, s) * std::log(static_cast<double>(n))));
    SignalSpec spec;
    spec.kind = StructureKind::sparse;
    spec.n = n;
    spec.sparsity = s;
    const Signal x = gen_structured_signal(spec, substream_seed(seed, seed_tag::signal));
    const MeasurementSet meas =
        make_measurements(x.values, m, substream_seed(seed, seed_tag::matrix));
    Regularizer reg;
    reg.kind = RegKind::l1;
    const ConstraintSet set = sublevel_from_signal(reg, x.values);
    const Vec z0 = init_oracle(x.values, 1.0 / 8.0, substream_seed(seed, seed_tag::init));

    std::vector<Vec> points;
    SolverConfig sc;
    sc.variant = LossVariant::intensity;
    sc.max_iters = 2000;
    sc.tol_rel = 1e-6;
    sc.record_every = 100;
    pwf_run(meas, set, sc, z0, x.values, [&](std::size_t tau, const Vec& z) {
      if (tau % 25 == 1) points.push_back(z);
    });
    return check_regularity_condition(meas, set, x.values, points);
  }
  throw config_error("verify: unknown lemma id '" + id + "'");
}

}  // namespace

int cmd_verify(const ExperimentConfig& cfg) {
  set_threads(cfg.threads);
  const std::vector<std::string>& ids = cfg.lemmas.empty() ? default_lemma_suite() : cfg.lemmas;

  std::vector<LemmaReport> reports;
  for (std::size_t i = 0; i < ids.size(); ++i)
    reports.push_back(run_lemma(ids[i], derive_seed(cfg.base_seed, 1000 + i)));

  bool all_passed = true;
  std::ostringstream arr;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const LemmaReport& r = reports[i];
    all_passed = all_passed && r.passed;
    JsonObject obj;
    obj.str("lemma_id", r.lemma_id)
        .integer("trials", r.trials)
        .num("worst_violation", r.worst_violation)
        .num("threshold", r.threshold)
        .boolean("passed", r.passed)
        .str("notes", r.notes);
    if (i) arr << ",";
    arr << obj.done();
  }

  JsonObject out;
  out.str("schema", "pwfkit-verify/1")
      .boolean("all_passed", all_passed)
      .field("reports", "[" + arr.str() + "]");
  write_file(cfg.out_dir, "verify.json", out.done() + "\n");
  return all_passed ? 0 : 1;
}

int run_command(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case RunMode::run:
      return cmd_run(cfg);
    case RunMode::grid:
      return cmd_grid(cfg);
    case RunMode::width:
      return cmd_width(cfg);
    case RunMode::verify:
      return cmd_verify(cfg);
  }
  return 2;
}

}  // namespace pwf
