#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "pwf/constraints.hpp"
#include "pwf/experiment.hpp"

namespace pwf {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad integer for '" + key + "': " + v);
  }
}

double parse_f64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad number for '" + key + "': " + v);
  }
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(v))
    out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  if (out.empty()) throw config_error("config: empty list for '" + key + "'");
  return out;
}

std::vector<double> parse_f64_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split_list(v)) out.push_back(parse_f64(key, item));
  if (out.empty()) throw config_error("config: empty list for '" + key + "'");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_mode = false;

  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "mode") {
      saw_mode = true;
      if (val == "run")
        cfg.mode = RunMode::run;
      else if (val == "grid")
        cfg.mode = RunMode::grid;
      else if (val == "width")
        cfg.mode = RunMode::width;
      else if (val == "verify")
        cfg.mode = RunMode::verify;
      else
        throw config_error("config: unknown mode '" + val + "'");
    } else if (key == "seed") {
      cfg.base_seed = parse_u64(key, val);
    } else if (key == "out_dir") {
      cfg.out_dir = val;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_u64(key, val));
    } else if (key == "n") {
      cfg.n = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "structure") {
      if (val == "sparse")
        cfg.structure = StructureKind::sparse;
      else if (val == "discrete")
        cfg.structure = StructureKind::discrete;
      else if (val == "piecewise")
        cfg.structure = StructureKind::piecewise_constant;
      else if (val == "dense")
        cfg.structure = StructureKind::dense;
      else
        throw config_error("config: unknown structure '" + val + "'");
    } else if (key == "s") {
      cfg.s = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "alphabet") {
      cfg.alphabet = parse_f64_list(key, val);
      std::sort(cfg.alphabet.begin(), cfg.alphabet.end());
    } else if (key == "segments") {
      cfg.segments = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "m") {
      cfg.m = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "variant") {
      if (val == "intensity")
        cfg.variant = LossVariant::intensity;
      else if (val == "amplitude")
        cfg.variant = LossVariant::amplitude;
      else
        throw config_error("config: unknown variant '" + val + "'");
    } else if (key == "constraint") {
      if (val == "none")
        cfg.constraint = ConstraintChoice::none;
      else if (val == "l1")
        cfg.constraint = ConstraintChoice::l1;
      else if (val == "l0")
        cfg.constraint = ConstraintChoice::l0;
      else if (val == "discrete")
        cfg.constraint = ConstraintChoice::discrete;
      else if (val == "nonneg")
        cfg.constraint = ConstraintChoice::nonneg;
      else if (val == "tv_iso")
        cfg.constraint = ConstraintChoice::tv_iso;
      else if (val == "tv_aniso")
        cfg.constraint = ConstraintChoice::tv_aniso;
      else
        throw config_error("config: unknown constraint '" + val + "'");
    } else if (key == "init") {
      if (val == "oracle")
        cfg.init = InitChoice::oracle;
      else if (val == "spectral")
        cfg.init = InitChoice::spectral;
      else
        throw config_error("config: unknown init '" + val + "'");
    } else if (key == "rho") {
      cfg.rho = parse_f64(key, val);
    } else if (key == "mu") {
      cfg.mu = parse_f64(key, val);
    } else if (key == "step_scaling") {
      if (val == "norm_sq")
        cfg.scaling = StepScaling::inverse_norm_sq;
      else if (val == "norm")
        cfg.scaling = StepScaling::inverse_norm;
      else
        throw config_error("config: unknown step_scaling '" + val + "'");
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "tol_rel") {
      cfg.tol_rel = parse_f64(key, val);
    } else if (key == "record_every") {
      cfg.record_every = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "s_list") {
      cfg.s_list = parse_size_list(key, val);
    } else if (key == "m_list") {
      cfg.m_list = parse_size_list(key, val);
    } else if (key == "m_factor") {
      cfg.m_factor = parse_f64(key, val);
    } else if (key == "trials") {
      cfg.trials = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "cone") {
      if (val == "subspace")
        cfg.cone = ConeKind::subspace;
      else if (val == "orthant")
        cfg.cone = ConeKind::nonneg_orthant;
      else if (val == "l1_descent")
        cfg.cone = ConeKind::l1_descent;
      else if (val == "tv" || val == "discrete")
        throw unsupported_projection("no tractable polar for '" + val + "' descent cones");
      else
        throw config_error("config: unknown cone '" + val + "'");
    } else if (key == "dim") {
      cfg.dim = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "lemmas") {
      for (const std::string& id : split_list(val)) cfg.lemmas.push_back(id);
    } else {
      throw config_error("config: unknown key '" + key + "'");
    }
  }

  if (!saw_mode) throw config_error("config: missing 'mode'");

  switch (cfg.mode) {
    case RunMode::run:
      if (cfg.n == 0) throw config_error("config: run needs n >= 1");
      if (cfg.m == 0) throw config_error("config: run needs m >= 1");
      if (cfg.max_iters == 0) throw config_error("config: max_iters must be >= 1");
      if (cfg.record_every == 0) throw config_error("config: record_every must be >= 1");
      break;
    case RunMode::grid:
      if (cfg.n == 0) throw config_error("config: grid needs n >= 1");
      if (cfg.s_list.empty()) throw config_error("config: grid needs s_list");
      if (cfg.m_list.empty() && cfg.m_factor <= 0.0)
        throw config_error("config: grid needs m_list or m_factor");
      for (std::size_t m : cfg.m_list)
        if (m == 0) throw config_error("config: m_list entries must be >= 1");
      if (cfg.trials == 0) throw config_error("config: trials must be >= 1");
      break;
    case RunMode::width:
      if (cfg.n == 0) throw config_error("config: width needs n >= 1");
      if (cfg.trials < 2) throw config_error("config: width needs trials >= 2");
      if (cfg.cone == ConeKind::subspace && (cfg.dim == 0 || cfg.dim > cfg.n))
        throw config_error("config: subspace needs 1 <= dim <= n");
      if (cfg.cone == ConeKind::l1_descent && (cfg.s == 0 || cfg.s > cfg.n))
        throw config_error("config: l1_descent needs 1 <= s <= n");
      break;
    case RunMode::verify:
      break;
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace pwf
