#include "pwf/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pwf {

namespace {

double tv_eval(const Regularizer& reg, const Vec& z, std::size_t rows, std::size_t cols) {
  require(reg.p > 0.0, "evaluate: TV exponent must be positive");
  require(rows * cols == z.size(), "evaluate: shape does not match data length");
  const bool iso = reg.kind == RegKind::tv_iso;
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double zij = z[i * cols + j];
      const double dv = (i + 1 < rows) ? z[(i + 1) * cols + j] - zij : 0.0;
      const double dh = (j + 1 < cols) ? z[i * cols + j + 1] - zij : 0.0;
      if (iso) {
        total += std::pow(std::sqrt(dv * dv + dh * dh), reg.p);
      } else {
        total += std::pow(std::abs(dv), reg.p) + std::pow(std::abs(dh), reg.p);
      }
    }
  }
  return total;
}

bool in_alphabet(double v, const std::vector<double>& alphabet) {
  return std::binary_search(alphabet.begin(), alphabet.end(), v);
}

}  // namespace

double evaluate(const Regularizer& reg, const Vec& z) {
  switch (reg.kind) {
    case RegKind::l1:
      return norm1(z);
    case RegKind::l0:
      return static_cast<double>(count_nonzero(z));
    case RegKind::discrete_indicator: {
      require(!reg.alphabet.empty(), "evaluate: empty alphabet");
      for (double v : z)
        if (!in_alphabet(v, reg.alphabet)) return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    case RegKind::none:
      return 0.0;
    case RegKind::tv_iso:
    case RegKind::tv_aniso:
      throw std::invalid_argument("evaluate: TV regularizer needs a 2-D shape");
  }
  throw std::invalid_argument("evaluate: unknown regularizer");
}

double evaluate(const Regularizer& reg, const Vec& z, std::size_t rows, std::size_t cols) {
  if (reg.kind == RegKind::tv_iso || reg.kind == RegKind::tv_aniso)
    return tv_eval(reg, z, rows, cols);
  require(rows * cols == z.size(), "evaluate: shape does not match data length");
  return evaluate(reg, z);
}

ConstraintSet sublevel_from_signal(const Regularizer& reg, const Vec& x) {
  ConstraintSet set;
  set.n = x.size();
  switch (reg.kind) {
    case RegKind::l1:
      set.kind = SetKind::l1_ball;
      set.radius = norm1(x);
      return set;
    case RegKind::l0:
      set.kind = SetKind::top_k;
      set.k = count_nonzero(x);
      return set;
    case RegKind::discrete_indicator:
      require(!reg.alphabet.empty(), "sublevel_from_signal: empty alphabet");
      set.kind = SetKind::discrete;
      set.alphabet = reg.alphabet;
      return set;
    case RegKind::none:
      set.kind = SetKind::unconstrained;
      return set;
    case RegKind::tv_iso:
    case RegKind::tv_aniso:
      throw unsupported_projection("TV sublevel sets have no closed-form projection");
  }
  throw std::invalid_argument("sublevel_from_signal: unknown regularizer");
}

ConstraintSet nonneg_set(std::size_t n) {
  ConstraintSet set;
  set.kind = SetKind::nonneg;
  set.n = n;
  return set;
}

namespace {

Vec project_l1_ball(const Vec& v, double radius) {
  if (norm1(v) <= radius) return v;
  if (radius <= 0.0) return Vec(v.size(), 0.0);
  // Duchi et al. sort-and-threshold: theta solves sum (|v_i| - theta)_+ = radius.
  Vec mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    cum += mag[j];
    const double t = (cum - radius) / static_cast<double>(j + 1);
    if (mag[j] - t > 0.0)
      theta = t;
    else
      break;
  }
  Vec out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double shrunk = std::abs(v[i]) - theta;
    if (shrunk > 0.0) out[i] = (v[i] < 0.0 ? -shrunk : shrunk);
  }
  return out;
}

Vec project_top_k(const Vec& v, std::size_t k) {
  if (k >= v.size()) return v;
  Vec out(v.size(), 0.0);
  if (k == 0) return out;
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Ties in magnitude keep the lower index.
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(v[a]), mb = std::abs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  for (std::size_t j = 0; j < k; ++j) out[idx[j]] = v[idx[j]];
  return out;
}

double round_to_alphabet(double v, const std::vector<double>& alphabet) {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), v);
  if (it == alphabet.begin()) return *it;
  if (it == alphabet.end()) return alphabet.back();
  const double hi = *it, lo = *(it - 1);
  // Midpoints round to the smaller value.
  return (v - lo <= hi - v) ? lo : hi;
}

}  // namespace

Vec project(const ConstraintSet& set, const Vec& v) {
  require(v.size() == set.n, "project: dimension mismatch");
  switch (set.kind) {
    case SetKind::unconstrained:
      return v;
    case SetKind::l1_ball:
      return project_l1_ball(v, set.radius);
    case SetKind::top_k:
      return project_top_k(v, set.k);
    case SetKind::discrete: {
      require(!set.alphabet.empty(), "project: empty alphabet");
      Vec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = round_to_alphabet(v[i], set.alphabet);
      return out;
    }
    case SetKind::nonneg: {
      Vec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
      return out;
    }
  }
  throw std::invalid_argument("project: unknown set kind");
}

}  // namespace pwf
