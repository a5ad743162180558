#include "pwf/kernels.hpp"

#include <algorithm>

#include "pwf/parallel.hpp"

namespace pwf {
namespace kernels {

namespace {
// Fixed block count for row accumulation. A constant (not the thread count)
// keeps the reduction order, and therefore the rounding, machine-stable.
constexpr std::size_t kAccumBlocks = 64;
}  // namespace

void row_products(const Mat& A, const Vec& z, Vec& p) {
  p.resize(A.rows);
  parallel_for(A.rows, [&](std::size_t r) { p[r] = dot(A.row(r), z.data(), A.cols); });
}

void weighted_column_sums(const Mat& A, const Vec& w, Vec& out) {
  const std::size_t m = A.rows, n = A.cols;
  const std::size_t nblocks = std::max<std::size_t>(1, std::min(kAccumBlocks, m));
  std::vector<double> partials(nblocks * n, 0.0);
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t lo = b * m / nblocks;
    const std::size_t hi = (b + 1) * m / nblocks;
    double* part = partials.data() + b * n;
    for (std::size_t r = lo; r < hi; ++r) {
      const double wr = w[r];
      const double* row = A.row(r);
      for (std::size_t j = 0; j < n; ++j) part[j] += wr * row[j];
    }
  });
  out.assign(n, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const double* part = partials.data() + b * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += part[j];
  }
}

double sum(const Vec& terms) {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace kernels

namespace ref {

void row_products(const Mat& A, const Vec& z, Vec& p) {
  p.resize(A.rows);
  for (std::size_t r = 0; r < A.rows; ++r) p[r] = dot(A.row(r), z.data(), A.cols);
}

void weighted_column_sums(const Mat& A, const Vec& w, Vec& out) {
  out.assign(A.cols, 0.0);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double wr = w[r];
    const double* row = A.row(r);
    for (std::size_t j = 0; j < A.cols; ++j) out[j] += wr * row[j];
  }
}

double sum(const Vec& terms) {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace ref
}  // namespace pwf
