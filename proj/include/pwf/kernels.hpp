#pragma once

#include "pwf/linalg.hpp"

namespace pwf {

// OpenMP-parallel inner kernels. Every kernel is bitwise reproducible for any
// thread count: parallel regions only fill disjoint slots, and all floating
// point reductions run in a fixed order that does not depend on scheduling.
namespace kernels {

/// p[r] = <A.row(r), z>. Parallel over rows.
void row_products(const Mat& A, const Vec& z, Vec& p);

/// out[j] = sum_r w[r] * A(r, j).
/// Rows are split into a fixed number of blocks (independent of the thread
/// count); block partials are combined serially in block order.
void weighted_column_sums(const Mat& A, const Vec& w, Vec& out);

/// Fixed-order serial sum.
double sum(const Vec& terms);

}  // namespace kernels

// Serial reference implementations with the same contracts, kept for testing
// the parallel kernels and for the benchmark. Plain textbook loops; summation
// order may differ from the kernels by rounding.
namespace ref {

void row_products(const Mat& A, const Vec& z, Vec& p);
void weighted_column_sums(const Mat& A, const Vec& w, Vec& out);
double sum(const Vec& terms);

}  // namespace ref

}  // namespace pwf
