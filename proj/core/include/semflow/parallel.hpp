#pragma once

#include <cstddef>
#include <span>

namespace semflow {

/// Number of worker threads used by element loops.
int num_threads();
void set_num_threads(int n);

/// Sum of per-element partial sums of w[i]*a[i]*b[i] (w may be empty).
///
/// Partial sums are formed per block of `block` entries and combined in
/// block order, so the result is independent of the thread count.
double deterministic_dot(std::span<const double> a, std::span<const double> b,
                         std::span<const double> w, std::size_t block);

}  // namespace semflow
