#include "semflow/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace semflow {

int num_threads() { return omp_get_max_threads(); }

void set_num_threads(int n) { omp_set_num_threads(std::max(1, n)); }

double deterministic_dot(std::span<const double> a, std::span<const double> b,
                         std::span<const double> w, std::size_t block) {
  const std::size_t n = a.size();
  if (block == 0) block = n == 0 ? 1 : n;
  const long nblocks = static_cast<long>((n + block - 1) / block);
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
  const bool weighted = !w.empty();
#pragma omp parallel for schedule(static)
  for (long blk = 0; blk < nblocks; ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * block;
    const std::size_t hi = std::min(n, lo + block);
    double s = 0.0;
    if (weighted) {
      for (std::size_t i = lo; i < hi; ++i) s += w[i] * a[i] * b[i];
    } else {
      for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    }
    partial[static_cast<std::size_t>(blk)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace semflow
