#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semflow/space.hpp"

namespace semflow {

/// Direct-stiffness summation QQ^T over coincident GLL points.
///
/// Global ids are assigned by coordinate matching within
/// `rel_tol * min element diameter` and numbered in lexicographic (x, y, z)
/// order of the points, so numbering is deterministic.
class GatherScatter {
 public:
  explicit GatherScatter(const FunctionSpace& space, double rel_tol = 1e-8);

  std::size_t num_local() const noexcept { return gid_.size(); }
  std::size_t num_global() const noexcept { return num_global_; }
  std::span<const std::int64_t> global_ids() const noexcept { return gid_; }
  std::span<const double> multiplicity() const noexcept { return mult_; }
  std::span<const double> inv_multiplicity() const noexcept { return inv_mult_; }

  /// u <- QQ^T u: coincident values summed in ascending local order and
  /// written back to every copy.
  void add(std::span<double> u) const;
  /// u <- (QQ^T u) / multiplicity.
  void avg(std::span<double> u) const;

  /// Global vector taking the first local copy of each id.
  std::vector<double> to_global(std::span<const double> u) const;
  /// Scatter a global vector to the local layout.
  void from_global(std::span<const double> g, std::span<double> u) const;
  /// Local index of the first copy of each global id.
  std::span<const std::int64_t> first_local() const noexcept { return first_; }

 private:
  std::size_t num_global_ = 0;
  std::vector<std::int64_t> gid_;
  std::vector<double> mult_;
  std::vector<double> inv_mult_;
  std::vector<std::int64_t> first_;
  // Shared ids only: CSR list of local copies, ascending.
  std::vector<std::int64_t> shared_offsets_;
  std::vector<std::int64_t> shared_locals_;
};

// Free-function spellings.
inline GatherScatter build_gather_scatter(const FunctionSpace& space, double rel_tol = 1e-8) {
  return GatherScatter(space, rel_tol);
}
inline void gs_add(const GatherScatter& gs, std::span<double> u) { gs.add(u); }
inline void gs_avg(const GatherScatter& gs, std::span<double> u) { gs.avg(u); }

}  // namespace semflow
