#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "semflow/basis.hpp"
#include "semflow/mesh.hpp"

namespace semflow {

/// Quadrature data on one tagged boundary facet.
struct FacetGeometry {
  std::int64_t element = 0;
  int face = 0;
  std::string tag;
  std::vector<std::int64_t> points;  ///< local point indices, (N+1)^2
  std::array<std::vector<double>, 3> normal;  ///< outward unit normal
  std::vector<double> area;  ///< surface Jacobian times 2D GLL weights
};

/// A GLL basis bound to a mesh: coordinates, Jacobians, the six geometric
/// factors of the weak Laplacian, mass weights and boundary-facet data at
/// every local GLL point.
///
/// Local layout: index = i + n (j + n (k + n e)) with n = N + 1, i along r.
class FunctionSpace {
 public:
  /// Throws GeometryError if det J <= 0 at any GLL point.
  FunctionSpace(std::shared_ptr<const Mesh> mesh, int order);

  const Basis1D& basis() const noexcept { return basis_; }
  const Mesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }

  int order() const noexcept { return basis_.order(); }
  int nx1() const noexcept { return basis_.num_points(); }
  std::size_t points_per_element() const noexcept { return ppe_; }
  std::size_t num_elements() const noexcept { return mesh_->num_elements(); }
  std::size_t num_local() const noexcept { return ppe_ * num_elements(); }

  std::size_t index(std::size_t e, int i, int j, int k) const noexcept {
    const auto n = static_cast<std::size_t>(nx1());
    return static_cast<std::size_t>(i) + n * (static_cast<std::size_t>(j) + n * (static_cast<std::size_t>(k) + n * e));
  }

  std::span<const double> coord(int l) const noexcept { return coords_[static_cast<std::size_t>(l)]; }
  std::span<const double> jac() const noexcept { return jac_; }
  std::span<const double> mass() const noexcept { return mass_; }

  /// Geometric factor component; 0..5 = G11, G12, G13, G22, G23, G33.
  std::span<const double> g(int comp) const noexcept { return g_[static_cast<std::size_t>(comp)]; }
  /// dr_s / dx_l.
  std::span<const double> drdx(int s, int l) const noexcept { return drdx_[static_cast<std::size_t>(3 * s + l)]; }
  /// dx_l / dr_s.
  std::span<const double> dxdr(int l, int s) const noexcept { return dxdr_[static_cast<std::size_t>(3 * l + s)]; }

  const std::vector<FacetGeometry>& facets() const noexcept { return facets_; }

  double element_diameter(std::size_t e) const;
  double min_element_diameter() const;
  double volume() const;

  /// Throws std::invalid_argument unless `n == num_local()`.
  void check_size(std::size_t n, const char* what) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Basis1D basis_;
  std::size_t ppe_;
  std::array<std::vector<double>, 3> coords_;
  std::vector<double> jac_;
  std::vector<double> mass_;
  std::array<std::vector<double>, 6> g_;
  std::array<std::vector<double>, 9> drdx_;
  std::array<std::vector<double>, 9> dxdr_;
  std::vector<FacetGeometry> facets_;
};

/// Local point indices of face f of element e, in in-face (a fast, b slow)
/// order.
std::vector<std::int64_t> face_points(const FunctionSpace& space, std::size_t e, int face);

/// Local (r, s, t) index triple of a point inside its element.
std::array<int, 3> local_ijk(const FunctionSpace& space, std::size_t local_index);

/// Applies a 1D matrix along each tensor direction of an element block:
/// out = (A_t x A_s x A_r) in, with A_d of shape (m_d x n_d).
void tensor_apply(const Matrix& ar, const Matrix& as, const Matrix& at, std::span<const double> in,
                  std::span<double> out, std::vector<double>& scratch);

}  // namespace semflow
