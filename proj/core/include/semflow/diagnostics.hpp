#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semflow/mesh.hpp"
#include "semflow/operators.hpp"
#include "semflow/space.hpp"

namespace semflow {

struct ForceOptions {
  /// Use tau = mu (grad u + grad u^T) instead of tau_ij = mu du_i/dx_j.
  bool symmetric_stress = false;
  /// Integrate with the normal pointing out of the body (into the fluid)
  /// rather than out of the domain.
  bool body_normal = false;
};

struct ForceRecord {
  double time = 0.0;
  Vec3 pressure{};  ///< integral of -p n
  Vec3 viscous{};   ///< integral of tau n
  double c_d = 0.0;
  double c_l = 0.0;

  Vec3 total() const { return {pressure[0] + viscous[0], pressure[1] + viscous[1], pressure[2] + viscous[2]}; }
};

/// Facet-quadrature integral of (-p n + tau n) over facets tagged `tag`,
/// with mu = nu (unit density). Throws ConfigError for an unknown tag.
ForceRecord surface_force(const FunctionSpace& space, const std::string& tag, std::span<const double> p,
                          const VecField& v, double nu, const ForceOptions& options = {});

/// 0.5 rho u_cl h D with rho = 1.
double force_normalization(double u_cl, double h, double diameter);

/// Fills c_d (x component) and c_l (z component) of `rec`.
void set_coefficients(ForceRecord& rec, double normalization);

/// sqrt(sum_points B (div v)^2).
double divergence_norm(const FunctionSpace& space, const VecField& v);
/// 0.5 sum_points B |v|^2.
double kinetic_energy(const FunctionSpace& space, const VecField& v);

/// RMS of div v in shells by distance from the boundary. Distance is the
/// minimum over boundary facets of the distance to the facet plane, which
/// is exact for convex domains with planar facets. Shell k covers
/// [edges[k], edges[k+1]).
std::vector<double> divergence_shells(const FunctionSpace& space, const VecField& v, std::span<const double> edges);

/// Streaming mean and sample variance (Welford).
class RunningStats {
 public:
  void push(double x);
  std::int64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Sample variance (n - 1 denominator); zero for fewer than two samples.
  double variance() const noexcept;
  double stddev() const noexcept;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace semflow
