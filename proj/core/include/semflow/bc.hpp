#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "semflow/gather_scatter.hpp"
#include "semflow/mesh.hpp"
#include "semflow/operators.hpp"
#include "semflow/space.hpp"

namespace semflow {

enum class BcKind {
  NoSlip,     ///< v = 0
  Velocity,   ///< v = value(x, t)
  Inflow,     ///< power-law profile in x
  Rotor,      ///< spinning vertical cylinder wall
  Outflow,    ///< natural condition, p = 0
  Symmetry,   ///< v . n = 0 on an axis-aligned facet
};

BcKind parse_bc_kind(const std::string& name);
std::string to_string(BcKind kind);

struct InflowParams {
  double u_cl = 1.0;
  double h = 1.0;
};

/// Rotor wall: tangential speed s(y) in the direction y_hat x r_hat about
/// the vertical axis through (center_x, center_z). u_sp = alpha * u_cl.
struct RotorParams {
  double alpha = 3.0;
  double u_cl = 1.0;
  double delta = 0.02;
  double center_x = 0.0;
  double center_z = 0.0;
};

using VectorFunction = std::function<Vec3(const Vec3&, double)>;

struct BcSpec {
  BcKind kind = BcKind::NoSlip;
  InflowParams inflow;
  RotorParams rotor;
  VectorFunction value;  ///< used by BcKind::Velocity
};

/// u_x = u_cl (y/h)^(1/7). y outside [0, h] is clamped; `clamped` reports
/// excursions beyond 1e-10 h.
double inflow_profile(double y, double u_cl, double h, bool* clamped = nullptr);

/// Smoothed spin speed: 0 at y <= 0, u_sp / (1 + exp(1/(q-1) + 1/q)) with
/// q = y/delta inside, u_sp for y >= delta.
double rotor_speed(double y, double u_sp, double delta);

/// Rotor wall velocity at `x` (radial component zero).
Vec3 rotor_velocity(const Vec3& x, const RotorParams& params);

struct Masks {
  std::array<std::vector<double>, 3> velocity;  ///< 0 at constrained points
  std::vector<double> pressure;                 ///< 0 on outflow facets
  bool pressure_pinned = false;                 ///< any outflow point present
};

/// Boundary conditions keyed by facet tag.
///
/// A point shared by facets of different kinds takes the condition of the
/// highest priority: Dirichlet kinds > symmetry > outflow. Among Dirichlet
/// tags the first one added wins. Outflow pins the pressure on all of its
/// facet points.
class BoundarySet {
 public:
  void add(const std::string& tag, BcSpec spec);
  bool has(const std::string& tag) const;
  const BcSpec& get(const std::string& tag) const;
  const std::vector<std::string>& tags() const noexcept { return order_; }

  /// Resolves conditions on the space. Throws ConfigError for tags that are
  /// missing on either side and for symmetry facets that are not
  /// axis-aligned.
  void bind(const FunctionSpace& space, const GatherScatter& gs);
  bool bound() const noexcept { return space_ != nullptr; }

  const Masks& masks() const;

  /// Writes boundary values at time t into constrained components of `v`.
  /// Symmetry-constrained components are set to zero. Unconstrained entries
  /// are left unchanged.
  void apply_dirichlet(VecField& v, double t) const;
  /// Lift field: boundary values on constrained components, zero elsewhere.
  VecField lift(double t) const;

  /// Number of inflow points clamped in the last apply.
  std::size_t clamp_warnings() const noexcept { return clamp_warnings_; }

  /// Facets whose tag is not outflow (they carry a prescribed normal
  /// velocity in the pressure equation).
  bool is_outflow(const std::string& tag) const;

 private:
  std::vector<std::string> order_;
  std::vector<BcSpec> specs_;
  const FunctionSpace* space_ = nullptr;
  Masks masks_;
  // Dirichlet points: local index and governing spec.
  std::vector<std::size_t> dir_points_;
  std::vector<int> dir_spec_;
  // Symmetry-constrained (point, component) pairs.
  std::vector<std::size_t> sym_points_;
  std::vector<int> sym_comp_;
  mutable std::size_t clamp_warnings_ = 0;

  Vec3 evaluate(int spec, const Vec3& x, double t) const;
};

}  // namespace semflow
