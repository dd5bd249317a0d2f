#pragma once

#include <string>
#include <vector>

#include "semflow/timestep.hpp"

namespace semflow {

/// Poisson problem -lap u = 3 pi^2 u with u = sin(pi x) sin(pi y) sin(pi z)
/// on the unit cube, homogeneous Dirichlet boundary.
struct PoissonResult {
  int order = 0;
  int elements_per_dir = 0;
  double l2_error = 0.0;
  int iterations = 0;
};

PoissonResult poisson_convergence_case(int order, int elements_per_dir = 2);

/// Extruded Taylor-Green vortex u = sin x cos y F, v = -cos x sin y F,
/// F = exp(-2 nu t), on a box with the exact solution as Dirichlet data.
struct TaylorGreenSetup {
  int order = 7;
  int nx = 4;
  int ny = 4;
  int nz = 1;
  double lx = 2.0;
  double ly = 2.0;
  double lz = 2.0;
  double nu = 2.0;
  double t_end = 0.1;
  bool dealias = false;
  bool exact_history = true;  ///< start with three exact history levels
  double p_tol = 1e-12;
  double v_tol = 1e-12;
  int pressure_projection = 20;
  bool schwarz = true;
  /// Shell edges in units of l = sqrt(gamma0 nu dt).
  std::vector<double> shell_edges{0.0, 1.0, 2.0, 3.0};
};

struct TaylorGreenResult {
  double dt = 0.0;
  int steps = 0;
  double velocity_error = 0.0;  ///< L2 norm of v - v_exact at t_end
  double div_norm = 0.0;
  long pressure_iterations = 0;
  std::vector<int> pressure_iterations_per_step;
  std::vector<double> shells;  ///< RMS divergence per shell
  int unconverged_solves = 0;
  double max_p_residual = 0.0;
  double max_v_residual = 0.0;
};

Vec3 taylor_green_velocity(const Vec3& x, double t, double nu);
double taylor_green_pressure(const Vec3& x, double t, double nu);

TaylorGreenResult run_taylor_green(const TaylorGreenSetup& setup, double dt, int max_steps = -1);

/// log2(e_coarse / e_fine) for successive halvings.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace semflow
