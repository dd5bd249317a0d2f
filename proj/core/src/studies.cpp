#include "semflow/studies.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "semflow/diagnostics.hpp"
#include "semflow/mesh.hpp"

namespace semflow {

PoissonResult poisson_convergence_case(int order, int elements_per_dir) {
  const double pi = std::numbers::pi;
  auto mesh = std::make_shared<Mesh>(gen_box_mesh({Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}},
                                                  {elements_per_dir, elements_per_dir, elements_per_dir},
                                                  {"wall", "wall", "wall", "wall", "wall", "wall"}));
  FunctionSpace space(mesh, order);
  GatherScatter gs(space);
  BoundarySet bcs;
  bcs.add("wall", BcSpec{});
  bcs.bind(space, gs);
  const auto& mask = bcs.masks().velocity[0];
  const std::size_t nl = space.num_local();
  const auto B = space.mass();
  std::vector<double> exact(nl), rhs(nl), u(nl, 0.0);
  for (std::size_t i = 0; i < nl; ++i) {
    exact[i] = std::sin(pi * space.coord(0)[i]) * std::sin(pi * space.coord(1)[i]) * std::sin(pi * space.coord(2)[i]);
    rhs[i] = B[i] * 3.0 * pi * pi * exact[i];
  }
  gs.add(rhs);
  for (std::size_t i = 0; i < nl; ++i) rhs[i] *= mask[i];
  LinearOp op = [&](std::span<const double> x, std::span<double> y) {
    ax_laplace(space, x, y);
    gs.add(y);
    for (std::size_t i = 0; i < nl; ++i) y[i] *= mask[i];
  };
  BlockJacobi jac(space, helmholtz_diagonal(space, gs, HelmholtzCoeffs{1.0, 0.0}), mask);
  LinearOp pm = [&](std::span<const double> r, std::span<double> z) { jac.apply(r, z); };
  const SolveResult res = pcg(op, pm, rhs, u, SolverConfig{1e-13, 2000, 10}, mask, &gs);
  double err = 0.0;
  for (std::size_t i = 0; i < nl; ++i) err += B[i] * (u[i] - exact[i]) * (u[i] - exact[i]);
  return {order, elements_per_dir, std::sqrt(err), res.iterations};
}

Vec3 taylor_green_velocity(const Vec3& x, double t, double nu) {
  const double f = std::exp(-2.0 * nu * t);
  return {std::sin(x[0]) * std::cos(x[1]) * f, -std::cos(x[0]) * std::sin(x[1]) * f, 0.0};
}

double taylor_green_pressure(const Vec3& x, double t, double nu) {
  const double f = std::exp(-2.0 * nu * t);
  return 0.25 * (std::cos(2.0 * x[0]) + std::cos(2.0 * x[1])) * f * f;
}

namespace {

VecField sample(const FunctionSpace& space, double t, double nu) {
  VecField v = make_vec_field(space);
  for (std::size_t i = 0; i < space.num_local(); ++i) {
    const Vec3 u = taylor_green_velocity({space.coord(0)[i], space.coord(1)[i], space.coord(2)[i]}, t, nu);
    for (std::size_t c = 0; c < 3; ++c) v[c][i] = u[c];
  }
  return v;
}

}  // namespace

TaylorGreenResult run_taylor_green(const TaylorGreenSetup& setup, double dt, int max_steps) {
  auto mesh = std::make_shared<Mesh>(gen_box_mesh(
      {Interval{0.0, setup.lx}, Interval{0.0, setup.ly}, Interval{0.0, setup.lz}}, {setup.nx, setup.ny, setup.nz},
      {"wall", "wall", "wall", "wall", "wall", "wall"}));
  FunctionSpace space(mesh, setup.order);
  GatherScatter gs(space);
  BoundarySet bcs;
  BcSpec wall;
  wall.kind = BcKind::Velocity;
  const double nu = setup.nu;
  wall.value = [nu](const Vec3& x, double t) { return taylor_green_velocity(x, t, nu); };
  bcs.add("wall", wall);
  bcs.bind(space, gs);

  FlowParams params;
  params.nu = nu;
  params.dt = dt;
  params.order = 3;
  params.dealias = setup.dealias;
  params.pressure = SolverConfig{setup.p_tol, 500, 20};
  params.velocity = SolverConfig{setup.v_tol, 500, 10};
  params.pressure_projection = setup.pressure_projection;
  params.schwarz = setup.schwarz;
  FlowSolver solver(space, gs, bcs, params);

  FlowState state;
  if (setup.exact_history) {
    state = solver.history_state({sample(space, 0.0, nu), sample(space, -dt, nu), sample(space, -2.0 * dt, nu)}, 0.0);
  } else {
    state = solver.initial_state(sample(space, 0.0, nu), 0.0);
  }
  int steps = static_cast<int>(std::llround(setup.t_end / dt));
  if (max_steps >= 0) steps = std::min(steps, max_steps);
  TaylorGreenResult res;
  res.dt = dt;
  res.steps = steps;
  for (int n = 0; n < steps; ++n) {
    const StepReport rep = solver.step(state);
    res.pressure_iterations += rep.p_iters;
    res.pressure_iterations_per_step.push_back(rep.p_iters);
    if (!rep.p_converged) ++res.unconverged_solves;
    if (!rep.v_converged) ++res.unconverged_solves;
    res.max_p_residual = std::max(res.max_p_residual, rep.p_res);
    for (double r : rep.v_res) res.max_v_residual = std::max(res.max_v_residual, r);
  }
  const VecField ex = sample(space, state.t, nu);
  const auto B = space.mass();
  double err = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < B.size(); ++i) {
      const double d = state.v[0][c][i] - ex[c][i];
      err += B[i] * d * d;
    }
  res.velocity_error = std::sqrt(err);
  res.div_norm = divergence_norm(space, state.v[0]);
  const double l = std::sqrt(scheme_coeffs(3).gamma0 * nu * dt);
  std::vector<double> edges;
  for (double e : setup.shell_edges) edges.push_back(e * l);
  res.shells = divergence_shells(space, state.v[0], edges);
  return res;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

}  // namespace semflow
