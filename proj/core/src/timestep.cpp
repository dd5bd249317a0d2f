#include "semflow/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "semflow/diagnostics.hpp"
#include "semflow/error.hpp"

namespace semflow {

SchemeCoeffs scheme_coeffs(int order) {
  SchemeCoeffs c;
  c.order = order;
  switch (order) {
    case 1:
      c.gamma0 = 1.0;
      c.alpha = {1.0};
      c.beta = {1.0};
      break;
    case 2:
      c.gamma0 = 1.5;
      c.alpha = {2.0, -0.5};
      c.beta = {2.0, -1.0};
      break;
    case 3:
      c.gamma0 = 11.0 / 6.0;
      c.alpha = {3.0, -1.5, 1.0 / 3.0};
      c.beta = {3.0, -3.0, 1.0};
      break;
    default:
      throw std::invalid_argument("unsupported time scheme order " + std::to_string(order));
  }
  return c;
}

void FlowParams::validate() const {
  if (!(nu > 0.0)) throw ConfigError("viscosity must be positive");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (order < 1 || order > 3) throw ConfigError("scheme order must be 1, 2 or 3");
  pressure.validate();
  velocity.validate();
  if (pressure_projection < 0 || velocity_projection < 0) throw ConfigError("projection capacity must be >= 0");
}

void check_field(std::span<const double> f, const char* name) {
  for (double x : f)
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite values in field '") + name + "'");
}

FlowSolver::FlowSolver(const FunctionSpace& space, const GatherScatter& gs, const BoundarySet& bcs, FlowParams params,
                       VolumeForcing* forcing)
    : space_(&space), gs_(&gs), bcs_(&bcs), params_(params), forcing_(forcing) {
  params_.validate();
  const Masks& masks = bcs.masks();
  if (params_.dealias) dealias_ = std::make_unique<Dealias>(space);
  if (params_.schwarz) {
    schwarz_ = std::make_unique<HybridSchwarz>(space, gs, masks.pressure, params_.schwarz_options);
  } else {
    const auto d = helmholtz_diagonal(space, gs, HelmholtzCoeffs{1.0, 0.0});
    p_jacobi_ = std::make_unique<BlockJacobi>(space, d, masks.pressure);
  }
  if (params_.pressure_projection > 0)
    p_proj_ = std::make_unique<ProjectionSpace>(params_.pressure_projection, 20, &gs);
  if (params_.velocity_projection > 0)
    for (auto& pp : v_proj_) pp = std::make_unique<ProjectionSpace>(params_.velocity_projection, 20, &gs);
  const auto& facets = space.facets();
  for (std::size_t i = 0; i < facets.size(); ++i)
    if (!bcs.is_outflow(facets[i].tag)) flux_facets_.push_back(i);
}

std::array<ProjectionSpace*, 3> FlowSolver::velocity_projections() noexcept {
  return {v_proj_[0].get(), v_proj_[1].get(), v_proj_[2].get()};
}

int FlowSolver::current_order(const FlowState& state) const { return std::min(state.levels, params_.order); }

const BlockJacobi& FlowSolver::velocity_jacobi(int order) {
  auto& slot = v_jacobi_[static_cast<std::size_t>(order - 1)];
  if (!slot) {
    const SchemeCoeffs sc = scheme_coeffs(order);
    const auto d = helmholtz_diagonal(*space_, *gs_, HelmholtzCoeffs{params_.nu, sc.gamma0 / params_.dt});
    slot = std::make_unique<BlockJacobi>(*space_, d);
  }
  return *slot;
}

FlowState FlowSolver::initial_state(const VecField& v0, double t0) const {
  FlowState s;
  s.v[0] = v0;
  for (auto& c : s.v[0]) space_->check_size(c.size(), "initial velocity");
  bcs_->apply_dirichlet(s.v[0], t0);
  for (auto& c : s.v[0]) gs_->avg(c);
  s.v[1] = make_vec_field(*space_);
  s.v[2] = make_vec_field(*space_);
  for (auto& e : s.e) e = make_vec_field(*space_);
  s.p.assign(space_->num_local(), 0.0);
  s.t = t0;
  s.levels = 1;
  return s;
}

FlowState FlowSolver::history_state(const std::array<VecField, 3>& v, double t0) {
  FlowState s;
  s.v = v;
  for (auto& e : s.e) e = make_vec_field(*space_);
  s.p.assign(space_->num_local(), 0.0);
  for (int q = 2; q >= 1; --q) {
    FlowState tmp;
    tmp.v[0] = v[static_cast<std::size_t>(q)];
    tmp.t = t0 - q * params_.dt;
    tmp.e[0] = make_vec_field(*space_);
    compute_explicit(tmp);
    s.e[static_cast<std::size_t>(q)] = std::move(tmp.e[0]);
  }
  s.t = t0;
  s.levels = 3;
  return s;
}

void FlowSolver::compute_explicit(FlowState& state) {
  const std::size_t nl = space_->num_local();
  VecField& e = state.e[0];
  if (forcing_ != nullptr && forcing_->active()) {
    forcing_->evaluate(*space_, state.t, e);
  } else {
    for (auto& c : e) c.assign(nl, 0.0);
  }
  std::vector<double> w(nl);
  for (std::size_t c = 0; c < 3; ++c) {
    advect(*space_, state.v[0], state.v[0][c], w, dealias_.get());
    for (std::size_t i = 0; i < nl; ++i) e[c][i] -= w[i];
  }
}

std::vector<double> FlowSolver::pressure_rhs(const FlowState& state, VecField* vhat_out) const {
  const SchemeCoeffs sc = scheme_coeffs(current_order(state));
  const double dt = params_.dt;
  const std::size_t nl = space_->num_local();
  VecField vhat = make_vec_field(*space_);
  VecField vext = make_vec_field(*space_);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < nl; ++i) {
      double a = 0.0, b = 0.0, x = 0.0;
      for (std::size_t q = 0; q < sc.alpha.size(); ++q) a += sc.alpha[q] * state.v[q][c][i];
      for (std::size_t q = 0; q < sc.beta.size(); ++q) {
        b += sc.beta[q] * state.e[q][c][i];
        x += sc.beta[q] * state.v[q][c][i];
      }
      vhat[c][i] = a / dt + b;
      vext[c][i] = x;
    }
  VecField omega = curl(*space_, vext);
  for (auto& c : omega) gs_->avg(c);
  VecField cw = curl(*space_, omega);
  for (auto& c : cw) gs_->avg(c);
  VecField f = make_vec_field(*space_);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < nl; ++i) f[c][i] = vhat[c][i] - params_.nu * cw[c][i];

  std::vector<double> rhs(nl, 0.0);
  weak_div(*space_, f, rhs);
  const VecField vb = bcs_->lift(state.t + dt);
  const double g = sc.gamma0 / dt;
  const auto& facets = space_->facets();
  for (std::size_t fi : flux_facets_) {
    const auto& fa = facets[fi];
    for (std::size_t q = 0; q < fa.points.size(); ++q) {
      const auto l = static_cast<std::size_t>(fa.points[q]);
      const double vn = vb[0][l] * fa.normal[0][q] + vb[1][l] * fa.normal[1][q] + vb[2][l] * fa.normal[2][q];
      rhs[l] -= g * fa.area[q] * vn;
    }
  }
  gs_->add(rhs);
  const Masks& masks = bcs_->masks();
  if (masks.pressure_pinned) {
    for (std::size_t i = 0; i < nl; ++i) rhs[i] *= masks.pressure[i];
  } else {
    const auto im = gs_->inv_multiplicity();
    double s = 0.0;
    for (std::size_t i = 0; i < nl; ++i) s += rhs[i] * im[i];
    const double mean = s / static_cast<double>(gs_->num_global());
    for (auto& r : rhs) r -= mean;
  }
  if (vhat_out != nullptr) *vhat_out = std::move(vhat);
  return rhs;
}

void FlowSolver::apply_pressure_op(std::span<const double> x, std::span<double> y) const {
  ax_laplace(*space_, x, y);
  gs_->add(y);
  const auto& m = bcs_->masks().pressure;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= m[i];
}

StepReport FlowSolver::step(FlowState& state) {
  const int order = current_order(state);
  const SchemeCoeffs sc = scheme_coeffs(order);
  const double dt = params_.dt;
  const std::size_t nl = space_->num_local();
  const Masks& masks = bcs_->masks();
  StepReport rep;
  rep.step = state.step + 1;
  rep.order = order;

  compute_explicit(state);
  rep.cfl = cfl(*space_, state.v[0], dt);

  // Pressure.
  VecField vhat;
  std::vector<double> rhs = pressure_rhs(state, &vhat);
  LinearOp pop = [this](std::span<const double> x, std::span<double> y) { apply_pressure_op(x, y); };
  LinearOp pm = [this](std::span<const double> r, std::span<double> z) {
    if (schwarz_) schwarz_->apply(r, z);
    else p_jacobi_->apply(r, z);
  };
  std::vector<double> p(nl, 0.0);
  std::vector<double> guess;
  if (p_proj_) guess = p_proj_->project_pre(rhs);
  const SolveResult pr = gmres(pop, pm, rhs, p, params_.pressure, masks.pressure, gs_);
  if (p_proj_) {
    for (std::size_t i = 0; i < nl; ++i) p[i] += guess[i];
    p_proj_->project_post(p, pop);
  }
  if (!masks.pressure_pinned) {
    const auto B = space_->mass();
    double s = 0.0;
    for (std::size_t i = 0; i < nl; ++i) s += B[i] * p[i];
    const double mean = s / space_->volume();
    for (auto& x : p) x -= mean;
  }
  check_field(p, "pressure");
  rep.p_iters = pr.iterations;
  rep.p_res = pr.final_residual;
  rep.p_converged = pr.converged;

  // Velocity.
  VecField gp = grad(*space_, p);
  const double t_new = state.t + dt;
  const VecField vb = bcs_->lift(t_new);
  const HelmholtzCoeffs hc{params_.nu, sc.gamma0 / dt};
  const BlockJacobi& jac = velocity_jacobi(order);
  if (v_proj_[0] && v_proj_order_ != order) {
    for (auto& pp : v_proj_) pp->invalidate();
    v_proj_order_ = order;
  }
  const auto B = space_->mass();
  VecField vnew = make_vec_field(*space_);
  std::vector<double> tmp(nl);
  static const char* names[3] = {"velocity_x", "velocity_y", "velocity_z"};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& mask = masks.velocity[c];
    LinearOp hop = [&, this](std::span<const double> x, std::span<double> y) {
      ax_helmholtz(*space_, hc, x, y);
      gs_->add(y);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] *= mask[i];
    };
    LinearOp hm = [&jac](std::span<const double> r, std::span<double> z) { jac.apply(r, z); };
    ax_helmholtz(*space_, hc, vb[c], tmp);
    std::vector<double> r(nl);
    for (std::size_t i = 0; i < nl; ++i) r[i] = B[i] * (vhat[c][i] - gp[c][i]) - tmp[i];
    gs_->add(r);
    for (std::size_t i = 0; i < nl; ++i) r[i] *= mask[i];
    std::vector<double> u(nl, 0.0);
    std::vector<double> ug;
    if (v_proj_[c]) ug = v_proj_[c]->project_pre(r);
    const SolveResult vr = pcg(hop, hm, r, u, params_.velocity, mask, gs_);
    if (v_proj_[c]) {
      for (std::size_t i = 0; i < nl; ++i) u[i] += ug[i];
      v_proj_[c]->project_post(u, hop);
    }
    for (std::size_t i = 0; i < nl; ++i) vnew[c][i] = u[i] + vb[c][i];
    gs_->avg(vnew[c]);
    check_field(vnew[c], names[c]);
    rep.v_iters[c] = vr.iterations;
    rep.v_res[c] = vr.final_residual;
    rep.v_converged = rep.v_converged && vr.converged;
  }

  state.v[2] = std::move(state.v[1]);
  state.v[1] = std::move(state.v[0]);
  state.v[0] = std::move(vnew);
  state.e[2] = std::move(state.e[1]);
  state.e[1] = std::move(state.e[0]);
  state.e[0] = make_vec_field(*space_);
  state.p = std::move(p);
  state.t = t_new;
  state.step += 1;
  state.levels = std::min(state.levels + 1, 3);

  rep.time = state.t;
  rep.div_norm = divergence_norm(*space_, state.v[0]);
  return rep;
}

}  // namespace semflow
