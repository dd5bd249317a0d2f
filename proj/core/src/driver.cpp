#include "semflow/driver.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include "semflow/diagnostics.hpp"
#include "semflow/error.hpp"
#include "semflow/field_io.hpp"
#include "semflow/gather_scatter.hpp"
#include "semflow/parallel.hpp"
#include "semflow/space.hpp"
#include "semflow/studies.hpp"

namespace semflow {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string step_name(const char* prefix, std::int64_t step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%08lld.%s", prefix, static_cast<long long>(step), ext);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << header << '\n';
  return out;
}

VecField initial_velocity(const CaseConfig& config, const FunctionSpace& space) {
  VecField v = make_vec_field(space);
  if (config.initial.type == "zero") return v;
  for (std::size_t i = 0; i < space.num_local(); ++i) {
    Vec3 u = config.initial.velocity;
    if (config.initial.type == "taylor_green")
      u = taylor_green_velocity({space.coord(0)[i], space.coord(1)[i], space.coord(2)[i]}, 0.0, config.nu);
    for (std::size_t c = 0; c < 3; ++c) v[c][i] = u[c];
  }
  return v;
}

StatSummary summarize(const RunningStats& s) { return {s.count(), s.mean(), s.stddev()}; }

}  // namespace

RunSummary run_case(const CaseConfig& config, const RunOptions& options) {
  config.validate();
  if (options.threads > 0) set_num_threads(options.threads);
  std::ostream* log = options.log;
  std::filesystem::create_directories(options.output_dir);
  const auto& dir = options.output_dir;

  auto mesh = std::make_shared<Mesh>(build_mesh(config));
  FunctionSpace space(mesh, config.order);
  GatherScatter gs(space);
  BoundarySet bcs = build_boundaries(config);
  bcs.bind(space, gs);
  VolumeForcing forcing;
  if (config.tripping) forcing.set_tripping(*config.tripping, 0.0);
  FlowSolver solver(space, gs, bcs, flow_params(config), &forcing);

  FlowState state;
  if (options.restart.empty()) {
    state = solver.initial_state(initial_velocity(config, space), 0.0);
  } else {
    state = restore_checkpoint(read_checkpoint(options.restart), solver, &forcing);
  }

  const std::int64_t end_step = options.benchmark ? state.step + options.benchmark_steps : config.steps;
  const bool write_outputs = !options.benchmark;
  if (log != nullptr) {
    *log << "case " << config.name << ": " << space.num_elements() << " elements, N=" << space.order() << ", "
         << gs.num_global() << " points, nu=" << num(config.nu) << ", dt=" << num(config.dt) << ", seed=" << config.seed
         << ", threads=" << num_threads() << "\n";
    if (!options.restart.empty()) *log << "restart from step " << state.step << " at t=" << num(state.t) << "\n";
  }

  auto diag = open_csv(dir / "diagnostics.csv",
                       "step,time,order,cfl,p_iters,p_res,p_converged,u_iters,v_iters,w_iters,u_res,v_res,w_res,"
                       "v_converged,div_norm,kinetic_energy");
  auto timing = open_csv(dir / "timing.csv", "step,wall_seconds");
  const bool with_forces = !config.forces.tag.empty();
  std::ofstream forces;
  if (with_forces) forces = open_csv(dir / "forces.csv", "time,Fx_p,Fy_p,Fz_p,Fx_v,Fy_v,Fz_v,C_d,C_l");
  const double norm = with_forces ? force_normalization(config.forces.u_cl, config.forces.h, config.forces.diameter) : 1.0;
  const ForceOptions fopts{config.forces.symmetric_stress, config.forces.body_normal};

  auto write_fields = [&]() {
    write_vtk(space, dir / step_name("fields", state.step, "vtk"), {{"pressure", state.p}},
              {{"velocity", &state.v[0]}});
  };
  auto write_ckpt = [&]() {
    write_checkpoint(make_checkpoint(solver, state, &forcing), dir / step_name("checkpoint", state.step, "chk"));
  };

  RunSummary sum;
  sum.first_step = state.step;
  RunningStats cd;
  RunningStats cl;
  std::vector<double> step_seconds;
  const auto& out = config.output;
  while (state.step < end_step) {
    const auto t0 = std::chrono::steady_clock::now();
    const StepReport rep = solver.step(state);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    step_seconds.push_back(secs);
    timing << rep.step << ',' << num(secs) << '\n';
    sum.max_cfl = std::max(sum.max_cfl, rep.cfl);
    if (!rep.p_converged) {
      ++sum.unconverged_solves;
      if (log != nullptr) *log << "step " << rep.step << ": pressure solve not converged, residual " << num(rep.p_res) << "\n";
    }
    if (!rep.v_converged) {
      ++sum.unconverged_solves;
      if (log != nullptr) *log << "step " << rep.step << ": velocity solve not converged\n";
    }
    if (rep.cfl > 1.0 && log != nullptr) *log << "step " << rep.step << ": CFL " << num(rep.cfl) << "\n";

    if (rep.step % out.diagnostics_every == 0 || rep.step == end_step) {
      diag << rep.step << ',' << num(rep.time) << ',' << rep.order << ',' << num(rep.cfl) << ',' << rep.p_iters << ','
           << num(rep.p_res) << ',' << (rep.p_converged ? 1 : 0);
      for (int it : rep.v_iters) diag << ',' << it;
      for (double r : rep.v_res) diag << ',' << num(r);
      diag << ',' << (rep.v_converged ? 1 : 0) << ',' << num(rep.div_norm) << ','
           << num(kinetic_energy(space, state.v[0])) << '\n';
    }
    if (with_forces && rep.step % out.forces_every == 0) {
      ForceRecord f = surface_force(space, config.forces.tag, state.p, state.v[0], config.nu, fopts);
      f.time = state.t;
      set_coefficients(f, norm);
      forces << num(f.time);
      for (double c : f.pressure) forces << ',' << num(c);
      for (double c : f.viscous) forces << ',' << num(c);
      forces << ',' << num(f.c_d) << ',' << num(f.c_l) << '\n';
      cd.push(f.c_d);
      cl.push(f.c_l);
      sum.last_force = f;
    }
    if (write_outputs && out.fields_every > 0 && rep.step % out.fields_every == 0) write_fields();
    if (write_outputs && out.checkpoint_every > 0 && rep.step % out.checkpoint_every == 0) write_ckpt();
  }
  if (write_outputs && (out.fields_every == 0 || state.step % out.fields_every != 0)) write_fields();
  if (write_outputs && (out.checkpoint_every == 0 || state.step % out.checkpoint_every != 0)) write_ckpt();

  if (with_forces) {
    auto stats = open_csv(dir / "forces_stats.csv", "quantity,count,mean,std");
    stats << "C_d," << cd.count() << ',' << num(cd.mean()) << ',' << num(cd.stddev()) << '\n';
    stats << "C_l," << cl.count() << ',' << num(cl.mean()) << ',' << num(cl.stddev()) << '\n';
    sum.c_d = summarize(cd);
    sum.c_l = summarize(cl);
  }

  RunningStats ts;
  const std::size_t window = static_cast<std::size_t>(std::max(options.benchmark_window, 1));
  const std::size_t from = step_seconds.size() > window ? step_seconds.size() - window : 0;
  for (std::size_t i = from; i < step_seconds.size(); ++i) ts.push(step_seconds[i]);
  sum.step_seconds = summarize(ts);
  sum.final_step = state.step;
  sum.final_time = state.t;
  sum.div_norm = divergence_norm(space, state.v[0]);
  sum.kinetic_energy = kinetic_energy(space, state.v[0]);
  if (log != nullptr) {
    *log << "finished step " << sum.final_step << " at t=" << num(sum.final_time) << ", max CFL " << num(sum.max_cfl)
         << ", unconverged solves " << sum.unconverged_solves << "\n";
    *log << "wall time per step over the last " << sum.step_seconds.count << " steps: " << num(sum.step_seconds.mean)
         << " s +- " << num(sum.step_seconds.stddev) << " s\n";
    if (with_forces)
      *log << "C_d " << num(sum.c_d.mean) << " +- " << num(sum.c_d.stddev) << ", C_l " << num(sum.c_l.mean) << " +- "
           << num(sum.c_l.stddev) << "\n";
  }
  return sum;
}

}  // namespace semflow
