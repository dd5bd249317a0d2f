#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semflow/case_config.hpp"
#include "semflow/driver.hpp"
#include "semflow/error.hpp"
#include "semflow/mesh.hpp"
#include "semflow/mesh_io.hpp"
#include "semflow/parallel.hpp"
#include "semflow/studies.hpp"

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Writes to <output-dir>/<name> when an output directory was given, to
// stdout otherwise.
void emit_table(const std::string& text, const std::string& output_dir, const std::string& name) {
  std::cout << text;
  if (output_dir.empty()) return;
  fs::create_directories(output_dir);
  std::ofstream out(fs::path(output_dir) / name);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semflow: spectral element incompressible flow solver"};
  app.require_subcommand(1);
  int threads = 0;
  std::string output_dir;
  app.add_option("--threads", threads, "worker threads (1 gives bit-reproducible output)")->check(CLI::NonNegativeNumber);
  app.add_option("--output-dir", output_dir, "directory for output files");

  // run
  auto* run = app.add_subcommand("run", "run a case file");
  std::string case_path;
  bool benchmark = false;
  std::string restart;
  run->add_option("case", case_path, "case file (JSON)")->required();
  run->add_flag("--benchmark", benchmark, "run 500 steps and report wall time over the last 100");
  run->add_option("--restart", restart, "checkpoint to continue from")->check(CLI::ExistingFile);
  run->fallthrough();

  // meshgen
  auto* meshgen = app.add_subcommand("meshgen", "generate a mesh file");
  meshgen->require_subcommand(1);
  meshgen->fallthrough();
  std::string mesh_out;
  auto* box = meshgen->add_subcommand("box", "Cartesian box");
  std::vector<double> extent{0, 1, 0, 1, 0, 1};
  std::vector<int> counts{2, 2, 2};
  std::vector<std::string> tags{"x_lo", "x_hi", "y_lo", "y_hi", "z_lo", "z_hi"};
  box->add_option("--extent", extent, "x0 x1 y0 y1 z0 z1")->expected(6);
  box->add_option("--counts", counts, "elements per direction")->expected(3);
  box->add_option("--tags", tags, "facet tags for x-, x+, y-, y+, z-, z+")->expected(6);
  box->add_option("-o,--output", mesh_out, "mesh file")->required();
  auto* cyl = meshgen->add_subcommand("cylinder", "vertical cylinder in a box");
  semflow::CylinderBoxParams cp;
  std::vector<double> cx{cp.x.lo, cp.x.hi};
  std::vector<double> cy{cp.y.lo, cp.y.hi};
  std::vector<double> cz{cp.z.lo, cp.z.hi};
  cyl->add_option("--diameter", cp.diameter);
  cyl->add_option("--x", cx)->expected(2);
  cyl->add_option("--y", cy)->expected(2);
  cyl->add_option("--z", cz)->expected(2);
  cyl->add_option("--square-half-width", cp.square_half_width);
  cyl->add_option("--azimuthal", cp.azimuthal);
  cyl->add_option("--radial", cp.radial);
  cyl->add_option("--vertical", cp.vertical);
  cyl->add_option("--upstream", cp.upstream);
  cyl->add_option("--downstream", cp.downstream);
  cyl->add_option("--side", cp.side);
  cyl->add_option("--geometry-order", cp.geometry_order);
  cyl->add_option("-o,--output", mesh_out, "mesh file")->required();

  // convergence
  auto* conv = app.add_subcommand("convergence", "convergence studies");
  conv->require_subcommand(1);
  conv->fallthrough();
  auto* poisson = conv->add_subcommand("poisson", "spatial convergence on the manufactured Poisson problem");
  std::vector<int> orders{3, 5, 7, 9};
  int epd = 2;
  poisson->add_option("--orders", orders);
  poisson->add_option("--elements", epd, "elements per direction");
  auto* tg = conv->add_subcommand("taylor-green", "temporal convergence on the Taylor-Green vortex");
  std::vector<double> dts{4e-3, 2e-3, 1e-3};
  semflow::TaylorGreenSetup setup;
  tg->add_option("--dt", dts);
  tg->add_option("--order", setup.order);
  tg->add_option("--nu", setup.nu);
  tg->add_option("--t-end", setup.t_end);

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) semflow::set_num_threads(threads);
    if (*run) {
      semflow::RunOptions opts;
      opts.threads = threads;
      opts.output_dir = output_dir.empty() ? fs::path(".") : fs::path(output_dir);
      opts.benchmark = benchmark;
      opts.restart = restart;
      opts.log = &std::cerr;
      semflow::run_case(semflow::load_case(case_path), opts);
    } else if (*box) {
      std::array<semflow::Interval, 3> ext{semflow::Interval{extent[0], extent[1]},
                                          semflow::Interval{extent[2], extent[3]},
                                          semflow::Interval{extent[4], extent[5]}};
      std::array<std::string, 6> t;
      std::copy(tags.begin(), tags.end(), t.begin());
      const auto mesh = semflow::gen_box_mesh(ext, {counts[0], counts[1], counts[2]}, t);
      semflow::write_mesh(mesh, mesh_out);
      std::cout << mesh.num_elements() << " elements written to " << mesh_out << "\n";
    } else if (*cyl) {
      cp.x = {cx[0], cx[1]};
      cp.y = {cy[0], cy[1]};
      cp.z = {cz[0], cz[1]};
      const auto mesh = semflow::gen_cylinder_box_mesh(cp);
      semflow::write_mesh(mesh, mesh_out);
      std::cout << mesh.num_elements() << " elements written to " << mesh_out << "\n";
    } else if (*poisson) {
      std::string text = "order,elements_per_dir,l2_error,iterations\n";
      for (int n : orders) {
        const auto r = semflow::poisson_convergence_case(n, epd);
        text += std::to_string(r.order) + "," + std::to_string(r.elements_per_dir) + "," + num(r.l2_error) + "," +
                std::to_string(r.iterations) + "\n";
      }
      emit_table(text, output_dir, "poisson_convergence.csv");
    } else if (*tg) {
      std::string text = "dt,steps,velocity_error,div_norm,pressure_iterations,velocity_order,div_order\n";
      std::vector<double> ev;
      std::vector<double> ed;
      std::vector<semflow::TaylorGreenResult> res;
      for (double dt : dts) {
        res.push_back(semflow::run_taylor_green(setup, dt));
        ev.push_back(res.back().velocity_error);
        ed.push_back(res.back().div_norm);
      }
      const auto ov = semflow::observed_orders(ev);
      const auto od = semflow::observed_orders(ed);
      for (std::size_t i = 0; i < res.size(); ++i) {
        const auto& r = res[i];
        text += num(r.dt) + "," + std::to_string(r.steps) + "," + num(r.velocity_error) + "," + num(r.div_norm) + "," +
                std::to_string(r.pressure_iterations) + "," + (i > 0 ? num(ov[i - 1]) : "") + "," +
                (i > 0 ? num(od[i - 1]) : "") + "\n";
      }
      emit_table(text, output_dir, "taylor_green_convergence.csv");
    }
  } catch (const semflow::Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
