#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "semflow/diagnostics.hpp"
#include "semflow/error.hpp"

using namespace semflow;

namespace {

std::shared_ptr<Mesh> unit_box(std::array<std::string, 6> tags, std::array<int, 3> counts = {2, 2, 2}) {
  return std::make_shared<Mesh>(gen_box_mesh({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, counts, tags));
}

VecField sample(const FunctionSpace& s, Vec3 (*f)(const Vec3&)) {
  VecField v = make_vec_field(s);
  for (std::size_t i = 0; i < s.num_local(); ++i) {
    const Vec3 u = f({s.coord(0)[i], s.coord(1)[i], s.coord(2)[i]});
    for (std::size_t c = 0; c < 3; ++c) v[c][i] = u[c];
  }
  return v;
}

}  // namespace

TEST(Diagnostics, ClosedSurfaceConstantPressureGivesZeroForce) {
  CylinderBoxParams p;
  p.azimuthal = 8;
  p.radial = 2;
  p.upstream = 2;
  p.downstream = 2;
  p.side = 1;
  p.geometry_order = 4;
  auto mesh = std::make_shared<Mesh>(gen_cylinder_box_mesh(p));
  for (auto& f : mesh->boundary_facets) f.tag = "all";
  const FunctionSpace space(mesh, 4);
  const std::vector<double> pr(space.num_local(), 3.7);
  const auto v = make_vec_field(space);
  const auto r = surface_force(space, "all", pr, v, 1.0);
  for (int c = 0; c < 3; ++c) {
    EXPECT_LT(std::abs(r.pressure[static_cast<std::size_t>(c)]), 1e-10);
    EXPECT_EQ(r.viscous[static_cast<std::size_t>(c)], 0.0);
  }
}

TEST(Diagnostics, LinearPressureOnFace) {
  const auto mesh = unit_box({"a", "f", "a", "a", "a", "a"});
  const FunctionSpace space(mesh, 3);
  std::vector<double> pr(space.num_local());
  for (std::size_t i = 0; i < pr.size(); ++i) pr[i] = space.coord(1)[i] + 2.0 * space.coord(0)[i];
  const auto r = surface_force(space, "f", pr, make_vec_field(space), 1.0);
  // On x = 1: p = y + 2, integral 2.5, outward normal +x.
  EXPECT_NEAR(r.pressure[0], -2.5, 1e-13);
  EXPECT_NEAR(r.pressure[1], 0.0, 1e-13);
  EXPECT_NEAR(r.pressure[2], 0.0, 1e-13);
  ForceOptions body;
  body.body_normal = true;
  const auto rb = surface_force(space, "f", pr, make_vec_field(space), 1.0, body);
  EXPECT_NEAR(rb.pressure[0], 2.5, 1e-13);
  EXPECT_THROW(surface_force(space, "nope", pr, make_vec_field(space), 1.0), ConfigError);
}

TEST(Diagnostics, ShearTraction) {
  const auto mesh = unit_box({"a", "a", "a", "top", "a", "a"});
  const FunctionSpace space(mesh, 3);
  const std::vector<double> pr(space.num_local(), 0.0);
  const double nu = 0.5;
  // u = y: tau n on y = 1 is (nu, 0, 0) in both stress forms.
  const auto shear = sample(space, [](const Vec3& x) { return Vec3{x[1], 0.0, 0.0}; });
  auto r = surface_force(space, "top", pr, shear, nu);
  EXPECT_NEAR(r.viscous[0], nu, 1e-13);
  EXPECT_NEAR(r.viscous[1], 0.0, 1e-13);
  ForceOptions sym;
  sym.symmetric_stress = true;
  r = surface_force(space, "top", pr, shear, nu, sym);
  EXPECT_NEAR(r.viscous[0], nu, 1e-13);
  // v = x separates the two forms: du_i/dy = 0 but dv/dx = 1.
  const auto cross = sample(space, [](const Vec3& x) { return Vec3{0.0, x[0], 0.0}; });
  r = surface_force(space, "top", pr, cross, nu);
  EXPECT_NEAR(r.viscous[0], 0.0, 1e-13);
  r = surface_force(space, "top", pr, cross, nu, sym);
  EXPECT_NEAR(r.viscous[0], nu, 1e-13);
}

TEST(Diagnostics, Coefficients) {
  EXPECT_DOUBLE_EQ(force_normalization(2.0, 3.0, 0.5), 1.5);
  ForceRecord rec;
  rec.pressure = {1.0, 5.0, 2.0};
  rec.viscous = {0.5, 0.0, -1.0};
  set_coefficients(rec, 0.5);
  EXPECT_DOUBLE_EQ(rec.c_d, 3.0);
  EXPECT_DOUBLE_EQ(rec.c_l, 2.0);
}

TEST(Diagnostics, DivergenceAndEnergy) {
  const auto mesh = unit_box({"a", "a", "a", "a", "a", "a"});
  const FunctionSpace space(mesh, 4);
  // div (x, y, z) = 3 over unit volume.
  const auto v = sample(space, [](const Vec3& x) { return x; });
  EXPECT_NEAR(divergence_norm(space, v), 3.0, 1e-12);
  // 0.5 * integral of x^2 + y^2 + z^2 = 0.5.
  EXPECT_NEAR(kinetic_energy(space, v), 0.5, 1e-12);
  const auto w = sample(space, [](const Vec3& x) { return Vec3{x[1], x[2], x[0]}; });
  EXPECT_LT(divergence_norm(space, w), 1e-12);
}

TEST(Diagnostics, DivergenceShells) {
  const auto mesh = unit_box({"a", "a", "a", "a", "a", "a"}, {4, 4, 4});
  const FunctionSpace space(mesh, 4);
  const auto v = sample(space, [](const Vec3& x) { return Vec3{x[0], 0.0, 0.0}; });
  const std::vector<double> edges{0.0, 0.1, 0.2, 0.6};
  const auto s = divergence_shells(space, v, edges);
  ASSERT_EQ(s.size(), 3u);
  for (double x : s) EXPECT_NEAR(x, 1.0, 1e-12);
  const std::vector<double> one{0.0};
  EXPECT_THROW(divergence_shells(space, v, one), std::invalid_argument);
}

TEST(Diagnostics, RunningStatsMatchesTwoPass) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(1.5, 0.01);
  std::vector<double> x(1000);
  RunningStats st;
  for (auto& xi : x) {
    xi = d(rng);
    st.push(xi);
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double xi : x) ss += (xi - mean) * (xi - mean);
  const double var = ss / static_cast<double>(x.size() - 1);
  EXPECT_EQ(st.count(), 1000);
  EXPECT_NEAR(st.mean(), mean, 1e-12 * std::abs(mean));
  EXPECT_NEAR(st.stddev(), std::sqrt(var), 1e-12 * std::sqrt(var));
  RunningStats one;
  one.push(4.0);
  EXPECT_EQ(one.mean(), 4.0);
  EXPECT_EQ(one.variance(), 0.0);
}
