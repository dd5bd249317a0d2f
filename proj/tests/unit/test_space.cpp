#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "semflow/error.hpp"
#include "semflow/gather_scatter.hpp"
#include "semflow/mesh.hpp"
#include "semflow/parallel.hpp"
#include "semflow/space.hpp"

using namespace semflow;

namespace {

const std::array<std::string, 6> kTags{"w", "w", "w", "w", "w", "w"};

std::shared_ptr<Mesh> box(std::array<int, 3> counts, std::array<Interval, 3> ext = {Interval{0, 1}, Interval{0, 1},
                                                                                      Interval{0, 1}}) {
  return std::make_shared<Mesh>(gen_box_mesh(ext, counts, kTags));
}

std::vector<double> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Space, UnitCubeFactors) {
  const FunctionSpace s(box({1, 1, 1}, {Interval{-0.5, 0.5}, Interval{-0.5, 0.5}, Interval{-0.5, 0.5}}), 4);
  const auto w = s.basis().weights();
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) {
        const auto p = s.index(0, i, j, k);
        const double rho = w[i] * w[j] * w[k];
        EXPECT_NEAR(s.jac()[p], 0.125, 1e-15);
        EXPECT_NEAR(s.g(0)[p], rho / 2.0, 1e-14);  // G11
        EXPECT_NEAR(s.g(3)[p], rho / 2.0, 1e-14);  // G22
        EXPECT_NEAR(s.g(5)[p], rho / 2.0, 1e-14);  // G33
        EXPECT_NEAR(s.g(1)[p], 0.0, 1e-15);
        EXPECT_NEAR(s.g(2)[p], 0.0, 1e-15);
        EXPECT_NEAR(s.g(4)[p], 0.0, 1e-15);
        EXPECT_NEAR(s.mass()[p], rho * 0.125, 1e-15);
      }
  EXPECT_NEAR(s.volume(), 1.0, 1e-14);
}

TEST(Space, AnisotropicBoxFactors) {
  const double hx = 2.0, hy = 0.5, hz = 0.25;
  const FunctionSpace s(box({1, 1, 1}, {Interval{0, hx}, Interval{1, 1 + hy}, Interval{0, hz}}), 3);
  const auto w = s.basis().weights();
  const double J = hx * hy * hz / 8.0;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) {
        const auto p = s.index(0, i, j, k);
        const double rho = w[i] * w[j] * w[k];
        EXPECT_NEAR(s.jac()[p], J, 1e-15);
        EXPECT_NEAR(s.g(0)[p], rho * J * std::pow(2.0 / hx, 2), 1e-13);
        EXPECT_NEAR(s.g(3)[p], rho * J * std::pow(2.0 / hy, 2), 1e-13);
        EXPECT_NEAR(s.g(5)[p], rho * J * std::pow(2.0 / hz, 2), 1e-13);
      }
}

TEST(Space, PerturbedElementVolumeMatchesQuadratureOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-0.15, 0.15);
  std::array<Vec3, 8> x;
  Mesh m;
  for (int c = 0; c < 8; ++c) {
    x[c] = {double(c & 1) + d(rng), double((c >> 1) & 1) + d(rng), double((c >> 2) & 1) + d(rng)};
    m.vertices.push_back(x[c]);
  }
  m.elements.push_back({0, 1, 2, 3, 4, 5, 6, 7});
  for (int f = 0; f < 6; ++f) m.boundary_facets.push_back({0, f, "w"});
  const FunctionSpace s(std::make_shared<Mesh>(m), 4);
  EXPECT_NEAR(s.volume(), oracle::trilinear_volume(x, 12), 1e-10);
}

TEST(Space, AffineVolumeSum) {
  const FunctionSpace s(box({3, 2, 2}, {Interval{0, 3}, Interval{-1, 1}, Interval{0, 0.5}}), 5);
  EXPECT_NEAR(s.volume(), 3.0, 1e-10);
}

TEST(Space, OutwardNormals) {
  const FunctionSpace s(box({2, 2, 2}), 3);
  for (const auto& f : s.facets()) {
    const int dir = f.face / 2;
    const double sign = f.face % 2 == 0 ? -1.0 : 1.0;
    for (std::size_t q = 0; q < f.points.size(); ++q)
      for (int l = 0; l < 3; ++l) EXPECT_NEAR(f.normal[l][q], l == dir ? sign : 0.0, 1e-14);
    double a = 0.0;
    for (double x : f.area) a += x;
    EXPECT_NEAR(a, 0.25, 1e-14);
  }
}

TEST(GatherScatter, SingleElementIsIdentity) {
  const FunctionSpace s(box({1, 1, 1}), 4);
  const GatherScatter gs(s);
  for (double m : gs.multiplicity()) EXPECT_EQ(m, 1.0);
  auto u = random_field(s.num_local(), 1);
  const auto u0 = u;
  gs.add(u);
  EXPECT_EQ(u, u0);
}

TEST(GatherScatter, SharedFaceMultiplicity) {
  const int n = 4;
  const FunctionSpace s(box({2, 1, 1}), n);
  const GatherScatter gs(s);
  int twos = 0;
  for (double m : gs.multiplicity()) twos += m == 2.0 ? 1 : 0;
  EXPECT_EQ(twos, 2 * (n + 1) * (n + 1));
  EXPECT_EQ(gs.num_global(), static_cast<std::size_t>((2 * n + 1) * (n + 1) * (n + 1)));
}

TEST(GatherScatter, CentralVertexHasMultiplicityEight) {
  const FunctionSpace s(box({2, 2, 2}), 3);
  const GatherScatter gs(s);
  int eights = 0;
  for (std::size_t i = 0; i < gs.num_local(); ++i) eights += gs.multiplicity()[i] == 8.0 ? 1 : 0;
  EXPECT_EQ(eights, 8);  // eight local copies of one point
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < gs.num_local(); ++i)
    if (gs.multiplicity()[i] == 8.0) ids.insert(gs.global_ids()[i]);
  EXPECT_EQ(ids.size(), 1u);
}

TEST(GatherScatter, MultiplicityMatchesIncidentElements) {
  const FunctionSpace s(box({3, 2, 2}), 2);
  const GatherScatter gs(s);
  for (std::size_t i = 0; i < s.num_local(); ++i) {
    const double x = s.coord(0)[i], y = s.coord(1)[i], z = s.coord(2)[i];
    auto count = [](double v, int cells) {
      const double t = v * cells;
      const double r = std::round(t);
      if (std::abs(t - r) > 1e-9) return 1;
      return (r > 0 && r < cells) ? 2 : 1;
    };
    EXPECT_EQ(gs.multiplicity()[i], count(x, 3) * count(y, 2) * count(z, 2));
  }
}

TEST(GatherScatter, ContinuousFieldBehaviour) {
  const FunctionSpace s(box({2, 2, 1}), 3);
  const GatherScatter gs(s);
  std::vector<double> u(s.num_local());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(s.coord(0)[i]) + s.coord(1)[i] * s.coord(2)[i];
  auto a = u;
  gs.avg(a);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(a[i], u[i], 1e-15);
  auto b = u;
  gs.add(b);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(b[i], gs.multiplicity()[i] * u[i], 1e-14);
}

TEST(GatherScatter, AvgIdempotentAndAddSymmetric) {
  const FunctionSpace s(box({2, 3, 2}), 3);
  const GatherScatter gs(s);
  auto u = random_field(s.num_local(), 3);
  auto v = random_field(s.num_local(), 4);
  auto a = u;
  gs.avg(a);
  auto aa = a;
  gs.avg(aa);
  EXPECT_EQ(a, aa);
  auto gu = u, gv = v;
  gs.add(gu);
  gs.add(gv);
  double l = 0.0, r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    l += gu[i] * v[i];
    r += u[i] * gv[i];
  }
  EXPECT_NEAR(l, r, 1e-12 * std::abs(l) + 1e-12);
  // Coincident points share coordinates.
  for (std::size_t i = 0; i < s.num_local(); ++i) {
    const auto f = static_cast<std::size_t>(gs.first_local()[static_cast<std::size_t>(gs.global_ids()[i])]);
    for (int l2 = 0; l2 < 3; ++l2) EXPECT_NEAR(s.coord(l2)[i], s.coord(l2)[f], 1e-12);
  }
}

TEST(GatherScatter, SizeMismatchRejected) {
  const FunctionSpace s(box({1, 1, 1}), 2);
  const GatherScatter gs(s);
  std::vector<double> u(5);
  EXPECT_THROW(gs.add(u), std::invalid_argument);
  EXPECT_THROW(gs.avg(u), std::invalid_argument);
}

TEST(GatherScatter, TopologyErrorForTouchingNonAdjacentElements) {
  // Two unit cubes meeting along a single edge only through duplicated
  // vertices: coordinates coincide without shared corners.
  Mesh m;
  auto add_cube = [&m](double ox, double oy) {
    const auto base = static_cast<std::int64_t>(m.vertices.size());
    for (int c = 0; c < 8; ++c) m.vertices.push_back({ox + (c & 1), oy + ((c >> 1) & 1), double((c >> 2) & 1)});
    std::array<std::int64_t, 8> e;
    for (int c = 0; c < 8; ++c) e[c] = base + c;
    m.elements.push_back(e);
    for (int f = 0; f < 6; ++f) m.boundary_facets.push_back({static_cast<std::int64_t>(m.elements.size() - 1), f, "w"});
  };
  add_cube(0, 0);
  add_cube(1, 0);
  const FunctionSpace s(std::make_shared<Mesh>(m), 2);
  EXPECT_THROW(GatherScatter gs(s), TopologyError);
}

TEST(GatherScatter, ThreadCountDoesNotChangeResults) {
  const FunctionSpace s(box({3, 3, 3}), 4);
  const GatherScatter gs(s);
  auto u = random_field(s.num_local(), 5);
  auto a = u;
  semflow::set_num_threads(1);
  gs.add(a);
  auto b = u;
  semflow::set_num_threads(4);
  gs.add(b);
  semflow::set_num_threads(1);
  EXPECT_EQ(a, b);
}
