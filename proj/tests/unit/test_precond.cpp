#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "semflow/error.hpp"
#include "semflow/krylov.hpp"
#include "semflow/operators.hpp"
#include "semflow/precond.hpp"

using namespace semflow;

namespace {

struct Problem {
  std::shared_ptr<Mesh> mesh;
  std::unique_ptr<FunctionSpace> space;
  std::unique_ptr<GatherScatter> gs;
  std::vector<double> mask;

  Problem(std::array<int, 3> counts, int order, std::array<std::string, 6> tags, std::string masked,
          std::array<Interval, 3> ext = {Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}) {
    mesh = std::make_shared<Mesh>(gen_box_mesh(ext, counts, tags));
    space = std::make_unique<FunctionSpace>(mesh, order);
    gs = std::make_unique<GatherScatter>(*space);
    mask.assign(space->num_local(), 1.0);
    for (const auto& f : space->facets())
      if (f.tag == masked)
        for (auto p : f.points) mask[static_cast<std::size_t>(p)] = 0.0;
    gs->avg(mask);
    for (auto& m : mask) m = m < 1.0 ? 0.0 : 1.0;
  }

  LinearOp laplace() const {
    return [this](std::span<const double> u, std::span<double> w) {
      ax_laplace(*space, u, w);
      gs->add(w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] *= mask[i];
    };
  }

  std::vector<double> random_rhs(unsigned seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> r(space->num_local());
    for (auto& v : r) v = d(rng);
    gs->add(r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= mask[i];
    return r;
  }
};

}  // namespace

TEST(Precond, AssembledDiagonalMatchesProbe) {
  Problem p({2, 2, 1}, 3, {"a", "a", "a", "a", "a", "a"}, "");
  const HelmholtzCoeffs c{0.5, 3.0};
  const LinearOp op = [&](std::span<const double> u, std::span<double> w) {
    ax_helmholtz(*p.space, c, u, w);
    p.gs->add(w);
  };
  const Eigen::MatrixXd a = oracle::probe_global(op, *p.gs);
  const auto d = helmholtz_diagonal(*p.space, *p.gs, c);
  const auto dg = p.gs->to_global(d);
  for (std::size_t g = 0; g < dg.size(); ++g) EXPECT_NEAR(dg[g], a(g, g), 1e-12 * a(g, g));
}

TEST(Precond, JacobiScalesByInverseDiagonal) {
  Problem p({2, 1, 1}, 2, {"d", "n", "n", "n", "n", "n"}, "d");
  const auto d = helmholtz_diagonal(*p.space, *p.gs, {1.0, 1.0});
  const BlockJacobi j(*p.space, d, p.mask);
  std::vector<double> r(d.size(), 2.0), z(d.size());
  j.apply(r, z);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_DOUBLE_EQ(z[i], p.mask[i] == 0.0 ? 0.0 : 2.0 / d[i]);
}

TEST(Precond, JacobiRejectsNonpositiveDiagonalWithLocation) {
  Problem p({1, 1, 1}, 2, {"a", "a", "a", "a", "a", "a"}, "");
  std::vector<double> d(p.space->num_local(), 1.0);
  d[5] = 0.0;
  try {
    BlockJacobi j(*p.space, d);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("("), std::string::npos);
  }
}

TEST(Precond, LocalSolveExactOnSingleDirichletBox) {
  Problem p({1, 1, 1}, 5, {"d", "d", "d", "d", "d", "d"}, "d", {Interval{0, 2}, Interval{0, 1}, Interval{0, 0.5}});
  const HybridSchwarz hs(*p.space, *p.gs, p.mask, {false, 10});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> u(p.space->num_local());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = p.mask[i] * d(rng);
  std::vector<double> au(u.size()), z(u.size());
  p.laplace()(u, au);
  hs.apply_local(au, z);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(z[i], u[i], 1e-11);
}

TEST(Precond, LocalPartSymmetricPositive) {
  Problem p({3, 2, 2}, 4, {"d", "n", "n", "n", "n", "n"}, "d");
  const HybridSchwarz hs(*p.space, *p.gs, p.mask);
  const VectorSpace vs(p.gs.get());
  const auto r1 = p.random_rhs(1), r2 = p.random_rhs(2);
  std::vector<double> z1(r1.size()), z2(r1.size());
  hs.apply_local(r1, z1);
  hs.apply_local(r2, z2);
  EXPECT_NEAR(vs.dot(z1, r2), vs.dot(r1, z2), 1e-12 * std::abs(vs.dot(z1, r2)));
  EXPECT_GT(vs.dot(z1, r1), 0.0);
  // Output is continuous and masked.
  auto c = z1;
  p.gs->avg(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c[i], z1[i], 1e-13);
    if (p.mask[i] == 0.0) {
      EXPECT_EQ(z1[i], 0.0);
    }
  }
}

TEST(Precond, CoarseMatrixIsGalerkinProduct) {
  Problem p({2, 2, 2}, 3, {"n", "n", "n", "n", "n", "n"}, "");
  const HybridSchwarz hs(*p.space, *p.gs, p.mask);
  ASSERT_EQ(hs.num_coarse(), 27u);
  const auto dense = hs.coarse_matrix_dense();
  // Trilinear hat function for each vertex (ix, iy, iz) on the unit cube.
  auto hat = [&](int ix, int iy, int iz) {
    std::vector<double> f(p.space->num_local());
    for (std::size_t q = 0; q < f.size(); ++q) {
      auto h1 = [](double x, int i) { return std::max(0.0, 1.0 - std::abs(2.0 * x - i)); };
      f[q] = h1(p.space->coord(0)[q], ix) * h1(p.space->coord(1)[q], iy) * h1(p.space->coord(2)[q], iz);
    }
    return f;
  };
  std::vector<std::vector<double>> phi;
  for (int iz = 0; iz < 3; ++iz)
    for (int iy = 0; iy < 3; ++iy)
      for (int ix = 0; ix < 3; ++ix) phi.push_back(hat(ix, iy, iz));
  const VectorSpace vs(p.gs.get());
  Eigen::MatrixXd oracle(27, 27);
  std::vector<double> aphi(p.space->num_local());
  for (int j = 0; j < 27; ++j) {
    p.laplace()(phi[j], aphi);
    for (int i = 0; i < 27; ++i) oracle(i, j) = vs.dot(phi[i], aphi);
  }
  // Coarse numbering is internal; compare spectra and trace.
  Eigen::MatrixXd m(27, 27);
  for (int i = 0; i < 27; ++i)
    for (int j = 0; j < 27; ++j) m(i, j) = dense[static_cast<std::size_t>(i * 27 + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(m), b(oracle);
  for (int k = 0; k < 27; ++k) EXPECT_NEAR(a.eigenvalues()(k), b.eigenvalues()(k), 1e-10);
  EXPECT_NEAR(m.trace(), oracle.trace(), 1e-10);
}

TEST(Precond, LinearWhenCoarseProblemIsSmall) {
  Problem p({2, 1, 1}, 4, {"d", "n", "n", "n", "n", "n"}, "d");
  const HybridSchwarz hs(*p.space, *p.gs, p.mask);
  ASSERT_LE(hs.num_coarse_free(), 10u);
  const auto r1 = p.random_rhs(3), r2 = p.random_rhs(4);
  std::vector<double> sum(r1.size()), z1(r1.size()), z2(r1.size()), zs(r1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) sum[i] = 2.0 * r1[i] - 0.5 * r2[i];
  hs.apply(r1, z1);
  hs.apply(r2, z2);
  hs.apply(sum, zs);
  for (std::size_t i = 0; i < r1.size(); ++i) EXPECT_NEAR(zs[i], 2.0 * z1[i] - 0.5 * z2[i], 1e-10);
  const VectorSpace vs(p.gs.get());
  EXPECT_NEAR(vs.dot(z1, r2), vs.dot(r1, z2), 1e-10 * std::abs(vs.dot(z1, r2)));
}

TEST(Precond, SchwarzBeatsJacobi) {
  Problem p({3, 3, 3}, 5, {"n", "o", "n", "n", "n", "n"}, "o");
  const auto rhs = p.random_rhs(7);
  const HybridSchwarz hs(*p.space, *p.gs, p.mask);
  const auto d = helmholtz_diagonal(*p.space, *p.gs, {1.0, 0.0});
  const BlockJacobi j(*p.space, d, p.mask);
  const SolverConfig cfg{1e-8, 3000, 30};
  std::vector<double> x1(rhs.size(), 0.0), x2(rhs.size(), 0.0);
  const auto rs = gmres(p.laplace(), [&](auto r, auto z) { hs.apply(r, z); }, rhs, x1, cfg, p.mask, p.gs.get());
  const auto rj = gmres(p.laplace(), [&](auto r, auto z) { j.apply(r, z); }, rhs, x2, cfg, p.mask, p.gs.get());
  ASSERT_TRUE(rs.converged);
  ASSERT_TRUE(rj.converged);
  EXPECT_LE(2 * rs.iterations, rj.iterations);
}
