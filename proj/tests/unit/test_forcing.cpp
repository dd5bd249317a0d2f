#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "semflow/error.hpp"
#include "semflow/forcing.hpp"

using namespace semflow;

namespace {

TrippingConfig config() {
  TrippingConfig c;
  c.x0 = 0.0;
  c.lx = 0.5;
  c.ly = 0.25;
  c.z_min = -1.0;
  c.z_max = 1.0;
  c.ts_amp = 0.1;
  c.tu_amp = 0.3;
  c.t_s = 0.125;
  c.n_modes = 12;
  c.seed = 42;
  return c;
}

}  // namespace

TEST(Forcing, Smoothstep) {
  EXPECT_EQ(smoothstep(0.0), 0.0);
  EXPECT_EQ(smoothstep(1.0), 1.0);
  EXPECT_EQ(smoothstep(0.5), 0.5);
  EXPECT_DOUBLE_EQ(smoothstep(0.25), 0.15625);
}

TEST(Forcing, ValidateRejectsBadConfig) {
  auto c = config();
  c.t_s = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config();
  c.n_modes = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config();
  c.z_min = 2.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config();
  c.ly = -1.0;
  EXPECT_THROW(trip_init(c, 0.0), ConfigError);
}

TEST(Forcing, SeriesHasUnitMeanSquareOverPeriod) {
  const auto c = config();
  const auto modes = trip_modes(c, 3);
  const double period = c.t_s * c.n_modes;
  const int n = 512;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = trip_series(c, modes, period * i / n);
    s2 += g * g;
  }
  EXPECT_NEAR(s2 / n, 1.0, 1e-12);
}

TEST(Forcing, ZeroAmplitudesGiveZero) {
  auto c = config();
  c.ts_amp = 0.0;
  c.tu_amp = 0.0;
  const auto s = trip_init(c, 0.03);
  for (double z = -1.0; z <= 1.0; z += 0.1) EXPECT_EQ(trip_g(c, s, z, 0.03), 0.0);
}

TEST(Forcing, ZeroOutsideSpan) {
  const auto c = config();
  const auto s = trip_init(c, 0.0);
  EXPECT_EQ(trip_g(c, s, 1.01, 0.0), 0.0);
  EXPECT_EQ(trip_eval(c, s, {0.0, 0.0, -1.5}, 0.0), 0.0);
}

TEST(Forcing, EnvelopeDecays) {
  const auto c = config();
  const auto s = trip_init(c, 0.01);
  EXPECT_EQ(trip_eval(c, s, {0.0, 0.0, 0.3}, 0.01), trip_g(c, s, 0.3, 0.01));
  EXPECT_DOUBLE_EQ(trip_eval(c, s, {0.5, 0.0, 0.3}, 0.01), trip_g(c, s, 0.3, 0.01) * std::exp(-1.0));
  EXPECT_DOUBLE_EQ(trip_eval(c, s, {0.0, 0.25, 0.3}, 0.01), trip_g(c, s, 0.3, 0.01) * std::exp(-1.0));
  EXPECT_LT(std::abs(trip_eval(c, s, {4.0, 0.0, 0.3}, 0.01)), 1e-12);
  EXPECT_LT(std::abs(trip_eval(c, s, {0.0, 2.0, 0.3}, 0.01)), 1e-12);
}

TEST(Forcing, ContinuousAcrossSegmentBoundary) {
  const auto c = config();
  const double tb = 2.0 * c.t_s;
  const auto before = trip_init(c, tb - 0.01);
  auto after = before;
  trip_advance(c, after, tb);
  ASSERT_EQ(before.segment + 1, after.segment);
  for (double z = -0.95; z < 1.0; z += 0.1) {
    const double gl = trip_g(c, before, z, tb);
    const double gr = trip_g(c, after, z, tb);
    EXPECT_NEAR(gl, gr, 1e-14) << z;
    // Second-order one-sided differences on each side.
    const double h = 1e-6;
    const double dl = (3.0 * gl - 4.0 * trip_g(c, before, z, tb - h) + trip_g(c, before, z, tb - 2 * h)) / (2 * h);
    const double dr = (-3.0 * gr + 4.0 * trip_g(c, after, z, tb + h) - trip_g(c, after, z, tb + 2 * h)) / (2 * h);
    EXPECT_NEAR(dl, dr, 1e-6) << z;
    // The smoothstep blend has zero slope at the ends.
    EXPECT_NEAR(dl, 0.0, 1e-6) << z;
  }
}

TEST(Forcing, NonzeroSlopeInsideSegment) {
  const auto c = config();
  const double t = 0.5 * c.t_s;
  const auto s = trip_init(c, 0.0);
  const double h = 1e-6;
  double maxd = 0.0;
  for (double z = -0.95; z < 1.0; z += 0.1)
    maxd = std::max(maxd, std::abs(trip_g(c, s, z, t + h) - trip_g(c, s, z, t - h)) / (2 * h));
  EXPECT_GT(maxd, 0.1);
}

TEST(Forcing, AdvanceDrawsOneSetPerSegment) {
  const auto c = config();
  auto s = trip_init(c, 0.0);
  EXPECT_EQ(s.draws, 3);
  trip_advance(c, s, 0.1);
  EXPECT_EQ(s.draws, 3);
  const auto old_next = s.next.phase;
  trip_advance(c, s, 0.13);
  EXPECT_EQ(s.draws, 4);
  EXPECT_EQ(s.segment, 1);
  EXPECT_EQ(s.current.phase, old_next);
  EXPECT_EQ(s.next.phase, trip_modes(c, 2).phase);
  EXPECT_THROW(trip_advance(c, s, 0.12), std::invalid_argument);
}

TEST(Forcing, SeedReplayIsBitExact) {
  auto c = config();
  auto a = trip_init(c, 0.0);
  auto b = trip_init(c, 0.0);
  for (double t = 0.0; t < 1.0; t += 0.01) {
    trip_advance(c, a, t);
    trip_advance(c, b, t);
    for (double z = -1.0; z <= 1.0; z += 0.25) EXPECT_EQ(trip_g(c, a, z, t), trip_g(c, b, z, t));
  }
  // A state jumping straight to a segment agrees with one stepped there.
  const auto jumped = trip_init(c, 0.99);
  EXPECT_EQ(jumped.current.phase, a.current.phase);
  EXPECT_EQ(jumped.next.phase, a.next.phase);
  c.seed = 43;
  EXPECT_NE(trip_modes(c, 0).phase, trip_modes(config(), 0).phase);
  EXPECT_NE(trip_steady_modes(c).phase, trip_steady_modes(config()).phase);
  EXPECT_NE(trip_modes(config(), 0).phase, trip_modes(config(), 1).phase);
}

TEST(Forcing, VolumeForcingFillsWallNormalComponent) {
  const auto mesh = std::make_shared<Mesh>(gen_box_mesh({Interval{-1, 1}, Interval{0, 1}, Interval{-1, 1}}, {2, 1, 2},
                                                        {"a", "a", "a", "a", "a", "a"}));
  const FunctionSpace space(mesh, 3);
  const auto c = config();
  VolumeForcing f;
  EXPECT_FALSE(f.active());
  f.set_tripping(c, 0.0);
  f.set_analytic([](const Vec3& x, double t) { return Vec3{x[0] * t, 0.0, 1.0}; });
  EXPECT_TRUE(f.active());
  VecField out;
  f.evaluate(space, 0.2, out);
  const auto& st = f.tripping_state();
  EXPECT_EQ(st.segment, 1);
  for (std::size_t l = 0; l < space.num_local(); ++l) {
    const Vec3 x{space.coord(0)[l], space.coord(1)[l], space.coord(2)[l]};
    EXPECT_EQ(out[0][l], x[0] * 0.2);
    EXPECT_EQ(out[1][l], trip_eval(c, st, x, 0.2));
    EXPECT_EQ(out[2][l], 1.0);
  }
}
