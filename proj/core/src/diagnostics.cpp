#include "semflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semflow/error.hpp"

namespace semflow {

ForceRecord surface_force(const FunctionSpace& space, const std::string& tag, std::span<const double> p,
                          const VecField& v, double nu, const ForceOptions& options) {
  space.check_size(p.size(), "surface_force pressure");
  bool found = false;
  for (const auto& f : space.facets())
    if (f.tag == tag) found = true;
  if (!found) throw ConfigError("surface_force: no facets tagged '" + tag + "'");

  // grad[i][j] = du_i/dx_j
  std::array<VecField, 3> grad_v;
  for (std::size_t i = 0; i < 3; ++i) grad(space, v[i], grad_v[i]);
  const double sign = options.body_normal ? -1.0 : 1.0;
  ForceRecord rec;
  for (const auto& f : space.facets()) {
    if (f.tag != tag) continue;
    for (std::size_t q = 0; q < f.points.size(); ++q) {
      const auto l = static_cast<std::size_t>(f.points[q]);
      const double n[3] = {sign * f.normal[0][q], sign * f.normal[1][q], sign * f.normal[2][q]};
      const double a = f.area[q];
      for (std::size_t i = 0; i < 3; ++i) {
        rec.pressure[i] += -a * p[l] * n[i];
        double tn = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
          double tau = grad_v[i][j][l];
          if (options.symmetric_stress) tau += grad_v[j][i][l];
          tn += tau * n[j];
        }
        rec.viscous[i] += a * nu * tn;
      }
    }
  }
  return rec;
}

double force_normalization(double u_cl, double h, double diameter) { return 0.5 * u_cl * h * diameter; }

void set_coefficients(ForceRecord& rec, double normalization) {
  const Vec3 t = rec.total();
  rec.c_d = t[0] / normalization;
  rec.c_l = t[2] / normalization;
}

double divergence_norm(const FunctionSpace& space, const VecField& v) {
  const auto d = div(space, v);
  const auto B = space.mass();
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += B[i] * d[i] * d[i];
  return std::sqrt(s);
}

double kinetic_energy(const FunctionSpace& space, const VecField& v) {
  const auto B = space.mass();
  double s = 0.0;
  for (std::size_t i = 0; i < B.size(); ++i) s += B[i] * (v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]);
  return 0.5 * s;
}

std::vector<double> divergence_shells(const FunctionSpace& space, const VecField& v, std::span<const double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("divergence_shells needs at least two edges");
  const auto d = div(space, v);
  const auto B = space.mass();
  // One plane per facet, taken at its first point.
  struct Plane {
    double n[3];
    double c;
  };
  std::vector<Plane> planes;
  for (const auto& f : space.facets()) {
    const auto l = static_cast<std::size_t>(f.points[0]);
    Plane pl{{f.normal[0][0], f.normal[1][0], f.normal[2][0]}, 0.0};
    pl.c = pl.n[0] * space.coord(0)[l] + pl.n[1] * space.coord(1)[l] + pl.n[2] * space.coord(2)[l];
    planes.push_back(pl);
  }
  const std::size_t ns = edges.size() - 1;
  std::vector<double> sum(ns, 0.0), vol(ns, 0.0);
  for (std::size_t l = 0; l < d.size(); ++l) {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& pl : planes) {
      const double s = pl.c - (pl.n[0] * space.coord(0)[l] + pl.n[1] * space.coord(1)[l] + pl.n[2] * space.coord(2)[l]);
      dist = std::min(dist, std::abs(s));
    }
    for (std::size_t k = 0; k < ns; ++k)
      if (dist >= edges[k] && dist < edges[k + 1]) {
        sum[k] += B[l] * d[l] * d[l];
        vol[k] += B[l];
      }
  }
  std::vector<double> out(ns, 0.0);
  for (std::size_t k = 0; k < ns; ++k) out[k] = vol[k] > 0.0 ? std::sqrt(sum[k] / vol[k]) : 0.0;
  return out;
}

void RunningStats::push(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::variance() const noexcept { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double RunningStats::stddev() const noexcept { return std::sqrt(variance()); }

}  // namespace semflow
