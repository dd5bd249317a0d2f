#include "semflow/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "semflow/error.hpp"

namespace semflow {

void tensor_apply(const Matrix& ar, const Matrix& as, const Matrix& at, std::span<const double> in,
                  std::span<double> out, std::vector<double>& scratch) {
  const int nr = ar.cols, ns = as.cols, nt = at.cols;
  const int mr = ar.rows, ms = as.rows, mt = at.rows;
  const std::size_t s1 = static_cast<std::size_t>(mr) * ns * nt;
  const std::size_t s2 = static_cast<std::size_t>(mr) * ms * nt;
  if (scratch.size() < s1 + s2) scratch.resize(s1 + s2);
  double* t1 = scratch.data();
  double* t2 = scratch.data() + s1;
  for (int jk = 0; jk < ns * nt; ++jk) {
    const double* src = in.data() + static_cast<std::size_t>(jk) * nr;
    double* dst = t1 + static_cast<std::size_t>(jk) * mr;
    for (int a = 0; a < mr; ++a) {
      double s = 0.0;
      for (int i = 0; i < nr; ++i) s += ar(a, i) * src[i];
      dst[a] = s;
    }
  }
  for (int k = 0; k < nt; ++k)
    for (int b = 0; b < ms; ++b) {
      double* dst = t2 + (static_cast<std::size_t>(k) * ms + b) * mr;
      std::fill(dst, dst + mr, 0.0);
      for (int j = 0; j < ns; ++j) {
        const double c = as(b, j);
        const double* src = t1 + (static_cast<std::size_t>(k) * ns + j) * mr;
        for (int a = 0; a < mr; ++a) dst[a] += c * src[a];
      }
    }
  const std::size_t plane = static_cast<std::size_t>(mr) * ms;
  for (int c = 0; c < mt; ++c) {
    double* dst = out.data() + static_cast<std::size_t>(c) * plane;
    std::fill(dst, dst + plane, 0.0);
    for (int k = 0; k < nt; ++k) {
      const double w = at(c, k);
      const double* src = t2 + static_cast<std::size_t>(k) * plane;
      for (std::size_t q = 0; q < plane; ++q) dst[q] += w * src[q];
    }
  }
}

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, int order)
    : mesh_(std::move(mesh)), basis_(order) {
  if (!mesh_) throw std::invalid_argument("FunctionSpace: null mesh");
  const int n = nx1();
  ppe_ = static_cast<std::size_t>(n) * n * n;
  const std::size_t nl = num_local();
  for (auto& c : coords_) c.assign(nl, 0.0);
  jac_.assign(nl, 0.0);
  mass_.assign(nl, 0.0);
  for (auto& c : g_) c.assign(nl, 0.0);
  for (auto& c : drdx_) c.assign(nl, 0.0);
  for (auto& c : dxdr_) c.assign(nl, 0.0);

  const auto xi = basis_.points();
  const auto w = basis_.weights();
  const Matrix& D = basis_.dmat();
  const Matrix ident = [&] {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }();
  // Trilinear map from the two-point (N=1) GLL grid.
  const Matrix lin = [&] {
    const Basis1D b1(1);
    return interp_matrix(b1, xi);
  }();

  const std::size_t ne = num_elements();
  std::vector<std::string> failures(ne);

#pragma omp parallel
  {
    std::vector<double> scratch;
    std::array<std::vector<double>, 3> xe;
    for (auto& v : xe) v.resize(ppe_);
    std::vector<double> tmp(ppe_);
#pragma omp for schedule(static)
    for (long el = 0; el < static_cast<long>(ne); ++el) {
      const auto e = static_cast<std::size_t>(el);
      const auto cit = mesh_->curved.find(static_cast<std::int64_t>(e));
      if (cit != mesh_->curved.end()) {
        const CurvedElement& rec = cit->second;
        const Basis1D geo(rec.order);
        const Matrix J = interp_matrix(geo, xi);
        const std::size_t ng = rec.nodes.size();
        std::vector<double> src(ng);
        for (int l = 0; l < 3; ++l) {
          for (std::size_t q = 0; q < ng; ++q) src[q] = rec.nodes[q][static_cast<std::size_t>(l)];
          tensor_apply(J, J, J, src, xe[static_cast<std::size_t>(l)], scratch);
        }
      } else {
        std::vector<double> src(8);
        for (int l = 0; l < 3; ++l) {
          for (int c = 0; c < 8; ++c)
            src[static_cast<std::size_t>(c)] =
                mesh_->vertices[static_cast<std::size_t>(mesh_->elements[e][static_cast<std::size_t>(c)])]
                               [static_cast<std::size_t>(l)];
          tensor_apply(lin, lin, lin, src, xe[static_cast<std::size_t>(l)], scratch);
        }
      }
      const std::size_t off = e * ppe_;
      for (int l = 0; l < 3; ++l) std::copy(xe[l].begin(), xe[l].end(), coords_[l].begin() + off);
      // dx_l/dr_s by differentiating along each tensor direction.
      for (int l = 0; l < 3; ++l) {
        tensor_apply(D, ident, ident, xe[l], tmp, scratch);
        std::copy(tmp.begin(), tmp.end(), dxdr_[3 * l + 0].begin() + off);
        tensor_apply(ident, D, ident, xe[l], tmp, scratch);
        std::copy(tmp.begin(), tmp.end(), dxdr_[3 * l + 1].begin() + off);
        tensor_apply(ident, ident, D, xe[l], tmp, scratch);
        std::copy(tmp.begin(), tmp.end(), dxdr_[3 * l + 2].begin() + off);
      }
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const std::size_t p = index(e, i, j, k);
            double a[3][3];  // a[l][s] = dx_l/dr_s
            for (int l = 0; l < 3; ++l)
              for (int s = 0; s < 3; ++s) a[l][s] = dxdr_[3 * l + s][p];
            const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
            if (!(det > 0.0)) {
              if (failures[e].empty()) {
                std::ostringstream os;
                os << "nonpositive Jacobian " << det << " in element " << e << " at reference point ("
                   << xi[i] << ", " << xi[j] << ", " << xi[k] << ")";
                failures[e] = os.str();
              }
              continue;
            }
            // Inverse: dr_s/dx_l = cofactor(l, s) / det.
            double inv[3][3];
            inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
            inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
            inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
            inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
            inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
            inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
            inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
            inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
            inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
            for (int s = 0; s < 3; ++s)
              for (int l = 0; l < 3; ++l) drdx_[3 * s + l][p] = inv[s][l];
            const double wj = w[i] * w[j] * w[k] * det;
            jac_[p] = det;
            mass_[p] = wj;
            int comp = 0;
            for (int s = 0; s < 3; ++s)
              for (int t = s; t < 3; ++t) {
                double sum = 0.0;
                for (int l = 0; l < 3; ++l) sum += inv[s][l] * inv[t][l];
                g_[comp++][p] = wj * sum;
              }
          }
    }
  }
  for (std::size_t e = 0; e < ne; ++e)
    if (!failures[e].empty()) throw GeometryError(failures[e], static_cast<long>(e));

  // Boundary facets.
  facets_.reserve(mesh_->boundary_facets.size());
  for (const auto& bf : mesh_->boundary_facets) {
    FacetGeometry fg;
    fg.element = bf.element;
    fg.face = bf.face;
    fg.tag = bf.tag;
    fg.points = face_points(*this, static_cast<std::size_t>(bf.element), bf.face);
    const std::size_t np = fg.points.size();
    for (auto& c : fg.normal) c.resize(np);
    fg.area.resize(np);
    const int dir = bf.face / 2;
    const double sign = (bf.face % 2 == 1) ? 1.0 : -1.0;
    // In-face directions (a fast, b slow).
    const int da = dir == 0 ? 1 : 0;
    const int db = dir == 2 ? 1 : 2;
    for (std::size_t q = 0; q < np; ++q) {
      const auto p = static_cast<std::size_t>(fg.points[q]);
      Vec3 t1, t2;
      for (int l = 0; l < 3; ++l) {
        t1[l] = dxdr_[3 * l + da][p];
        t2[l] = dxdr_[3 * l + db][p];
      }
      // Cross product oriented along +dir for a right-handed element.
      Vec3 c = dir == 1 ? cross(t2, t1) : cross(t1, t2);
      const double len = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
      const auto ijk = local_ijk(*this, p);
      const double wa = w[ijk[da]];
      const double wb = w[ijk[db]];
      for (int l = 0; l < 3; ++l) fg.normal[l][q] = sign * c[l] / len;
      fg.area[q] = len * wa * wb;
    }
    facets_.push_back(std::move(fg));
  }
}

double FunctionSpace::element_diameter(std::size_t e) const {
  const auto& el = mesh_->elements.at(e);
  double d = 0.0;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b) {
      const Vec3& p = mesh_->vertices[static_cast<std::size_t>(el[a])];
      const Vec3& q = mesh_->vertices[static_cast<std::size_t>(el[b])];
      d = std::max(d, std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]));
    }
  return d;
}

double FunctionSpace::min_element_diameter() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < num_elements(); ++e) d = std::min(d, element_diameter(e));
  return d;
}

double FunctionSpace::volume() const {
  double v = 0.0;
  for (double m : mass_) v += m;
  return v;
}

void FunctionSpace::check_size(std::size_t n, const char* what) const {
  if (n != num_local()) {
    throw std::invalid_argument(std::string(what) + ": field size " + std::to_string(n) +
                                " does not match function space (" + std::to_string(num_local()) +
                                " local points)");
  }
}

std::vector<std::int64_t> face_points(const FunctionSpace& space, std::size_t e, int face) {
  const int n = space.nx1();
  const int dir = face / 2;
  const int fixed = (face % 2 == 1) ? n - 1 : 0;
  std::vector<std::int64_t> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      int ijk[3];
      ijk[dir] = fixed;
      ijk[dir == 0 ? 1 : 0] = a;
      ijk[dir == 2 ? 1 : 2] = b;
      pts.push_back(static_cast<std::int64_t>(space.index(e, ijk[0], ijk[1], ijk[2])));
    }
  return pts;
}

std::array<int, 3> local_ijk(const FunctionSpace& space, std::size_t local_index) {
  const auto n = static_cast<std::size_t>(space.nx1());
  const std::size_t q = local_index % space.points_per_element();
  return {static_cast<int>(q % n), static_cast<int>((q / n) % n), static_cast<int>(q / (n * n))};
}

}  // namespace semflow
