#include "semflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semflow {

namespace {

// Reference derivatives of one element block: ur, us, ut.
void local_grad(const Matrix& D, int n, const double* u, double* ur, double* us, double* ut) {
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const double* row = u + n * (j + n * k);
      double* out = ur + n * (j + n * k);
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += D(i, m) * row[m];
        out[i] = s;
      }
    }
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += D(j, m) * u[i + n * (m + n * k)];
        us[i + n * (j + n * k)] = s;
      }
  const int n2 = n * n;
  for (int k = 0; k < n; ++k)
    for (int ij = 0; ij < n2; ++ij) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += D(k, m) * u[ij + n2 * m];
      ut[ij + n2 * k] = s;
    }
}

// w = Dr^T wr + Ds^T ws + Dt^T wt on one element block.
void local_grad_t(const Matrix& D, int n, const double* wr, const double* ws, const double* wt, double* w) {
  const int n2 = n * n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) {
          s += D(m, i) * wr[m + n * (j + n * k)];
          s += D(m, j) * ws[i + n * (m + n * k)];
          s += D(m, k) * wt[i + n * j + n2 * m];
        }
        w[i + n * (j + n * k)] = s;
      }
}

int fine_count(int order) { return (3 * (order + 1) + 1) / 2; }

}  // namespace

VecField make_vec_field(const FunctionSpace& space, double value) {
  VecField v;
  for (auto& c : v) c.assign(space.num_local(), value);
  return v;
}

void HelmholtzCoeffs::validate() const {
  if (!(lambda_visc > 0.0) || !(lambda_mass >= 0.0) || !std::isfinite(lambda_visc) || !std::isfinite(lambda_mass))
    throw std::invalid_argument("Helmholtz coefficients require lambda_visc > 0 and lambda_mass >= 0");
}

void ax_laplace(const FunctionSpace& space, std::span<const double> u, std::span<double> w) {
  space.check_size(u.size(), "ax_laplace input");
  space.check_size(w.size(), "ax_laplace output");
  const int n = space.nx1();
  const std::size_t ppe = space.points_per_element();
  const auto ne = static_cast<std::int64_t>(space.num_elements());
  const Matrix& D = space.basis().dmat();
  const double* g11 = space.g(0).data();
  const double* g12 = space.g(1).data();
  const double* g13 = space.g(2).data();
  const double* g22 = space.g(3).data();
  const double* g23 = space.g(4).data();
  const double* g33 = space.g(5).data();
#pragma omp parallel
  {
    std::vector<double> buf(6 * ppe);
    double* ur = buf.data();
    double* us = ur + ppe;
    double* ut = us + ppe;
    double* wr = ut + ppe;
    double* ws = wr + ppe;
    double* wt = ws + ppe;
#pragma omp for schedule(static)
    for (std::int64_t e = 0; e < ne; ++e) {
      const std::size_t off = static_cast<std::size_t>(e) * ppe;
      local_grad(D, n, u.data() + off, ur, us, ut);
      for (std::size_t p = 0; p < ppe; ++p) {
        const std::size_t q = off + p;
        wr[p] = g11[q] * ur[p] + g12[q] * us[p] + g13[q] * ut[p];
        ws[p] = g12[q] * ur[p] + g22[q] * us[p] + g23[q] * ut[p];
        wt[p] = g13[q] * ur[p] + g23[q] * us[p] + g33[q] * ut[p];
      }
      local_grad_t(D, n, wr, ws, wt, w.data() + off);
    }
  }
}

void ax_helmholtz(const FunctionSpace& space, const HelmholtzCoeffs& coeffs, std::span<const double> u,
                  std::span<double> w) {
  coeffs.validate();
  ax_laplace(space, u, w);
  const auto B = space.mass();
  const auto nl = static_cast<std::int64_t>(w.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nl; ++i)
    w[static_cast<std::size_t>(i)] = coeffs.lambda_visc * w[static_cast<std::size_t>(i)] +
                                     coeffs.lambda_mass * B[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
}

void grad(const FunctionSpace& space, std::span<const double> u, VecField& out) {
  space.check_size(u.size(), "grad input");
  for (auto& c : out) c.resize(space.num_local());
  const int n = space.nx1();
  const std::size_t ppe = space.points_per_element();
  const auto ne = static_cast<std::int64_t>(space.num_elements());
  const Matrix& D = space.basis().dmat();
#pragma omp parallel
  {
    std::vector<double> buf(3 * ppe);
    double* ur = buf.data();
    double* us = ur + ppe;
    double* ut = us + ppe;
#pragma omp for schedule(static)
    for (std::int64_t e = 0; e < ne; ++e) {
      const std::size_t off = static_cast<std::size_t>(e) * ppe;
      local_grad(D, n, u.data() + off, ur, us, ut);
      for (int l = 0; l < 3; ++l) {
        const double* r0 = space.drdx(0, l).data() + off;
        const double* r1 = space.drdx(1, l).data() + off;
        const double* r2 = space.drdx(2, l).data() + off;
        double* o = out[static_cast<std::size_t>(l)].data() + off;
        for (std::size_t p = 0; p < ppe; ++p) o[p] = r0[p] * ur[p] + r1[p] * us[p] + r2[p] * ut[p];
      }
    }
  }
}

VecField grad(const FunctionSpace& space, std::span<const double> u) {
  VecField out;
  grad(space, u, out);
  return out;
}

std::vector<double> div(const FunctionSpace& space, const VecField& v) {
  std::vector<double> out(space.num_local(), 0.0);
  VecField g;
  for (int l = 0; l < 3; ++l) {
    grad(space, v[static_cast<std::size_t>(l)], g);
    const auto& gl = g[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gl[i];
  }
  return out;
}

VecField curl(const FunctionSpace& space, const VecField& v) {
  VecField out = make_vec_field(space);
  VecField g;
  // curl_x = dvz/dy - dvy/dz, curl_y = dvx/dz - dvz/dx, curl_z = dvy/dx - dvx/dy
  grad(space, v[0], g);
  for (std::size_t i = 0; i < out[0].size(); ++i) {
    out[1][i] += g[2][i];
    out[2][i] -= g[1][i];
  }
  grad(space, v[1], g);
  for (std::size_t i = 0; i < out[0].size(); ++i) {
    out[2][i] += g[0][i];
    out[0][i] -= g[2][i];
  }
  grad(space, v[2], g);
  for (std::size_t i = 0; i < out[0].size(); ++i) {
    out[0][i] += g[1][i];
    out[1][i] -= g[0][i];
  }
  return out;
}

void weak_div(const FunctionSpace& space, const VecField& f, std::span<double> out) {
  for (const auto& c : f) space.check_size(c.size(), "weak_div input");
  space.check_size(out.size(), "weak_div output");
  const int n = space.nx1();
  const std::size_t ppe = space.points_per_element();
  const auto ne = static_cast<std::int64_t>(space.num_elements());
  const Matrix& D = space.basis().dmat();
  const auto B = space.mass();
#pragma omp parallel
  {
    std::vector<double> buf(3 * ppe);
    double* wr = buf.data();
    double* ws = wr + ppe;
    double* wt = ws + ppe;
#pragma omp for schedule(static)
    for (std::int64_t e = 0; e < ne; ++e) {
      const std::size_t off = static_cast<std::size_t>(e) * ppe;
      for (std::size_t p = 0; p < ppe; ++p) {
        const std::size_t q = off + p;
        double a[3] = {0.0, 0.0, 0.0};
        for (int s = 0; s < 3; ++s)
          for (int l = 0; l < 3; ++l) a[s] += space.drdx(s, l)[q] * f[static_cast<std::size_t>(l)][q];
        wr[p] = B[q] * a[0];
        ws[p] = B[q] * a[1];
        wt[p] = B[q] * a[2];
      }
      local_grad_t(D, n, wr, ws, wt, out.data() + off);
    }
  }
}

std::vector<double> laplace_diagonal(const FunctionSpace& space) {
  const int n = space.nx1();
  const std::size_t ppe = space.points_per_element();
  const std::size_t ne = space.num_elements();
  const Matrix& D = space.basis().dmat();
  std::vector<double> diag(space.num_local(), 0.0);
  const auto g11 = space.g(0), g12 = space.g(1), g13 = space.g(2);
  const auto g22 = space.g(3), g23 = space.g(4), g33 = space.g(5);
  const int n2 = n * n;
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t off = e * ppe;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          // Diagonal terms of D^T G D with G diagonal blocks.
          for (int m = 0; m < n; ++m) {
            s += g11[off + m + n * j + n2 * k] * D(m, i) * D(m, i);
            s += g22[off + i + n * m + n2 * k] * D(m, j) * D(m, j);
            s += g33[off + i + n * j + n2 * m] * D(m, k) * D(m, k);
          }
          // Cross terms touch only the point itself.
          const std::size_t q = off + static_cast<std::size_t>(i + n * j + n2 * k);
          s += 2.0 * D(i, i) * D(j, j) * g12[q];
          s += 2.0 * D(i, i) * D(k, k) * g13[q];
          s += 2.0 * D(j, j) * D(k, k) * g23[q];
          diag[q] = s;
        }
  }
  return diag;
}

Dealias::Dealias(const FunctionSpace& space) : m_(fine_count(space.order())) {
  const GaussRule rule = gauss_legendre(m_);
  interp_ = interp_matrix(space.basis(), rule.points);
  interp_t_ = Matrix(interp_.cols, interp_.rows);
  for (int a = 0; a < interp_.rows; ++a)
    for (int b = 0; b < interp_.cols; ++b) interp_t_(b, a) = interp_(a, b);
  const std::size_t nf = static_cast<std::size_t>(m_) * m_ * m_;
  const std::size_t ne = space.num_elements();
  const std::size_t ppe = space.points_per_element();
  fine_w_.assign(nf * ne, 0.0);
  std::vector<double> scratch;
  std::array<std::vector<double>, 9> jf;
  for (auto& c : jf) c.resize(nf);
  for (std::size_t e = 0; e < ne; ++e) {
    for (int l = 0; l < 3; ++l)
      for (int s = 0; s < 3; ++s) {
        std::span<const double> src = space.dxdr(l, s).subspan(e * ppe, ppe);
        tensor_apply(interp_, interp_, interp_, src, jf[static_cast<std::size_t>(3 * l + s)], scratch);
      }
    for (int c = 0; c < m_; ++c)
      for (int b = 0; b < m_; ++b)
        for (int a = 0; a < m_; ++a) {
          const std::size_t q = static_cast<std::size_t>(a + m_ * (b + m_ * c));
          auto J = [&](int l, int s) { return jf[static_cast<std::size_t>(3 * l + s)][q]; };
          const double det = J(0, 0) * (J(1, 1) * J(2, 2) - J(1, 2) * J(2, 1)) -
                             J(0, 1) * (J(1, 0) * J(2, 2) - J(1, 2) * J(2, 0)) +
                             J(0, 2) * (J(1, 0) * J(2, 1) - J(1, 1) * J(2, 0));
          fine_w_[e * nf + q] = rule.weights[static_cast<std::size_t>(a)] * rule.weights[static_cast<std::size_t>(b)] *
                                rule.weights[static_cast<std::size_t>(c)] * det;
        }
  }
}

void advect(const FunctionSpace& space, const VecField& v, std::span<const double> u, std::span<double> w,
            const Dealias* dealias) {
  for (const auto& c : v) space.check_size(c.size(), "advect velocity");
  space.check_size(u.size(), "advect input");
  space.check_size(w.size(), "advect output");
  VecField g;
  grad(space, u, g);
  const std::size_t nl = space.num_local();
  if (dealias == nullptr) {
    for (std::size_t i = 0; i < nl; ++i) w[i] = v[0][i] * g[0][i] + v[1][i] * g[1][i] + v[2][i] * g[2][i];
    return;
  }
  const std::size_t ppe = space.points_per_element();
  const int m = dealias->num_fine();
  const std::size_t nf = static_cast<std::size_t>(m) * m * m;
  const auto ne = static_cast<std::int64_t>(space.num_elements());
  const auto fw = dealias->fine_weight();
  const auto B = space.mass();
  const Matrix& J = dealias->interp();
  const Matrix& Jt = dealias->interp_t();
#pragma omp parallel
  {
    std::vector<double> scratch, vf(nf), gf(nf), prod(nf), back(ppe);
#pragma omp for schedule(static)
    for (std::int64_t e = 0; e < ne; ++e) {
      const std::size_t off = static_cast<std::size_t>(e) * ppe;
      std::fill(prod.begin(), prod.end(), 0.0);
      for (std::size_t l = 0; l < 3; ++l) {
        tensor_apply(J, J, J, std::span<const double>(v[l]).subspan(off, ppe), vf, scratch);
        tensor_apply(J, J, J, std::span<const double>(g[l]).subspan(off, ppe), gf, scratch);
        for (std::size_t q = 0; q < nf; ++q) prod[q] += vf[q] * gf[q];
      }
      const double* wq = fw.data() + static_cast<std::size_t>(e) * nf;
      for (std::size_t q = 0; q < nf; ++q) prod[q] *= wq[q];
      tensor_apply(Jt, Jt, Jt, prod, back, scratch);
      for (std::size_t p = 0; p < ppe; ++p) w[off + p] = back[p] / B[off + p];
    }
  }
}

double cfl(const FunctionSpace& space, const VecField& v, double dt) {
  for (const auto& c : v) space.check_size(c.size(), "cfl velocity");
  const int n = space.nx1();
  const auto xi = space.basis().points();
  std::vector<double> inv_dxi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int a = (i == n - 1) ? n - 2 : i;
    inv_dxi[static_cast<std::size_t>(i)] = 1.0 / (xi[static_cast<std::size_t>(a + 1)] - xi[static_cast<std::size_t>(a)]);
  }
  const auto nl = static_cast<std::int64_t>(space.num_local());
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::int64_t ii = 0; ii < nl; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto ijk = local_ijk(space, i);
    double c = 0.0;
    for (int s = 0; s < 3; ++s) {
      double a = 0.0;
      for (int l = 0; l < 3; ++l) a += space.drdx(s, l)[i] * v[static_cast<std::size_t>(l)][i];
      c += std::abs(a) * inv_dxi[static_cast<std::size_t>(ijk[static_cast<std::size_t>(s)])];
    }
    best = std::max(best, c);
  }
  return dt * best;
}

}  // namespace semflow
