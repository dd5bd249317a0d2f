#include "semflow/precond.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "semflow/error.hpp"

namespace semflow {

std::vector<double> helmholtz_diagonal(const FunctionSpace& space, const GatherScatter& gs,
                                       const HelmholtzCoeffs& coeffs) {
  coeffs.validate();
  std::vector<double> d = laplace_diagonal(space);
  const auto B = space.mass();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeffs.lambda_visc * d[i] + coeffs.lambda_mass * B[i];
  gs.add(d);
  return d;
}

BlockJacobi::BlockJacobi(const FunctionSpace& space, std::span<const double> assembled_diag,
                         std::span<const double> mask) {
  space.check_size(assembled_diag.size(), "block-Jacobi diagonal");
  inv_diag_.assign(assembled_diag.size(), 0.0);
  for (std::size_t i = 0; i < assembled_diag.size(); ++i) {
    if (!mask.empty() && mask[i] == 0.0) continue;
    const double d = assembled_diag[i];
    if (!(d > 0.0)) {
      std::ostringstream os;
      os << "nonpositive operator diagonal " << d << " at (" << space.coord(0)[i] << ", " << space.coord(1)[i]
         << ", " << space.coord(2)[i] << ")";
      throw NumericalError(os.str());
    }
    inv_diag_[i] = 1.0 / d;
  }
}

void BlockJacobi::apply(std::span<const double> r, std::span<double> z) const {
  const auto n = static_cast<std::int64_t>(r.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] * inv_diag_[static_cast<std::size_t>(i)];
}

namespace {

enum class Side { Ghost, Neumann, Dirichlet };

struct Eig1D {
  Matrix s, st;
  std::vector<double> lambda;
};

// Generalized eigenpairs of the 1D stiffness/mass pair on the extended
// interval [lo, hi] of a three-element assembly (left, self, right).
Eig1D eig_1d(const Basis1D& basis, double length, Side lo_side, Side hi_side) {
  const int N = basis.order();
  const int np = N + 1;
  const Matrix& D = basis.dmat();
  const auto w = basis.weights();
  Matrix kref(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) {
      double s = 0.0;
      for (int q = 0; q < np; ++q) s += w[static_cast<std::size_t>(q)] * D(q, i) * D(q, j);
      kref(i, j) = s;
    }
  const int total = 3 * N + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd M = Eigen::VectorXd::Zero(total);
  const double kscale = 2.0 / length, mscale = 0.5 * length;
  for (int el = 0; el < 3; ++el) {
    if (el == 0 && lo_side != Side::Ghost) continue;
    if (el == 2 && hi_side != Side::Ghost) continue;
    const int off = el * N;
    for (int i = 0; i < np; ++i) {
      M(off + i) += mscale * w[static_cast<std::size_t>(i)];
      for (int j = 0; j < np; ++j) K(off + i, off + j) += kscale * kref(i, j);
    }
  }
  const int lo = lo_side == Side::Ghost ? N - 1 : (lo_side == Side::Neumann ? N : N + 1);
  const int hi = hi_side == Side::Ghost ? 2 * N + 1 : (hi_side == Side::Neumann ? 2 * N : 2 * N - 1);
  const int n = std::max(0, hi - lo + 1);
  Eig1D out;
  out.s = Matrix(n, n);
  out.st = Matrix(n, n);
  out.lambda.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return out;
  Eigen::VectorXd mis = M.segment(lo, n).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd C = mis.asDiagonal() * K.block(lo, lo, n, n) * mis.asDiagonal();
  C = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw ConvergenceError("1D eigenproblem failed in Schwarz setup");
  const Eigen::MatrixXd S = mis.asDiagonal() * es.eigenvectors();
  for (int i = 0; i < n; ++i) {
    out.lambda[static_cast<std::size_t>(i)] = std::max(0.0, es.eigenvalues()(i));
    for (int j = 0; j < n; ++j) {
      out.s(i, j) = S(i, j);
      out.st(j, i) = S(i, j);
    }
  }
  return out;
}

int box_lo(Side s) { return s == Side::Ghost ? -1 : (s == Side::Neumann ? 0 : 1); }

}  // namespace

HybridSchwarz::HybridSchwarz(const FunctionSpace& space, const GatherScatter& gs, std::span<const double> mask,
                             SchwarzOptions options)
    : space_(&space), gs_(&gs), options_(options) {
  const int N = space.order();
  const int n = space.nx1();
  const std::size_t ppe = space.points_per_element();
  const std::size_t ne = space.num_elements();
  const auto gid = gs.global_ids();
  const std::size_t ng = gs.num_global();
  if (options_.coarse_iterations < 0) throw std::invalid_argument("coarse iteration count must be >= 0");

  mask_.assign(space.num_local(), 1.0);
  if (!mask.empty()) {
    space.check_size(mask.size(), "Schwarz mask");
    std::copy(mask.begin(), mask.end(), mask_.begin());
  }
  global_mask_ = gs.to_global(mask_);

  auto lid = [&](std::size_t e, int i, int j, int k) { return space.index(e, i, j, k); };
  std::vector<std::array<std::int64_t, 8>> cg(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (int c = 0; c < 8; ++c)
      cg[e][static_cast<std::size_t>(c)] =
          gid[lid(e, (c & 1) * N, ((c >> 1) & 1) * N, ((c >> 2) & 1) * N)];
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> v2e;
  for (std::size_t e = 0; e < ne; ++e)
    for (auto v : cg[e]) v2e[v].push_back(static_cast<std::int64_t>(e));

  auto count_common = [&](std::size_t a, std::size_t b) {
    int c = 0;
    for (auto va : cg[a])
      for (auto vb : cg[b])
        if (va == vb) ++c;
    return c;
  };
  // Unique element other than e whose shared vertex set with e is exactly F.
  auto find_feature_elem = [&](std::size_t e, const std::vector<std::int64_t>& F) -> std::int64_t {
    std::int64_t found = -1;
    for (auto cand : v2e[F[0]]) {
      if (static_cast<std::size_t>(cand) == e) continue;
      const auto& cv = cg[static_cast<std::size_t>(cand)];
      bool all = true;
      for (auto f : F)
        if (std::find(cv.begin(), cv.end(), f) == cv.end()) all = false;
      if (!all || count_common(e, static_cast<std::size_t>(cand)) != static_cast<int>(F.size())) continue;
      if (found >= 0) return -1;
      found = cand;
    }
    return found;
  };

  // Local solves.
  boxes_.resize(ne);
  std::vector<double> overlap(ng, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    std::array<Side, 6> side{};
    for (int f = 0; f < 6; ++f) {
      std::vector<std::int64_t> F;
      for (int c : face_corners(f)) F.push_back(cg[e][static_cast<std::size_t>(c)]);
      if (find_feature_elem(e, F) >= 0) {
        side[static_cast<std::size_t>(f)] = Side::Ghost;
      } else {
        bool all_masked = true;
        for (auto p : face_points(space, e, f))
          if (mask_[static_cast<std::size_t>(p)] != 0.0) all_masked = false;
        side[static_cast<std::size_t>(f)] = all_masked ? Side::Dirichlet : Side::Neumann;
      }
    }
    // Mean edge lengths per reference direction.
    std::array<double, 3> len{};
    for (int d = 0; d < 3; ++d) {
      double sum = 0.0;
      for (int c = 0; c < 8; ++c) {
        if ((c >> d) & 1) continue;
        const int c2 = c | (1 << d);
        const auto p = lid(e, (c & 1) * N, ((c >> 1) & 1) * N, ((c >> 2) & 1) * N);
        const auto q = lid(e, (c2 & 1) * N, ((c2 >> 1) & 1) * N, ((c2 >> 2) & 1) * N);
        double d2 = 0.0;
        for (int l = 0; l < 3; ++l) {
          const double dx = space.coord(l)[q] - space.coord(l)[p];
          d2 += dx * dx;
        }
        sum += std::sqrt(d2);
      }
      len[static_cast<std::size_t>(d)] = sum / 4.0;
    }
    Box& box = boxes_[e];
    std::array<Eig1D, 3> eig;
    std::array<int, 3> lo{};
    bool all_neumann = true;
    for (int d = 0; d < 3; ++d) {
      const Side sl = side[static_cast<std::size_t>(2 * d)], sh = side[static_cast<std::size_t>(2 * d + 1)];
      if (sl != Side::Neumann || sh != Side::Neumann) all_neumann = false;
      eig[static_cast<std::size_t>(d)] = eig_1d(space.basis(), len[static_cast<std::size_t>(d)], sl, sh);
      box.n[static_cast<std::size_t>(d)] = eig[static_cast<std::size_t>(d)].s.rows;
      lo[static_cast<std::size_t>(d)] = box_lo(sl);
      box.s[static_cast<std::size_t>(d)] = eig[static_cast<std::size_t>(d)].s;
      box.st[static_cast<std::size_t>(d)] = eig[static_cast<std::size_t>(d)].st;
    }
    const int nr = box.n[0], ns = box.n[1], nt = box.n[2];
    const std::size_t nb = static_cast<std::size_t>(nr) * ns * nt;
    box.inv_lambda.resize(nb);
    box.gids.assign(nb, -1);
    const double shift = all_neumann ? 1e-8 : 0.0;
    for (int c = 0; c < nt; ++c)
      for (int b = 0; b < ns; ++b)
        for (int a = 0; a < nr; ++a) {
          const std::size_t q = static_cast<std::size_t>(a + nr * (b + ns * c));
          const double lam = eig[0].lambda[static_cast<std::size_t>(a)] + eig[1].lambda[static_cast<std::size_t>(b)] +
                             eig[2].lambda[static_cast<std::size_t>(c)] + shift;
          box.inv_lambda[q] = lam > 0.0 ? 1.0 / lam : 0.0;
          const std::array<int, 3> idx{lo[0] + a, lo[1] + b, lo[2] + c};
          std::array<int, 3> clamped = idx;
          std::vector<int> gdirs;
          for (int d = 0; d < 3; ++d) {
            if (idx[static_cast<std::size_t>(d)] < 0 || idx[static_cast<std::size_t>(d)] > N) {
              gdirs.push_back(d);
              clamped[static_cast<std::size_t>(d)] = idx[static_cast<std::size_t>(d)] < 0 ? 0 : N;
            }
          }
          const std::int64_t g0 = gid[lid(e, clamped[0], clamped[1], clamped[2])];
          if (gdirs.empty()) {
            box.gids[q] = g0;
            continue;
          }
          std::vector<std::int64_t> F;
          for (int cc = 0; cc < 8; ++cc) {
            bool on = true;
            for (int d : gdirs) {
              const int want = idx[static_cast<std::size_t>(d)] < 0 ? 0 : 1;
              if (((cc >> d) & 1) != want) on = false;
            }
            if (on) F.push_back(cg[e][static_cast<std::size_t>(cc)]);
          }
          const std::int64_t en = find_feature_elem(e, F);
          if (en < 0) continue;
          const auto ue = static_cast<std::size_t>(en);
          // Feature orientation inside the neighbor.
          std::array<int, 3> fixed{-1, -1, -1};
          for (int d = 0; d < 3; ++d) {
            int bit = -1;
            bool same = true;
            for (int cc = 0; cc < 8; ++cc) {
              if (std::find(F.begin(), F.end(), cg[ue][static_cast<std::size_t>(cc)]) == F.end()) continue;
              const int bb = (cc >> d) & 1;
              if (bit < 0) bit = bb;
              else if (bit != bb) same = false;
            }
            if (same && bit >= 0) fixed[static_cast<std::size_t>(d)] = bit;
          }
          std::int64_t hit = -1;
          for (std::size_t p = 0; p < ppe; ++p)
            if (gid[ue * ppe + p] == g0) {
              hit = static_cast<std::int64_t>(p);
              break;
            }
          if (hit < 0) continue;
          std::array<int, 3> ijk{static_cast<int>(hit % n), static_cast<int>((hit / n) % n),
                                 static_cast<int>(hit / (n * n))};
          for (int d = 0; d < 3; ++d)
            if (fixed[static_cast<std::size_t>(d)] >= 0)
              ijk[static_cast<std::size_t>(d)] = fixed[static_cast<std::size_t>(d)] == 0 ? std::min(1, N) : std::max(N - 1, 0);
          box.gids[q] = gid[lid(ue, ijk[0], ijk[1], ijk[2])];
        }
    for (auto g : box.gids)
      if (g >= 0) overlap[static_cast<std::size_t>(g)] += 1.0;
  }
  sqrt_w_.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) sqrt_w_[g] = overlap[g] > 0.0 ? std::sqrt(1.0 / overlap[g]) : 1.0;

  // Coarse space on element vertices.
  {
    std::vector<std::int64_t> verts;
    for (const auto& c : cg) verts.insert(verts.end(), c.begin(), c.end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    coarse_gid_ = verts;
    std::unordered_map<std::int64_t, std::int64_t> cidx;
    for (std::size_t i = 0; i < verts.size(); ++i) cidx[verts[i]] = static_cast<std::int64_t>(i);
    elem_coarse_.resize(ne * 8);
    for (std::size_t e = 0; e < ne; ++e)
      for (int c = 0; c < 8; ++c) elem_coarse_[e * 8 + static_cast<std::size_t>(c)] = cidx[cg[e][static_cast<std::size_t>(c)]];

    const auto xi = space.basis().points();
    phi_.resize(ppe * 8);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const std::size_t p = static_cast<std::size_t>(i + n * (j + n * k));
          const double r[3] = {xi[static_cast<std::size_t>(i)], xi[static_cast<std::size_t>(j)], xi[static_cast<std::size_t>(k)]};
          for (int c = 0; c < 8; ++c) {
            double v = 1.0;
            for (int d = 0; d < 3; ++d) v *= ((c >> d) & 1) ? 0.5 * (1.0 + r[d]) : 0.5 * (1.0 - r[d]);
            phi_[p * 8 + static_cast<std::size_t>(c)] = v;
          }
        }
    // Element Galerkin blocks J^T A^e J.
    std::vector<double> ae(ne * 64, 0.0);
    std::vector<double> u(space.num_local()), au(space.num_local());
    for (int c2 = 0; c2 < 8; ++c2) {
      for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t p = 0; p < ppe; ++p) u[e * ppe + p] = phi_[p * 8 + static_cast<std::size_t>(c2)];
      ax_laplace(space, u, au);
      for (std::size_t e = 0; e < ne; ++e)
        for (int c1 = 0; c1 < 8; ++c1) {
          double s = 0.0;
          for (std::size_t p = 0; p < ppe; ++p) s += phi_[p * 8 + static_cast<std::size_t>(c1)] * au[e * ppe + p];
          ae[e * 64 + static_cast<std::size_t>(c1 * 8 + c2)] = s;
        }
    }
    const std::size_t nc = verts.size();
    std::vector<std::map<std::int64_t, double>> rows(nc);
    for (std::size_t e = 0; e < ne; ++e)
      for (int c1 = 0; c1 < 8; ++c1)
        for (int c2 = 0; c2 < 8; ++c2)
          rows[static_cast<std::size_t>(elem_coarse_[e * 8 + static_cast<std::size_t>(c1)])]
              [elem_coarse_[e * 8 + static_cast<std::size_t>(c2)]] += ae[e * 64 + static_cast<std::size_t>(c1 * 8 + c2)];
    crow_.assign(nc + 1, 0);
    cdiag_inv_.assign(nc, 0.0);
    cmask_.assign(nc, 1.0);
    for (std::size_t i = 0; i < nc; ++i) cmask_[i] = global_mask_[static_cast<std::size_t>(verts[i])];
    for (std::size_t i = 0; i < nc; ++i) {
      for (const auto& [j, v] : rows[i]) {
        ccol_.push_back(j);
        cval_.push_back(v);
        if (static_cast<std::size_t>(j) == i && cmask_[i] != 0.0 && v > 0.0) cdiag_inv_[i] = 1.0 / v;
      }
      crow_[i + 1] = static_cast<std::int64_t>(ccol_.size());
    }
  }
}

std::size_t HybridSchwarz::num_coarse_free() const noexcept {
  std::size_t c = 0;
  for (double m : cmask_)
    if (m != 0.0) ++c;
  return c;
}

std::vector<double> HybridSchwarz::coarse_matrix_dense() const {
  const std::size_t nc = coarse_gid_.size();
  std::vector<double> a(nc * nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i)
    for (auto k = crow_[i]; k < crow_[i + 1]; ++k)
      a[i * nc + static_cast<std::size_t>(ccol_[static_cast<std::size_t>(k)])] = cval_[static_cast<std::size_t>(k)];
  return a;
}

void HybridSchwarz::coarse_matvec(std::span<const double> x, std::span<double> y) const {
  const std::size_t nc = coarse_gid_.size();
  for (std::size_t i = 0; i < nc; ++i) {
    if (cmask_[i] == 0.0) {
      y[i] = 0.0;
      continue;
    }
    double s = 0.0;
    for (auto k = crow_[i]; k < crow_[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(ccol_[static_cast<std::size_t>(k)]);
      s += cval_[static_cast<std::size_t>(k)] * cmask_[j] * x[j];
    }
    y[i] = s;
  }
}

void HybridSchwarz::coarse_solve(std::span<const double> b, std::span<double> x) const {
  const std::size_t nc = b.size();
  std::vector<double> r(nc), z(nc), p(nc, 0.0), ap(nc);
  for (std::size_t i = 0; i < nc; ++i) r[i] = b[i] * cmask_[i];
  std::fill(x.begin(), x.end(), 0.0);
  double rz_old = 0.0;
  for (int it = 0; it < options_.coarse_iterations; ++it) {
    double rz = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      z[i] = cdiag_inv_[i] * r[i];
      rz += r[i] * z[i];
    }
    if (rz == 0.0) break;
    const double beta = it == 0 ? 0.0 : rz / rz_old;
    for (std::size_t i = 0; i < nc; ++i) p[i] = z[i] + beta * p[i];
    rz_old = rz;
    coarse_matvec(p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < nc; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < nc; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
  }
}

void HybridSchwarz::apply_local(std::span<const double> r, std::span<double> z) const {
  const std::size_t ng = gs_->num_global();
  const auto first = gs_->first_local();
  std::vector<double> rg(ng);
  for (std::size_t g = 0; g < ng; ++g)
    rg[g] = r[static_cast<std::size_t>(first[g])] * global_mask_[g] * sqrt_w_[g];
  const auto ne = static_cast<std::int64_t>(boxes_.size());
  std::vector<std::vector<double>> outs(boxes_.size());
#pragma omp parallel
  {
    std::vector<double> ub, tmp, scratch;
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t e = 0; e < ne; ++e) {
      const Box& box = boxes_[static_cast<std::size_t>(e)];
      const std::size_t nb = box.gids.size();
      if (nb == 0) continue;
      ub.resize(nb);
      tmp.resize(nb);
      for (std::size_t q = 0; q < nb; ++q) ub[q] = box.gids[q] >= 0 ? rg[static_cast<std::size_t>(box.gids[q])] : 0.0;
      tensor_apply(box.st[0], box.st[1], box.st[2], ub, tmp, scratch);
      for (std::size_t q = 0; q < nb; ++q) tmp[q] *= box.inv_lambda[q];
      auto& out = outs[static_cast<std::size_t>(e)];
      out.resize(nb);
      tensor_apply(box.s[0], box.s[1], box.s[2], tmp, out, scratch);
    }
  }
  std::vector<double> zg(ng, 0.0);
  for (std::size_t e = 0; e < boxes_.size(); ++e) {
    const Box& box = boxes_[e];
    for (std::size_t q = 0; q < box.gids.size(); ++q)
      if (box.gids[q] >= 0) zg[static_cast<std::size_t>(box.gids[q])] += outs[e][q];
  }
  for (std::size_t g = 0; g < ng; ++g) zg[g] *= sqrt_w_[g] * global_mask_[g];
  gs_->from_global(zg, z);
}

void HybridSchwarz::apply_coarse(std::span<const double> r, std::span<double> z) const {
  const FunctionSpace& space = *space_;
  const std::size_t ppe = space.points_per_element();
  const std::size_t ne = space.num_elements();
  const auto im = gs_->inv_multiplicity();
  const std::size_t nc = coarse_gid_.size();
  std::vector<double> rc(nc, 0.0), xc(nc, 0.0);
  for (std::size_t e = 0; e < ne; ++e)
    for (int c = 0; c < 8; ++c) {
      double s = 0.0;
      for (std::size_t p = 0; p < ppe; ++p) {
        const std::size_t l = e * ppe + p;
        s += phi_[p * 8 + static_cast<std::size_t>(c)] * r[l] * im[l] * mask_[l];
      }
      rc[static_cast<std::size_t>(elem_coarse_[e * 8 + static_cast<std::size_t>(c)])] += s;
    }
  coarse_solve(rc, xc);
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t p = 0; p < ppe; ++p) {
      double s = 0.0;
      for (int c = 0; c < 8; ++c)
        s += phi_[p * 8 + static_cast<std::size_t>(c)] * xc[static_cast<std::size_t>(elem_coarse_[e * 8 + static_cast<std::size_t>(c)])];
      z[e * ppe + p] = s * mask_[e * ppe + p];
    }
}

void HybridSchwarz::apply(std::span<const double> r, std::span<double> z) const {
  space_->check_size(r.size(), "Schwarz input");
  space_->check_size(z.size(), "Schwarz output");
  apply_local(r, z);
  if (!options_.use_coarse || options_.coarse_iterations == 0) return;
  std::vector<double> zc(z.size());
  apply_coarse(r, zc);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += zc[i];
}

}  // namespace semflow
