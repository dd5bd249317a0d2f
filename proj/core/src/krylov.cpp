#include "semflow/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "semflow/error.hpp"
#include "semflow/parallel.hpp"

namespace semflow {

namespace {

constexpr std::size_t kDotBlock = 4096;

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += a * x[static_cast<std::size_t>(i)];
}

void apply_mask(std::span<const double> mask, std::span<double> v) {
  if (mask.empty()) return;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mask[i];
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value in ") + what);
}

double true_residual(const LinearOp& apply_a, std::span<const double> rhs, std::span<const double> x,
                     const VectorSpace& vs, std::vector<double>& work) {
  work.resize(rhs.size());
  apply_a(x, work);
  for (std::size_t i = 0; i < rhs.size(); ++i) work[i] = rhs[i] - work[i];
  return vs.norm(work);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("solver abs_tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
  if (restart_m < 1) throw std::invalid_argument("solver restart_m must be >= 1");
}

double VectorSpace::dot(std::span<const double> a, std::span<const double> b) const {
  if (gs_ != nullptr) return deterministic_dot(a, b, gs_->inv_multiplicity(), kDotBlock);
  return deterministic_dot(a, b, {}, kDotBlock);
}

double VectorSpace::norm(std::span<const double> a) const { return std::sqrt(std::max(0.0, dot(a, a))); }

SolveResult pcg(const LinearOp& apply_a, const LinearOp& apply_m, std::span<const double> rhs, std::span<double> x,
                const SolverConfig& config, std::span<const double> mask, const GatherScatter* gs) {
  config.validate();
  if (x.size() != rhs.size()) throw std::invalid_argument("pcg: size mismatch between rhs and x");
  const VectorSpace vs(gs);
  const std::size_t n = rhs.size();
  std::vector<double> r(n), z(n), p(n), ap(n);
  SolveResult res;

  apply_a(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  apply_mask(mask, r);
  double rnorm = vs.norm(r);
  check_finite(rnorm, "pcg residual");
  res.initial_residual = rnorm;
  double rz_old = 0.0;
  int it = 0;
  while (rnorm > config.abs_tol && it < config.max_iter) {
    apply_m(r, z);
    apply_mask(mask, z);
    const double rz = vs.dot(r, z);
    if (it == 0) {
      p = z;
    } else {
      const double beta = rz / rz_old;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rz_old = rz;
    apply_a(p, ap);
    const double pap = vs.dot(p, ap);
    if (!(pap > 0.0))
      throw ConvergenceError("pcg breakdown at iteration " + std::to_string(it + 1) +
                             ": <p, A p> <= 0 (operator not SPD on the masked subspace)");
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    rnorm = vs.norm(r);
    check_finite(rnorm, "pcg residual");
    ++it;
    res.history.push_back(rnorm);
  }
  res.iterations = it;
  std::vector<double> work;
  res.final_residual = true_residual(apply_a, rhs, x, vs, work);
  res.converged = rnorm <= config.abs_tol;
  return res;
}

SolveResult gmres(const LinearOp& apply_a, const LinearOp& apply_m, std::span<const double> rhs,
                  std::span<double> x, const SolverConfig& config, std::span<const double> mask,
                  const GatherScatter* gs) {
  config.validate();
  if (x.size() != rhs.size()) throw std::invalid_argument("gmres: size mismatch between rhs and x");
  const VectorSpace vs(gs);
  const std::size_t n = rhs.size();
  const int m = config.restart_m;
  std::vector<std::vector<double>> v(static_cast<std::size_t>(m + 1), std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>((m + 1) * m), 0.0);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i * m + j)]; };
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)),
      g(static_cast<std::size_t>(m + 1)), y(static_cast<std::size_t>(m));
  std::vector<double> r(n), z(n), w(n);
  SolveResult res;
  int total = 0;
  bool first = true;
  double rnorm = 0.0;

  for (;;) {
    apply_a(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - w[i];
    apply_mask(mask, r);
    rnorm = vs.norm(r);
    check_finite(rnorm, "gmres residual");
    if (first) {
      res.initial_residual = rnorm;
      first = false;
    }
    if (rnorm <= config.abs_tol || total >= config.max_iter) break;

    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    int k = 0;
    bool done = false;
    while (k < m && total < config.max_iter && !done) {
      apply_m(v[static_cast<std::size_t>(k)], z);
      apply_mask(mask, z);
      apply_a(z, w);
      apply_mask(mask, w);
      const double wnorm0 = vs.norm(w);
      for (int i = 0; i <= k; ++i) {
        const double hij = vs.dot(w, v[static_cast<std::size_t>(i)]);
        H(i, k) = hij;
        axpy(-hij, v[static_cast<std::size_t>(i)], w);
      }
      double wnorm = vs.norm(w);
      // Second pass when the projected vector lost orthogonality.
      double loss = 0.0;
      if (wnorm > 0.0)
        for (int i = 0; i <= k; ++i)
          loss = std::max(loss, std::abs(vs.dot(w, v[static_cast<std::size_t>(i)])) / wnorm);
      if (loss > 1e-8) {
        for (int i = 0; i <= k; ++i) {
          const double c = vs.dot(w, v[static_cast<std::size_t>(i)]);
          H(i, k) += c;
          axpy(-c, v[static_cast<std::size_t>(i)], w);
        }
        wnorm = vs.norm(w);
      }
      check_finite(wnorm, "gmres Arnoldi vector");
      H(k + 1, k) = wnorm;
      const bool happy = wnorm <= 1e-14 * std::max(wnorm0, 1e-300);
      if (!happy)
        for (std::size_t i = 0; i < n; ++i) v[static_cast<std::size_t>(k + 1)][i] = w[i] / wnorm;

      for (int i = 0; i < k; ++i) {
        const double a = H(i, k), b = H(i + 1, k);
        H(i, k) = cs[static_cast<std::size_t>(i)] * a + sn[static_cast<std::size_t>(i)] * b;
        H(i + 1, k) = -sn[static_cast<std::size_t>(i)] * a + cs[static_cast<std::size_t>(i)] * b;
      }
      const double a = H(k, k), b = H(k + 1, k);
      const double rho = std::hypot(a, b);
      if (rho == 0.0) throw ConvergenceError("gmres breakdown: singular Hessenberg column at iteration " +
                                             std::to_string(total + 1));
      cs[static_cast<std::size_t>(k)] = a / rho;
      sn[static_cast<std::size_t>(k)] = b / rho;
      H(k, k) = rho;
      H(k + 1, k) = 0.0;
      g[static_cast<std::size_t>(k + 1)] = -sn[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
      g[static_cast<std::size_t>(k)] = cs[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
      ++k;
      ++total;
      const double est = std::abs(g[static_cast<std::size_t>(k)]);
      res.history.push_back(est);
      done = happy || est <= config.abs_tol;
    }

    for (int i = k - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[static_cast<std::size_t>(j)];
      const double d = H(i, i);
      if (d == 0.0) throw ConvergenceError("gmres least-squares breakdown: zero pivot");
      y[static_cast<std::size_t>(i)] = s / d;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) axpy(y[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)], w);
    apply_m(w, z);
    apply_mask(mask, z);
    axpy(1.0, z, x);
  }
  res.iterations = total;
  std::vector<double> work;
  res.final_residual = true_residual(apply_a, rhs, x, vs, work);
  res.converged = rnorm <= config.abs_tol;
  return res;
}

ProjectionSpace::ProjectionSpace(int capacity, int reset_interval, const GatherScatter* gs)
    : capacity_(capacity), reset_interval_(reset_interval), vs_(gs) {
  if (capacity < 1) throw std::invalid_argument("projection capacity must be >= 1");
  if (reset_interval < 1) throw std::invalid_argument("projection reset interval must be >= 1");
}

std::vector<double> ProjectionSpace::project_pre(std::span<double> rhs) const {
  std::vector<double> guess(rhs.size(), 0.0);
  for (std::size_t k = 0; k < x_.size(); ++k) {
    const double a = vs_.dot(x_[k], rhs);
    axpy(a, x_[k], guess);
    axpy(-a, ax_[k], rhs);
  }
  return guess;
}

void ProjectionSpace::project_post(std::span<const double> x_new, const LinearOp& apply_a) {
  if (count() >= capacity_ || steps_ >= reset_interval_) invalidate();
  std::vector<double> xn(x_new.begin(), x_new.end());
  std::vector<double> axn(xn.size());
  apply_a(xn, axn);
  const double norm0 = std::sqrt(std::max(0.0, vs_.dot(xn, axn)));
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t k = 0; k < x_.size(); ++k) {
      const double c = vs_.dot(axn, x_[k]);
      axpy(-c, x_[k], xn);
      axpy(-c, ax_[k], axn);
    }
  const double nrm2 = vs_.dot(xn, axn);
  ++steps_;
  // Skip vectors already (numerically) in the span.
  if (!(nrm2 > 0.0) || std::sqrt(nrm2) <= 1e-10 * norm0) return;
  const double inv = 1.0 / std::sqrt(nrm2);
  for (auto& a : xn) a *= inv;
  for (auto& a : axn) a *= inv;
  x_.push_back(std::move(xn));
  ax_.push_back(std::move(axn));
}

void ProjectionSpace::invalidate() {
  x_.clear();
  ax_.clear();
  steps_ = 0;
}

void ProjectionSpace::restore(std::vector<std::vector<double>> x, std::vector<std::vector<double>> ax, int steps) {
  if (x.size() != ax.size() || static_cast<int>(x.size()) > capacity_)
    throw std::invalid_argument("projection restore: inconsistent stored vectors");
  x_ = std::move(x);
  ax_ = std::move(ax);
  steps_ = steps;
}

}  // namespace semflow
