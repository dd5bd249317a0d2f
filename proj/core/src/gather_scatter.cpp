#include "semflow/gather_scatter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "semflow/error.hpp"

namespace semflow {
namespace {

struct CellHash {
  std::size_t operator()(const std::array<long long, 3>& c) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (long long v : c) h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace

GatherScatter::GatherScatter(const FunctionSpace& space, double rel_tol) {
  const std::size_t nl = space.num_local();
  const std::size_t ppe = space.points_per_element();
  const double tol = rel_tol * space.min_element_diameter();
  const double cell = 4.0 * tol;
  const auto X = space.coord(0), Y = space.coord(1), Z = space.coord(2);

  // Cluster coincident points. A point is compared against representatives
  // in the 27 surrounding hash cells.
  std::unordered_map<std::array<long long, 3>, std::vector<std::int64_t>, CellHash> grid;
  std::vector<std::int64_t> cluster(nl, -1);
  std::vector<std::int64_t> rep;  // representative local index per cluster
  auto cell_of = [&](std::size_t p) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(X[p] / cell)),
                                     static_cast<long long>(std::floor(Y[p] / cell)),
                                     static_cast<long long>(std::floor(Z[p] / cell))};
  };
  for (std::size_t p = 0; p < nl; ++p) {
    const auto c = cell_of(p);
    std::int64_t found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx)
      for (int dy = -1; dy <= 1 && found < 0; ++dy)
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (std::int64_t cl : it->second) {
            const auto q = static_cast<std::size_t>(rep[static_cast<std::size_t>(cl)]);
            if (std::fabs(X[p] - X[q]) <= tol && std::fabs(Y[p] - Y[q]) <= tol &&
                std::fabs(Z[p] - Z[q]) <= tol) {
              found = cl;
              break;
            }
          }
        }
    if (found < 0) {
      found = static_cast<std::int64_t>(rep.size());
      rep.push_back(static_cast<std::int64_t>(p));
      grid[c].push_back(found);
    }
    cluster[p] = found;
  }

  // Deterministic numbering: clusters sorted by representative coordinates.
  const std::size_t nc = rep.size();
  std::vector<std::int64_t> order(nc);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    const auto p = static_cast<std::size_t>(rep[static_cast<std::size_t>(a)]);
    const auto q = static_cast<std::size_t>(rep[static_cast<std::size_t>(b)]);
    if (X[p] != X[q]) return X[p] < X[q];
    if (Y[p] != Y[q]) return Y[p] < Y[q];
    if (Z[p] != Z[q]) return Z[p] < Z[q];
    return p < q;
  });
  std::vector<std::int64_t> id_of_cluster(nc);
  for (std::size_t i = 0; i < nc; ++i) id_of_cluster[static_cast<std::size_t>(order[i])] = static_cast<std::int64_t>(i);

  num_global_ = nc;
  gid_.resize(nl);
  for (std::size_t p = 0; p < nl; ++p) gid_[p] = id_of_cluster[static_cast<std::size_t>(cluster[p])];

  // Copies per id, ascending local index.
  std::vector<std::int64_t> count(nc, 0);
  for (auto g : gid_) ++count[static_cast<std::size_t>(g)];
  std::vector<std::int64_t> offsets(nc + 1, 0);
  for (std::size_t g = 0; g < nc; ++g) offsets[g + 1] = offsets[g] + count[g];
  std::vector<std::int64_t> locals(nl);
  {
    std::vector<std::int64_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t p = 0; p < nl; ++p)
      locals[static_cast<std::size_t>(fill[static_cast<std::size_t>(gid_[p])]++)] = static_cast<std::int64_t>(p);
  }

  // Coincident points must come from distinct elements that share a mesh
  // vertex.
  const Mesh& mesh = space.mesh();
  std::vector<std::set<std::int64_t>> vsets(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    vsets[e] = std::set<std::int64_t>(mesh.elements[e].begin(), mesh.elements[e].end());
  first_.resize(nc);
  shared_offsets_.push_back(0);
  for (std::size_t g = 0; g < nc; ++g) {
    const auto lo = static_cast<std::size_t>(offsets[g]);
    const auto hi = static_cast<std::size_t>(offsets[g + 1]);
    first_[g] = locals[lo];
    if (hi - lo < 2) continue;
    for (std::size_t a = lo; a < hi; ++a)
      for (std::size_t b = a + 1; b < hi; ++b) {
        const auto ea = static_cast<std::size_t>(locals[a]) / ppe;
        const auto eb = static_cast<std::size_t>(locals[b]) / ppe;
        bool adjacent = false;
        if (ea != eb) {
          for (auto v : vsets[ea])
            if (vsets[eb].count(v)) {
              adjacent = true;
              break;
            }
        }
        if (!adjacent) {
          throw TopologyError("coincident GLL points in non-adjacent elements " + std::to_string(ea) +
                              " and " + std::to_string(eb) + " (global id " + std::to_string(g) + ")");
        }
      }
    for (std::size_t a = lo; a < hi; ++a) shared_locals_.push_back(locals[a]);
    shared_offsets_.push_back(static_cast<std::int64_t>(shared_locals_.size()));
  }

  mult_.resize(nl);
  inv_mult_.resize(nl);
  for (std::size_t p = 0; p < nl; ++p) {
    mult_[p] = static_cast<double>(count[static_cast<std::size_t>(gid_[p])]);
    inv_mult_[p] = 1.0 / mult_[p];
  }
}

void GatherScatter::add(std::span<double> u) const {
  if (u.size() != gid_.size()) throw std::invalid_argument("gs_add: field size does not match space");
  const long ns = static_cast<long>(shared_offsets_.size()) - 1;
#pragma omp parallel for schedule(static)
  for (long s = 0; s < ns; ++s) {
    const auto lo = static_cast<std::size_t>(shared_offsets_[static_cast<std::size_t>(s)]);
    const auto hi = static_cast<std::size_t>(shared_offsets_[static_cast<std::size_t>(s) + 1]);
    double sum = 0.0;
    for (std::size_t a = lo; a < hi; ++a) sum += u[static_cast<std::size_t>(shared_locals_[a])];
    for (std::size_t a = lo; a < hi; ++a) u[static_cast<std::size_t>(shared_locals_[a])] = sum;
  }
}

void GatherScatter::avg(std::span<double> u) const {
  if (u.size() != gid_.size()) throw std::invalid_argument("gs_avg: field size does not match space");
  // Mean written as first copy plus averaged deviations so that an already
  // continuous field is reproduced bit-for-bit.
  const long ns = static_cast<long>(shared_offsets_.size()) - 1;
#pragma omp parallel for schedule(static)
  for (long s = 0; s < ns; ++s) {
    const auto lo = static_cast<std::size_t>(shared_offsets_[static_cast<std::size_t>(s)]);
    const auto hi = static_cast<std::size_t>(shared_offsets_[static_cast<std::size_t>(s) + 1]);
    const double base = u[static_cast<std::size_t>(shared_locals_[lo])];
    double dev = 0.0;
    for (std::size_t a = lo; a < hi; ++a) dev += u[static_cast<std::size_t>(shared_locals_[a])] - base;
    const double mean = base + dev / static_cast<double>(hi - lo);
    for (std::size_t a = lo; a < hi; ++a) u[static_cast<std::size_t>(shared_locals_[a])] = mean;
  }
}

std::vector<double> GatherScatter::to_global(std::span<const double> u) const {
  std::vector<double> g(num_global_);
  for (std::size_t i = 0; i < num_global_; ++i) g[i] = u[static_cast<std::size_t>(first_[i])];
  return g;
}

void GatherScatter::from_global(std::span<const double> g, std::span<double> u) const {
  for (std::size_t p = 0; p < gid_.size(); ++p) u[p] = g[static_cast<std::size_t>(gid_[p])];
}

}  // namespace semflow
