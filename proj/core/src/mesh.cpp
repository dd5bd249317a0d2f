#include "semflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "semflow/basis.hpp"
#include "semflow/error.hpp"

namespace semflow {
namespace {

using FaceKey = std::array<std::int64_t, 4>;

FaceKey face_key(const Mesh& mesh, std::int64_t e, int f) {
  FaceKey key;
  const auto& fc = face_corners(f);
  for (int i = 0; i < 4; ++i) key[i] = mesh.elements[static_cast<std::size_t>(e)][fc[i]];
  std::sort(key.begin(), key.end());
  return key;
}

// Vertex deduplication with a tolerance, used by the generators.
class VertexPool {
 public:
  VertexPool(double cell, double tol) : cell_(cell), tol_(tol) {}

  std::int64_t insert(const Vec3& x) {
    const auto c = cell_of(x);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = buckets_.find(hash({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == buckets_.end()) continue;
          for (std::int64_t id : it->second) {
            const Vec3& y = vertices[static_cast<std::size_t>(id)];
            if (std::fabs(x[0] - y[0]) <= tol_ && std::fabs(x[1] - y[1]) <= tol_ &&
                std::fabs(x[2] - y[2]) <= tol_)
              return id;
          }
        }
    const auto id = static_cast<std::int64_t>(vertices.size());
    vertices.push_back(x);
    buckets_[hash(c)].push_back(id);
    return id;
  }

  std::vector<Vec3> vertices;

 private:
  std::array<long long, 3> cell_of(const Vec3& x) const {
    return {static_cast<long long>(std::floor(x[0] / cell_)),
            static_cast<long long>(std::floor(x[1] / cell_)),
            static_cast<long long>(std::floor(x[2] / cell_))};
  }
  static std::size_t hash(const std::array<long long, 3>& c) {
    std::size_t h = 1469598103934665603ull;
    for (long long v : c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

  double cell_;
  double tol_;
  std::unordered_map<std::size_t, std::vector<std::int64_t>> buckets_;
};

using Mapping = std::function<Vec3(double, double, double)>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double triple(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

// Adds an element defined by a reference-to-physical mapping. The r axis is
// reversed when needed so that the Jacobian is positive.
void add_mapped_element(Mesh& mesh, VertexPool& pool, const Mapping& map, bool curved,
                        int geometry_order) {
  const double h = 1e-3;
  const Vec3 xr = sub(map(h, 0, 0), map(-h, 0, 0));
  const Vec3 xs = sub(map(0, h, 0), map(0, -h, 0));
  const Vec3 xt = sub(map(0, 0, h), map(0, 0, -h));
  const bool flip = triple(xr, xs, xt) < 0.0;
  Mapping oriented = flip ? Mapping([&map](double r, double s, double t) { return map(-r, s, t); })
                          : map;

  std::array<std::int64_t, 8> corners{};
  for (int c = 0; c < 8; ++c) {
    const double r = (c & 1) ? 1.0 : -1.0;
    const double s = (c & 2) ? 1.0 : -1.0;
    const double t = (c & 4) ? 1.0 : -1.0;
    corners[c] = pool.insert(oriented(r, s, t));
  }
  const auto e = static_cast<std::int64_t>(mesh.elements.size());
  mesh.elements.push_back(corners);
  if (curved) {
    const Basis1D geo(geometry_order);
    const auto xi = geo.points();
    const int np = geo.num_points();
    CurvedElement rec;
    rec.order = geometry_order;
    rec.nodes.reserve(static_cast<std::size_t>(np) * np * np);
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) rec.nodes.push_back(oriented(xi[i], xi[j], xi[k]));
    mesh.curved.emplace(e, std::move(rec));
  }
}

Vec3 face_center(const Mesh& mesh, std::int64_t e, int f) {
  Vec3 c{0, 0, 0};
  for (int corner : face_corners(f)) {
    const Vec3& v = mesh.vertices[static_cast<std::size_t>(
        mesh.elements[static_cast<std::size_t>(e)][corner])];
    for (int d = 0; d < 3; ++d) c[d] += 0.25 * v[d];
  }
  return c;
}

std::vector<double> uniform_lines(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
  v.back() = hi;
  return v;
}

}  // namespace

const std::array<int, 4>& face_corners(int face) {
  static const std::array<std::array<int, 4>, 6> table{{
      {0, 2, 4, 6},
      {1, 3, 5, 7},
      {0, 1, 4, 5},
      {2, 3, 6, 7},
      {0, 1, 2, 3},
      {4, 5, 6, 7},
  }};
  if (face < 0 || face > 5) throw std::out_of_range("face index must be in 0..5");
  return table[static_cast<std::size_t>(face)];
}

std::vector<std::pair<std::int64_t, int>> exterior_faces(const Mesh& mesh) {
  std::map<FaceKey, std::vector<std::pair<std::int64_t, int>>> faces;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
    for (int f = 0; f < 6; ++f)
      faces[face_key(mesh, static_cast<std::int64_t>(e), f)].emplace_back(
          static_cast<std::int64_t>(e), f);
  std::vector<std::pair<std::int64_t, int>> out;
  for (const auto& [key, owners] : faces) {
    if (owners.size() > 2) {
      throw TopologyError("face shared by " + std::to_string(owners.size()) +
                          " elements (first element " + std::to_string(owners[0].first) + ")");
    }
    if (owners.size() == 1) out.push_back(owners[0]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate_mesh(const Mesh& mesh) {
  const auto nv = static_cast<std::int64_t>(mesh.vertices.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    std::set<std::int64_t> uniq;
    for (auto v : mesh.elements[e]) {
      if (v < 0 || v >= nv)
        throw TopologyError("element " + std::to_string(e) + " references vertex " +
                            std::to_string(v) + " out of range");
      uniq.insert(v);
    }
    if (uniq.size() != 8)
      throw TopologyError("element " + std::to_string(e) + " has repeated vertices");
  }
  const auto ext = exterior_faces(mesh);
  std::set<std::pair<std::int64_t, int>> exterior(ext.begin(), ext.end());
  std::set<std::pair<std::int64_t, int>> tagged;
  for (const auto& bf : mesh.boundary_facets) {
    const std::pair<std::int64_t, int> key{bf.element, bf.face};
    if (!exterior.count(key))
      throw TopologyError("tag '" + bf.tag + "' on interior or missing facet (element " +
                          std::to_string(bf.element) + ", face " + std::to_string(bf.face) + ")");
    if (!tagged.insert(key).second)
      throw TopologyError("facet (element " + std::to_string(bf.element) + ", face " +
                          std::to_string(bf.face) + ") tagged twice");
  }
  if (tagged.size() != exterior.size()) {
    for (const auto& key : exterior)
      if (!tagged.count(key))
        throw TopologyError("exterior facet (element " + std::to_string(key.first) + ", face " +
                            std::to_string(key.second) + ") carries no tag");
  }
  for (const auto& [e, rec] : mesh.curved) {
    if (e < 0 || e >= static_cast<std::int64_t>(mesh.elements.size()))
      throw TopologyError("curved record for missing element " + std::to_string(e));
    const std::size_t np = static_cast<std::size_t>(rec.order) + 1;
    if (rec.order < 1 || rec.nodes.size() != np * np * np)
      throw TopologyError("curved record for element " + std::to_string(e) +
                          " has inconsistent node count");
  }
}

std::vector<std::string> boundary_tags(const Mesh& mesh) {
  std::set<std::string> tags;
  for (const auto& bf : mesh.boundary_facets) tags.insert(bf.tag);
  return {tags.begin(), tags.end()};
}

Mesh gen_box_mesh(const std::array<Interval, 3>& extent, const std::array<int, 3>& counts,
                  const std::array<std::string, 6>& tags) {
  for (int d = 0; d < 3; ++d) {
    if (counts[d] < 1) throw std::invalid_argument("gen_box_mesh: element counts must be >= 1");
    if (!(extent[d].hi > extent[d].lo))
      throw std::invalid_argument("gen_box_mesh: degenerate interval");
  }
  const int nx = counts[0], ny = counts[1], nz = counts[2];
  const auto xl = uniform_lines(extent[0].lo, extent[0].hi, nx);
  const auto yl = uniform_lines(extent[1].lo, extent[1].hi, ny);
  const auto zl = uniform_lines(extent[2].lo, extent[2].hi, nz);

  Mesh mesh;
  auto vid = [&](int i, int j, int k) {
    return static_cast<std::int64_t>(i + (nx + 1) * (j + (ny + 1) * k));
  };
  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        mesh.vertices.push_back({xl[static_cast<std::size_t>(i)], yl[static_cast<std::size_t>(j)],
                                 zl[static_cast<std::size_t>(k)]});
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        std::array<std::int64_t, 8> c{};
        for (int q = 0; q < 8; ++q) c[q] = vid(i + (q & 1), j + ((q >> 1) & 1), k + ((q >> 2) & 1));
        const auto e = static_cast<std::int64_t>(mesh.elements.size());
        mesh.elements.push_back(c);
        if (i == 0) mesh.boundary_facets.push_back({e, 0, tags[0]});
        if (i == nx - 1) mesh.boundary_facets.push_back({e, 1, tags[1]});
        if (j == 0) mesh.boundary_facets.push_back({e, 2, tags[2]});
        if (j == ny - 1) mesh.boundary_facets.push_back({e, 3, tags[3]});
        if (k == 0) mesh.boundary_facets.push_back({e, 4, tags[4]});
        if (k == nz - 1) mesh.boundary_facets.push_back({e, 5, tags[5]});
      }
  return mesh;
}

std::int64_t cylinder_box_element_count(const CylinderBoxParams& p) {
  const std::int64_t m = p.azimuthal / 4;
  const std::int64_t nx = p.upstream + m + p.downstream;
  const std::int64_t nz = 2 * p.side + m;
  return static_cast<std::int64_t>(p.vertical) *
         (static_cast<std::int64_t>(p.azimuthal) * p.radial + nx * nz - m * m);
}

Mesh gen_cylinder_box_mesh(const CylinderBoxParams& p) {
  const double R = 0.5 * p.diameter;
  const double S = p.square_half_width;
  if (!(p.diameter > 0.0)) throw std::invalid_argument("cylinder diameter must be positive");
  if (p.azimuthal < 8 || p.azimuthal % 4 != 0)
    throw std::invalid_argument("azimuthal count must be a multiple of 4 and >= 8");
  if (p.radial < 1 || p.vertical < 1 || p.upstream < 1 || p.downstream < 1 || p.side < 1)
    throw std::invalid_argument("cylinder-box block counts must be >= 1");
  if (!(p.y.hi > p.y.lo)) throw std::invalid_argument("degenerate vertical interval");
  if (!(R < S))
    throw std::invalid_argument("cylinder touches the O-grid square (need D/2 < square half width)");
  if (!(p.x.lo < -S && p.x.hi > S && p.z.lo < -S && p.z.hi > S))
    throw std::invalid_argument("box must strictly contain the O-grid square around the cylinder");

  const int m = p.azimuthal / 4;
  const double pi = std::numbers::pi;
  const double scale = std::max({p.x.hi - p.x.lo, p.y.hi - p.y.lo, p.z.hi - p.z.lo});
  VertexPool pool(1e-6 * scale, 1e-9 * scale);
  Mesh mesh;

  const auto ylines = uniform_lines(p.y.lo, p.y.hi, p.vertical);
  auto yat = [&](int layer, double t) {
    const double a = ylines[static_cast<std::size_t>(layer)];
    const double b = ylines[static_cast<std::size_t>(layer) + 1];
    return a + 0.5 * (t + 1.0) * (b - a);
  };

  // Lines inside the square follow the ring's equi-angular spokes.
  std::vector<double> inner(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j)
    inner[static_cast<std::size_t>(j)] = S * std::tan(-pi / 4 + j * (pi / 2) / m);
  inner.front() = -S;
  inner.back() = S;
  std::vector<double> xlines = uniform_lines(p.x.lo, -S, p.upstream);
  xlines.pop_back();
  xlines.insert(xlines.end(), inner.begin(), inner.end());
  {
    auto down = uniform_lines(S, p.x.hi, p.downstream);
    xlines.insert(xlines.end(), down.begin() + 1, down.end());
  }
  std::vector<double> zlines = uniform_lines(p.z.lo, -S, p.side);
  zlines.pop_back();
  zlines.insert(zlines.end(), inner.begin(), inner.end());
  {
    auto hi = uniform_lines(S, p.z.hi, p.side);
    zlines.insert(zlines.end(), hi.begin() + 1, hi.end());
  }

  auto square_point = [&](int k) -> std::array<double, 2> {
    const double th = -3.0 * pi / 4 + 2.0 * pi * k / p.azimuthal;
    const double c = std::cos(th), s = std::sin(th);
    const double inv = S / std::max(std::fabs(c), std::fabs(s));
    std::array<double, 2> q{c * inv, s * inv};
    // Snap the side coordinate so ring and Cartesian nodes agree exactly.
    if (std::fabs(std::fabs(c) - std::fabs(s)) < 1e-14) {
      q = {c > 0 ? S : -S, s > 0 ? S : -S};
    } else if (std::fabs(c) > std::fabs(s)) {
      q[0] = c > 0 ? S : -S;
    } else {
      q[1] = s > 0 ? S : -S;
    }
    return q;
  };

  for (int layer = 0; layer < p.vertical; ++layer) {
    // O-grid ring: r -> azimuth, s -> radial, t -> vertical.
    for (int k = 0; k < p.azimuthal; ++k) {
      const double th0 = -3.0 * pi / 4 + 2.0 * pi * k / p.azimuthal;
      const double th1 = -3.0 * pi / 4 + 2.0 * pi * (k + 1) / p.azimuthal;
      const auto q0 = square_point(k);
      const auto q1 = square_point(k + 1);
      for (int rl = 0; rl < p.radial; ++rl) {
        Mapping map = [=, &yat](double r, double s, double t) -> Vec3 {
          const double a = 0.5 * (r + 1.0);
          const double th = th0 + a * (th1 - th0);
          const double w = (rl + 0.5 * (s + 1.0)) / p.radial;
          const double cx = R * std::cos(th), cz = R * std::sin(th);
          const double sx = (1.0 - a) * q0[0] + a * q1[0];
          const double sz = (1.0 - a) * q0[1] + a * q1[1];
          return {(1.0 - w) * cx + w * sx, yat(layer, t), (1.0 - w) * cz + w * sz};
        };
        add_mapped_element(mesh, pool, map, true, p.geometry_order);
      }
    }
    // Cartesian blocks outside the square.
    const int nx = static_cast<int>(xlines.size()) - 1;
    const int nz = static_cast<int>(zlines.size()) - 1;
    for (int kz = 0; kz < nz; ++kz)
      for (int ix = 0; ix < nx; ++ix) {
        const bool in_square_x = ix >= p.upstream && ix < p.upstream + m;
        const bool in_square_z = kz >= p.side && kz < p.side + m;
        if (in_square_x && in_square_z) continue;
        const double x0 = xlines[static_cast<std::size_t>(ix)];
        const double x1 = xlines[static_cast<std::size_t>(ix) + 1];
        const double z0 = zlines[static_cast<std::size_t>(kz)];
        const double z1 = zlines[static_cast<std::size_t>(kz) + 1];
        Mapping map = [=, &yat](double r, double s, double t) -> Vec3 {
          return {x0 + 0.5 * (r + 1.0) * (x1 - x0), yat(layer, s), z0 + 0.5 * (t + 1.0) * (z1 - z0)};
        };
        add_mapped_element(mesh, pool, map, false, p.geometry_order);
      }
  }
  mesh.vertices = std::move(pool.vertices);

  const double tol = 1e-9 * scale;
  for (const auto& [e, f] : exterior_faces(mesh)) {
    const Vec3 c = face_center(mesh, e, f);
    std::string tag;
    if (std::fabs(c[1] - p.y.lo) < tol) {
      tag = "bottom";
    } else if (std::fabs(c[1] - p.y.hi) < tol) {
      tag = "top";
    } else if (std::hypot(c[0], c[2]) < S - tol) {
      tag = "cylinder";
    } else if (std::fabs(c[0] - p.x.lo) < tol) {
      tag = "inflow";
    } else if (std::fabs(c[0] - p.x.hi) < tol) {
      tag = "outflow";
    } else {
      tag = "span";
    }
    mesh.boundary_facets.push_back({e, f, tag});
  }
  return mesh;
}

}  // namespace semflow
