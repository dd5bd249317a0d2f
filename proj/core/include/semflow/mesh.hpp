#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace semflow {

using Vec3 = std::array<double, 3>;

/// Tagged exterior face of an element.
///
/// Local face numbering: 0 = (r=-1), 1 = (r=+1), 2 = (s=-1), 3 = (s=+1),
/// 4 = (t=-1), 5 = (t=+1).
struct BoundaryFacet {
  std::int64_t element = 0;
  int face = 0;
  std::string tag;

  bool operator==(const BoundaryFacet&) const = default;
};

/// Explicit isoparametric geometry for one element: coordinates of the
/// (order+1)^3 GLL geometry nodes, r fastest, then s, then t.
struct CurvedElement {
  int order = 1;
  std::vector<Vec3> nodes;

  bool operator==(const CurvedElement&) const = default;
};

/// Conforming hexahedral mesh.
///
/// Element corners are ordered lexicographically in reference coordinates:
/// corner c = ci + 2 cj + 4 ck sits at (r, s, t) = (2ci-1, 2cj-1, 2ck-1).
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int64_t, 8>> elements;
  std::vector<BoundaryFacet> boundary_facets;
  std::map<std::int64_t, CurvedElement> curved;

  std::size_t num_elements() const noexcept { return elements.size(); }
  bool operator==(const Mesh&) const = default;
};

/// Corner indices (0..7) of local face f, in the order (a, b) with a the
/// faster-varying in-face direction.
const std::array<int, 4>& face_corners(int face);

/// Unmatched element faces (element, face), sorted.
std::vector<std::pair<std::int64_t, int>> exterior_faces(const Mesh& mesh);

/// Checks face conformity and facet tags: every exterior face tagged exactly
/// once, every tag on an exterior face. Throws TopologyError.
void validate_mesh(const Mesh& mesh);

/// Sorted unique tags present on the boundary.
std::vector<std::string> boundary_tags(const Mesh& mesh);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Cartesian box of counts[0]*counts[1]*counts[2] affine hexahedra. `tags`
/// holds the facet tags for x-, x+, y-, y+, z-, z+.
Mesh gen_box_mesh(const std::array<Interval, 3>& extent, const std::array<int, 3>& counts,
                  const std::array<std::string, 6>& tags);

/// Vertical (y-axis) cylinder of diameter `diameter` centred on x = z = 0
/// inside a box. An O-grid ring of `azimuthal` x `radial` elements joins the
/// cylinder to a square of half-width `square_half_width`; the rest of the box
/// is block-structured Cartesian.
struct CylinderBoxParams {
  double diameter = 1.0;
  Interval x{-4.0, 10.0};
  Interval y{0.0, 1.0};
  Interval z{-4.0, 4.0};
  double square_half_width = 1.5;
  int azimuthal = 16;  ///< multiple of 4, >= 8
  int radial = 2;
  int vertical = 1;
  int upstream = 3;    ///< cells in [x.lo, -S]
  int downstream = 6;  ///< cells in [S, x.hi]
  int side = 3;        ///< cells in [z.lo, -S] and [S, z.hi]
  int geometry_order = 7;  ///< order of the curved-geometry records
};

/// Element count: vertical * (azimuthal * radial
///   + (upstream + azimuthal/4 + downstream) * (2*side + azimuthal/4)
///   - (azimuthal/4)^2).
std::int64_t cylinder_box_element_count(const CylinderBoxParams& p);

Mesh gen_cylinder_box_mesh(const CylinderBoxParams& params);

}  // namespace semflow
