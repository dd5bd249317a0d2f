#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "semflow/binary.hpp"
#include "semflow/error.hpp"
#include "semflow/mesh.hpp"
#include "semflow/mesh_io.hpp"
#include "semflow/space.hpp"

using namespace semflow;

namespace {

const std::array<std::string, 6> kTags{"xl", "xh", "yl", "yh", "zl", "zh"};
const std::array<Interval, 3> kUnit{Interval{0, 1}, Interval{0, 1}, Interval{0, 1}};

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("semflow_test_" + name);
}

}  // namespace

TEST(Mesh, SingleBox) {
  const Mesh m = gen_box_mesh(kUnit, {1, 1, 1}, kTags);
  EXPECT_EQ(m.num_elements(), 1u);
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(m.boundary_facets.size(), 6u);
  validate_mesh(m);
}

TEST(Mesh, TwoElementsShareOneFace) {
  const Mesh m = gen_box_mesh(kUnit, {2, 1, 1}, kTags);
  ASSERT_EQ(m.num_elements(), 2u);
  std::set<std::int64_t> a(m.elements[0].begin(), m.elements[0].end());
  int shared = 0;
  for (auto v : m.elements[1]) shared += a.count(v) ? 1 : 0;
  EXPECT_EQ(shared, 4);
  EXPECT_EQ(exterior_faces(m).size(), 10u);
}

TEST(Mesh, VertexCountOfFourCubed) {
  const Mesh m = gen_box_mesh(kUnit, {4, 4, 4}, kTags);
  EXPECT_EQ(m.num_elements(), 64u);
  EXPECT_EQ(m.vertices.size(), 125u);
}

TEST(Mesh, BoxRejectsBadCounts) {
  EXPECT_THROW(gen_box_mesh(kUnit, {0, 1, 1}, kTags), std::invalid_argument);
  EXPECT_THROW(gen_box_mesh({Interval{1, 1}, Interval{0, 1}, Interval{0, 1}}, {1, 1, 1}, kTags), std::invalid_argument);
}

TEST(Mesh, CylinderNodesOnCircle) {
  CylinderBoxParams p;
  p.azimuthal = 8;
  p.radial = 1;
  p.vertical = 1;
  p.upstream = 1;
  p.downstream = 1;
  p.side = 1;
  p.geometry_order = 7;
  const Mesh m = gen_cylinder_box_mesh(p);
  validate_mesh(m);
  EXPECT_EQ(static_cast<std::int64_t>(m.num_elements()), cylinder_box_element_count(p));
  const int n = p.geometry_order + 1;
  int checked = 0;
  for (const auto& f : m.boundary_facets) {
    if (f.tag != "cylinder") continue;
    const auto& rec = m.curved.at(f.element);
    // Cylinder facets of the O-grid sit at r = -1 or r = +1 etc.; find
    // nodes on the facet by face index.
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const bool on = (f.face == 0 && i == 0) || (f.face == 1 && i == n - 1) || (f.face == 2 && j == 0) ||
                          (f.face == 3 && j == n - 1) || (f.face == 4 && k == 0) || (f.face == 5 && k == n - 1);
          if (!on) continue;
          const Vec3& x = rec.nodes[static_cast<std::size_t>(i + n * (j + n * k))];
          EXPECT_NEAR(std::hypot(x[0], x[2]), 0.5 * p.diameter, 1e-12);
          ++checked;
        }
  }
  EXPECT_EQ(checked, 8 * n * n);
}

TEST(Mesh, CylinderJacobianPositiveAtOrderSeven) {
  CylinderBoxParams p;
  auto mesh = std::make_shared<Mesh>(gen_cylinder_box_mesh(p));
  EXPECT_EQ(static_cast<std::int64_t>(mesh->num_elements()), cylinder_box_element_count(p));
  const FunctionSpace space(mesh, 7);
  for (double j : space.jac()) ASSERT_GT(j, 0.0);
  std::set<std::string> tags;
  for (const auto& f : mesh->boundary_facets) tags.insert(f.tag);
  EXPECT_EQ(tags, (std::set<std::string>{"bottom", "cylinder", "inflow", "outflow", "span", "top"}));
}

TEST(Mesh, CylinderRejectsTouchingBox) {
  CylinderBoxParams p;
  p.diameter = 3.5;
  EXPECT_THROW(gen_cylinder_box_mesh(p), std::invalid_argument);
  CylinderBoxParams q;
  q.azimuthal = 10;
  EXPECT_THROW(gen_cylinder_box_mesh(q), std::invalid_argument);
}

TEST(Mesh, FileRoundTripIsBitExact) {
  Mesh m = gen_box_mesh({Interval{0.1, 0.7}, Interval{-1.0 / 3.0, 2.0}, Interval{0, 1e-3}}, {2, 3, 1}, kTags);
  const auto path = temp_file("box.smsh");
  write_mesh(m, path);
  const Mesh r = read_mesh(path);
  EXPECT_TRUE(r == m);
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    for (int l = 0; l < 3; ++l)
      EXPECT_EQ(std::bit_cast<std::uint64_t>(r.vertices[i][l]), std::bit_cast<std::uint64_t>(m.vertices[i][l]));

  CylinderBoxParams p;
  p.azimuthal = 8;
  p.radial = 1;
  const Mesh c = gen_cylinder_box_mesh(p);
  EXPECT_TRUE(decode_mesh(encode_mesh(c)) == c);
  std::filesystem::remove(path);
}

TEST(Mesh, TruncatedFileNamesSection) {
  const auto bytes = encode_mesh(gen_box_mesh(kUnit, {1, 1, 1}, kTags));
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 20);
  try {
    decode_mesh(cut);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("section"), std::string::npos) << e.what();
  }
  // Dropping the tail entirely loses the END marker.
  std::vector<std::uint8_t> noend(bytes.begin(), bytes.end() - 4);
  try {
    decode_mesh(noend);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("END"), std::string::npos) << e.what();
  }
}

TEST(Mesh, RejectsBadMagicAndVersion) {
  auto bytes = encode_mesh(gen_box_mesh(kUnit, {1, 1, 1}, kTags));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_mesh(bad), ParseError);
  bad = bytes;
  bad[8] = 99;  // version field follows the 8-byte magic
  try {
    decode_mesh(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
}

TEST(Mesh, InvertedElementAcceptedByReaderRejectedBySpace) {
  Mesh m = gen_box_mesh(kUnit, {2, 1, 1}, kTags);
  std::swap(m.elements[1][0], m.elements[1][1]);
  std::swap(m.elements[1][2], m.elements[1][3]);
  std::swap(m.elements[1][4], m.elements[1][5]);
  std::swap(m.elements[1][6], m.elements[1][7]);
  const Mesh r = decode_mesh(encode_mesh(m));
  try {
    FunctionSpace s(std::make_shared<Mesh>(r), 3);
    FAIL() << "expected GeometryError";
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.element(), 1);
  }
}

TEST(Mesh, ValidateRejectsMissingTag) {
  Mesh m = gen_box_mesh(kUnit, {1, 1, 1}, kTags);
  m.boundary_facets.pop_back();
  EXPECT_THROW(validate_mesh(m), TopologyError);
}

TEST(Mesh, FacetSharingIsSymmetric) {
  const Mesh m = gen_box_mesh(kUnit, {3, 2, 2}, kTags);
  std::map<std::set<std::int64_t>, int> faces;
  for (const auto& e : m.elements)
    for (int f = 0; f < 6; ++f) {
      std::set<std::int64_t> key;
      for (int c : face_corners(f)) key.insert(e[static_cast<std::size_t>(c)]);
      ++faces[key];
    }
  for (const auto& [k, n] : faces) EXPECT_LE(n, 2);
  EXPECT_EQ(exterior_faces(m).size(), 2u * (3 * 2 + 3 * 2 + 2 * 2));
}
