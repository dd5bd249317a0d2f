#include "semflow/mesh_io.hpp"

#include <fstream>
#include <iterator>
#include <map>

#include <json.hpp>

#include "semflow/binary.hpp"
#include "semflow/error.hpp"

namespace semflow {
namespace binary {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace binary

namespace {
constexpr std::string_view kMagic = "SEMFLOWM";
}

std::vector<std::uint8_t> encode_mesh(const Mesh& mesh) {
  std::vector<std::string> tags = boundary_tags(mesh);
  std::map<std::string, std::int32_t> tag_index;
  for (std::size_t i = 0; i < tags.size(); ++i) tag_index[tags[i]] = static_cast<std::int32_t>(i);

  nlohmann::ordered_json header;
  header["version"] = kMeshFormatVersion;
  header["endianness"] = "little";
  header["num_vertices"] = mesh.vertices.size();
  header["num_elements"] = mesh.elements.size();
  header["num_facets"] = mesh.boundary_facets.size();
  header["num_curved"] = mesh.curved.size();
  header["tags"] = tags;
  const std::string text = header.dump();

  binary::Writer w;
  w.bytes(kMagic);
  w.u32(kMeshFormatVersion);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text);
  w.bytes("VERT");
  for (const auto& v : mesh.vertices)
    for (double c : v) w.f64(c);
  w.bytes("ELEM");
  for (const auto& e : mesh.elements)
    for (auto v : e) w.i64(v);
  w.bytes("FACE");
  for (const auto& f : mesh.boundary_facets) {
    w.i64(f.element);
    w.i32(f.face);
    w.i32(tag_index.at(f.tag));
  }
  w.bytes("CURV");
  for (const auto& [e, rec] : mesh.curved) {
    w.i64(e);
    w.i32(rec.order);
    for (const auto& x : rec.nodes)
      for (double c : x) w.f64(c);
  }
  w.bytes("END.");
  return std::move(w.buffer());
}

Mesh decode_mesh(const std::vector<std::uint8_t>& bytes) {
  binary::Reader r(bytes);
  r.section("magic");
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic)
    throw ParseError("not a semflow mesh file (bad magic)", 0);
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kMeshFormatVersion)
    throw ParseError("unsupported mesh format version " + std::to_string(version), version_at);
  const std::uint32_t hlen = r.u32();
  const std::size_t header_at = r.offset();
  const std::string text = r.bytes(hlen);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed header: ") + ex.what(), header_at);
  }
  std::size_t nv = 0, ne = 0, nf = 0, nc = 0;
  std::vector<std::string> tags;
  try {
    if (header.at("version").get<std::uint32_t>() != version)
      throw ParseError("header version disagrees with binary version", header_at);
    if (header.at("endianness").get<std::string>() != "little")
      throw ParseError("unsupported endianness", header_at);
    nv = header.at("num_vertices").get<std::size_t>();
    ne = header.at("num_elements").get<std::size_t>();
    nf = header.at("num_facets").get<std::size_t>();
    nc = header.at("num_curved").get<std::size_t>();
    tags = header.at("tags").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed header: ") + ex.what(), header_at);
  }

  Mesh mesh;
  r.expect("VERT");
  r.need(nv * 24);
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices)
    for (double& c : v) c = r.f64();

  r.expect("ELEM");
  r.need(ne * 64);
  mesh.elements.resize(ne);
  for (auto& e : mesh.elements)
    for (auto& v : e) {
      const std::size_t at = r.offset();
      v = r.i64();
      if (v < 0 || static_cast<std::size_t>(v) >= nv)
        throw ParseError("element references vertex " + std::to_string(v) + " beyond num_vertices", at);
    }

  r.expect("FACE");
  r.need(nf * 16);
  mesh.boundary_facets.resize(nf);
  for (auto& f : mesh.boundary_facets) {
    const std::size_t at = r.offset();
    f.element = r.i64();
    f.face = r.i32();
    const std::int32_t ti = r.i32();
    if (f.element < 0 || static_cast<std::size_t>(f.element) >= ne || f.face < 0 || f.face > 5 ||
        ti < 0 || static_cast<std::size_t>(ti) >= tags.size())
      throw ParseError("inconsistent facet record", at);
    f.tag = tags[static_cast<std::size_t>(ti)];
  }

  r.expect("CURV");
  for (std::size_t i = 0; i < nc; ++i) {
    const std::size_t at = r.offset();
    const std::int64_t e = r.i64();
    const std::int32_t order = r.i32();
    if (e < 0 || static_cast<std::size_t>(e) >= ne || order < 1 || order > 64)
      throw ParseError("inconsistent curved-geometry record", at);
    CurvedElement rec;
    rec.order = order;
    const std::size_t np = static_cast<std::size_t>(order) + 1;
    r.need(np * np * np * 24);
    rec.nodes.resize(np * np * np);
    for (auto& x : rec.nodes)
      for (double& c : x) c = r.f64();
    if (!mesh.curved.emplace(e, std::move(rec)).second)
      throw ParseError("duplicate curved-geometry record for element " + std::to_string(e), at);
  }
  r.expect("END.");
  if (r.remaining() != 0) throw ParseError("trailing bytes after END section", r.offset());
  return mesh;
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  binary::write_file(path.string(), encode_mesh(mesh));
}

Mesh read_mesh(const std::filesystem::path& path) {
  return decode_mesh(binary::read_file(path.string()));
}

}  // namespace semflow
