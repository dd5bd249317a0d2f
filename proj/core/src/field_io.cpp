#include "semflow/field_io.hpp"

#include <cstdio>
#include <fstream>

#include "semflow/binary.hpp"
#include "semflow/error.hpp"

namespace semflow {

namespace {

constexpr std::string_view kMagic = "SEMFLOWC";

void put_number(std::ofstream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

void put_array(binary::Writer& w, const std::vector<double>& a) {
  w.u64(a.size());
  for (double v : a) w.f64(v);
}

std::vector<double> get_array(binary::Reader& r) {
  const std::uint64_t n = r.u64();
  r.need(n * 8);
  std::vector<double> a(n);
  for (auto& v : a) v = r.f64();
  return a;
}

void put_projection(binary::Writer& w, const std::optional<StoredProjection>& p) {
  w.u32(p ? 1U : 0U);
  if (!p) return;
  w.i32(p->steps);
  w.u64(p->x.size());
  for (std::size_t k = 0; k < p->x.size(); ++k) {
    put_array(w, p->x[k]);
    put_array(w, p->ax[k]);
  }
}

std::optional<StoredProjection> get_projection(binary::Reader& r) {
  if (r.u32() == 0) return std::nullopt;
  StoredProjection p;
  p.steps = r.i32();
  const std::uint64_t n = r.u64();
  for (std::uint64_t k = 0; k < n; ++k) {
    p.x.push_back(get_array(r));
    p.ax.push_back(get_array(r));
  }
  return p;
}

void put_modes(binary::Writer& w, const TripModes& m) { put_array(w, m.phase); }
TripModes get_modes(binary::Reader& r) { return TripModes{get_array(r)}; }

std::optional<StoredProjection> capture(const ProjectionSpace* p) {
  if (p == nullptr) return std::nullopt;
  return StoredProjection{p->basis(), p->applied(), p->steps_since_reset()};
}

}  // namespace

void write_vtk(const FunctionSpace& space, const std::filesystem::path& path,
               const std::vector<ScalarOutput>& scalars, const std::vector<VectorOutput>& vectors) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  const std::size_t nl = space.num_local();
  const std::size_t ne = space.num_elements();
  const int n = space.order();
  const std::size_t cells = ne * static_cast<std::size_t>(n * n * n);

  out << "# vtk DataFile Version 3.0\nsemflow\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nl << " double\n";
  for (std::size_t i = 0; i < nl; ++i) {
    put_number(out, space.coord(0)[i]);
    out << ' ';
    put_number(out, space.coord(1)[i]);
    out << ' ';
    put_number(out, space.coord(2)[i]);
    out << '\n';
  }
  out << "CELLS " << cells << ' ' << cells * 9 << '\n';
  for (std::size_t e = 0; e < ne; ++e)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          out << 8 << ' ' << space.index(e, i, j, k) << ' ' << space.index(e, i + 1, j, k) << ' '
              << space.index(e, i + 1, j + 1, k) << ' ' << space.index(e, i, j + 1, k) << ' '
              << space.index(e, i, j, k + 1) << ' ' << space.index(e, i + 1, j, k + 1) << ' '
              << space.index(e, i + 1, j + 1, k + 1) << ' ' << space.index(e, i, j + 1, k + 1) << '\n';
        }
  out << "CELL_TYPES " << cells << '\n';
  for (std::size_t c = 0; c < cells; ++c) out << "12\n";
  if (scalars.empty() && vectors.empty()) return;
  out << "POINT_DATA " << nl << '\n';
  for (const auto& s : scalars) {
    space.check_size(s.values.size(), s.name.c_str());
    out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : s.values) {
      put_number(out, v);
      out << '\n';
    }
  }
  for (const auto& v : vectors) {
    for (const auto& c : *v.values) space.check_size(c.size(), v.name.c_str());
    out << "VECTORS " << v.name << " double\n";
    for (std::size_t i = 0; i < nl; ++i) {
      put_number(out, (*v.values)[0][i]);
      out << ' ';
      put_number(out, (*v.values)[1][i]);
      out << ' ';
      put_number(out, (*v.values)[2][i]);
      out << '\n';
    }
  }
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& cp) {
  const FlowState& s = cp.state;
  binary::Writer w;
  w.bytes(kMagic);
  w.u32(kCheckpointFormatVersion);
  w.bytes("HEAD");
  w.u64(cp.num_elements);
  w.i32(cp.order);
  w.f64(cp.dt);
  w.f64(s.t);
  w.i64(s.step);
  w.i32(s.levels);
  w.i32(cp.velocity_projection_order);
  w.bytes("VELO");
  for (const auto& level : s.v)
    for (const auto& c : level) put_array(w, c);
  w.bytes("EXPL");
  for (const auto& level : s.e)
    for (const auto& c : level) put_array(w, c);
  w.bytes("PRES");
  put_array(w, s.p);
  w.bytes("PROJ");
  put_projection(w, cp.pressure_projection);
  for (const auto& p : cp.velocity_projection) put_projection(w, p);
  w.bytes("TRIP");
  w.u32(cp.tripping ? 1U : 0U);
  if (cp.tripping) {
    const TrippingState& t = *cp.tripping;
    w.i64(t.segment);
    w.f64(t.last_time);
    w.i64(t.draws);
    put_modes(w, t.current);
    put_modes(w, t.next);
    put_modes(w, t.steady);
  }
  w.bytes("END.");
  return std::move(w.buffer());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  binary::Reader r(bytes);
  r.section("magic");
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) throw ParseError("not a checkpoint file", 0);
  const std::size_t vat = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointFormatVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version), vat);
  Checkpoint cp;
  FlowState& s = cp.state;
  r.expect("HEAD");
  cp.num_elements = r.u64();
  cp.order = r.i32();
  cp.dt = r.f64();
  s.t = r.f64();
  s.step = r.i64();
  const std::size_t lat = r.offset();
  s.levels = r.i32();
  if (s.levels < 1 || s.levels > 3) throw ParseError("history levels out of range", lat);
  cp.velocity_projection_order = r.i32();
  r.expect("VELO");
  for (auto& level : s.v)
    for (auto& c : level) c = get_array(r);
  r.expect("EXPL");
  for (auto& level : s.e)
    for (auto& c : level) c = get_array(r);
  r.expect("PRES");
  s.p = get_array(r);
  r.expect("PROJ");
  cp.pressure_projection = get_projection(r);
  for (auto& p : cp.velocity_projection) p = get_projection(r);
  r.expect("TRIP");
  if (r.u32() != 0) {
    TrippingState t;
    t.segment = r.i64();
    t.last_time = r.f64();
    t.draws = r.i64();
    t.current = get_modes(r);
    t.next = get_modes(r);
    t.steady = get_modes(r);
    cp.tripping = std::move(t);
  }
  r.expect("END.");
  if (r.remaining() != 0) throw ParseError("trailing bytes after END.", r.offset());
  return cp;
}

void write_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
  binary::write_file(path.string(), encode_checkpoint(cp));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(binary::read_file(path.string())); }

Checkpoint make_checkpoint(FlowSolver& solver, const FlowState& state, const VolumeForcing* forcing) {
  Checkpoint cp;
  cp.num_elements = solver.space().num_elements();
  cp.order = solver.space().order();
  cp.dt = solver.params().dt;
  cp.state = state;
  cp.pressure_projection = capture(solver.pressure_projection());
  const auto vp = solver.velocity_projections();
  for (std::size_t c = 0; c < 3; ++c) cp.velocity_projection[c] = capture(vp[c]);
  cp.velocity_projection_order = solver.velocity_projection_order();
  if (forcing != nullptr && forcing->tripping()) cp.tripping = forcing->tripping_state();
  return cp;
}

FlowState restore_checkpoint(const Checkpoint& cp, FlowSolver& solver, VolumeForcing* forcing) {
  const FunctionSpace& space = solver.space();
  if (cp.num_elements != space.num_elements() || cp.order != space.order())
    throw ConfigError("checkpoint was written for a different mesh or order");
  if (cp.dt != solver.params().dt) throw ConfigError("checkpoint was written with a different time step");
  const std::size_t nl = space.num_local();
  auto check = [nl](const std::vector<double>& a) {
    if (a.size() != nl) throw ConfigError("checkpoint field size does not match the space");
  };
  for (const auto& level : cp.state.v)
    for (const auto& c : level) check(c);
  for (const auto& level : cp.state.e)
    for (const auto& c : level) check(c);
  check(cp.state.p);

  auto restore = [&](ProjectionSpace* target, const std::optional<StoredProjection>& src) {
    if (target == nullptr) return;
    if (src) target->restore(src->x, src->ax, src->steps);
    else target->invalidate();
  };
  restore(solver.pressure_projection(), cp.pressure_projection);
  const auto vp = solver.velocity_projections();
  for (std::size_t c = 0; c < 3; ++c) restore(vp[c], cp.velocity_projection[c]);
  solver.set_velocity_projection_order(cp.velocity_projection_order);
  if (forcing != nullptr && forcing->tripping()) {
    if (!cp.tripping) throw ConfigError("checkpoint has no tripping state but the case enables tripping");
    forcing->restore_tripping(*cp.tripping);
  }
  return cp.state;
}

}  // namespace semflow
