#include "semflow/case_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semflow/error.hpp"
#include "semflow/mesh_io.hpp"
#include "semflow/studies.hpp"

namespace semflow {

namespace {

using Json = nlohmann::ordered_json;

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("case key '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ConfigError("unknown case key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <typename T>
T get(const Json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("case key '" + (where.empty() ? std::string(key) : where + "." + key) + "' has the wrong type");
  }
}

Interval interval(const Json& obj, const char* key, const std::string& where, Interval fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(obj, key, where, {});
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("case key '" + where + "." + key + "' must be [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

Vec3 vec3(const Json& obj, const char* key, const std::string& where, Vec3 fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(obj, key, where, {});
  if (v.size() != 3) throw ConfigError("case key '" + where + "." + key + "' must have three entries");
  return {v[0], v[1], v[2]};
}

void parse_mesh(const Json& j, MeshSpec& m) {
  const std::string w = "mesh";
  if (j.contains("file")) {
    check_keys(j, w, {"file"});
    m.file = get<std::string>(j, "file", w, "");
    return;
  }
  m.generator = get<std::string>(j, "generator", w, "");
  if (m.generator == "box") {
    check_keys(j, w, {"generator", "extent", "counts", "tags"});
    if (j.contains("extent")) {
      const auto e = get<std::vector<std::vector<double>>>(j, "extent", w, {});
      if (e.size() != 3) throw ConfigError("case key 'mesh.extent' must hold three intervals");
      for (std::size_t d = 0; d < 3; ++d) {
        if (e[d].size() != 2 || !(e[d][0] < e[d][1])) throw ConfigError("case key 'mesh.extent' has an invalid interval");
        m.box_extent[d] = {e[d][0], e[d][1]};
      }
    }
    if (j.contains("counts")) {
      const auto c = get<std::vector<int>>(j, "counts", w, {});
      if (c.size() != 3) throw ConfigError("case key 'mesh.counts' must have three entries");
      for (std::size_t d = 0; d < 3; ++d) m.box_counts[d] = c[d];
    }
    if (j.contains("tags")) {
      const auto t = get<std::vector<std::string>>(j, "tags", w, {});
      if (t.size() != 6) throw ConfigError("case key 'mesh.tags' must have six entries");
      for (std::size_t d = 0; d < 6; ++d) m.box_tags[d] = t[d];
    }
  } else if (m.generator == "cylinder") {
    check_keys(j, w, {"generator", "diameter", "x", "y", "z", "square_half_width", "azimuthal", "radial", "vertical",
                      "upstream", "downstream", "side", "geometry_order"});
    auto& p = m.cylinder;
    p.diameter = get<double>(j, "diameter", w, p.diameter);
    p.x = interval(j, "x", w, p.x);
    p.y = interval(j, "y", w, p.y);
    p.z = interval(j, "z", w, p.z);
    p.square_half_width = get<double>(j, "square_half_width", w, p.square_half_width);
    p.azimuthal = get<int>(j, "azimuthal", w, p.azimuthal);
    p.radial = get<int>(j, "radial", w, p.radial);
    p.vertical = get<int>(j, "vertical", w, p.vertical);
    p.upstream = get<int>(j, "upstream", w, p.upstream);
    p.downstream = get<int>(j, "downstream", w, p.downstream);
    p.side = get<int>(j, "side", w, p.side);
    p.geometry_order = get<int>(j, "geometry_order", w, p.geometry_order);
  } else {
    throw ConfigError("case key 'mesh' needs 'file' or a generator of 'box' or 'cylinder'");
  }
}

BcEntry parse_bc(const std::string& tag, const Json& j) {
  const std::string w = "boundaries." + tag;
  BcEntry b;
  b.tag = tag;
  b.kind = parse_bc_kind(get<std::string>(j, "type", w, ""));
  switch (b.kind) {
    case BcKind::Inflow:
      check_keys(j, w, {"type", "u_cl", "h"});
      b.inflow.u_cl = get<double>(j, "u_cl", w, b.inflow.u_cl);
      b.inflow.h = get<double>(j, "h", w, b.inflow.h);
      break;
    case BcKind::Rotor: {
      check_keys(j, w, {"type", "alpha", "u_cl", "delta", "center"});
      b.rotor.alpha = get<double>(j, "alpha", w, b.rotor.alpha);
      b.rotor.u_cl = get<double>(j, "u_cl", w, b.rotor.u_cl);
      b.rotor.delta = get<double>(j, "delta", w, b.rotor.delta);
      const auto c = get<std::vector<double>>(j, "center", w, {b.rotor.center_x, b.rotor.center_z});
      if (c.size() != 2) throw ConfigError("case key '" + w + ".center' must be [x, z]");
      b.rotor.center_x = c[0];
      b.rotor.center_z = c[1];
      break;
    }
    case BcKind::Velocity:
      check_keys(j, w, {"type", "value", "function"});
      b.value = vec3(j, "value", w, b.value);
      b.function = get<std::string>(j, "function", w, "");
      if (!b.function.empty() && b.function != "taylor_green")
        throw ConfigError("case key '" + w + ".function' must be 'taylor_green'");
      break;
    default:
      check_keys(j, w, {"type"});
  }
  return b;
}

}  // namespace

void CaseConfig::validate() const {
  if (version != kCaseFormatVersion) throw ConfigError("unsupported case version " + std::to_string(version));
  if (order < 1 || order > 12) throw ConfigError("order must be in 1..12");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (scheme_order < 1 || scheme_order > 3) throw ConfigError("scheme_order must be 1, 2 or 3");
  try {
    pressure.validate();
    velocity.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  if (pressure_projection < 0 || velocity_projection < 0) throw ConfigError("projection capacity must be >= 0");
  if (output.diagnostics_every < 1 || output.forces_every < 1) throw ConfigError("output cadences must be >= 1");
  if (output.fields_every < 0 || output.checkpoint_every < 0) throw ConfigError("output cadences must be >= 0");
  if (tripping) tripping->validate();
  if (!forces.tag.empty() && !(forces.u_cl > 0.0 && forces.h > 0.0 && forces.diameter > 0.0))
    throw ConfigError("force normalization parameters must be positive");
  if (initial.type != "zero" && initial.type != "uniform" && initial.type != "taylor_green")
    throw ConfigError("initial.type must be zero, uniform or taylor_green");
}

CaseConfig parse_case(const std::string& text, const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(std::string("case file is not valid JSON: ") + ex.what());
  }
  check_keys(j, "", {"version", "name", "mesh", "order", "nu", "Re", "dt", "steps", "end_time", "scheme_order",
                     "dealias", "solvers", "boundaries", "tripping", "forces", "output", "initial", "seed"});
  CaseConfig c;
  c.base_dir = base_dir;
  if (!j.contains("version")) throw ConfigError("case key 'version' is required");
  c.version = get<int>(j, "version", "", 0);
  c.name = get<std::string>(j, "name", "", c.name);
  if (!j.contains("mesh")) throw ConfigError("case key 'mesh' is required");
  parse_mesh(j.at("mesh"), c.mesh);
  c.order = get<int>(j, "order", "", c.order);
  if (j.contains("nu") && j.contains("Re")) throw ConfigError("give either 'nu' or 'Re', not both");
  if (j.contains("Re")) {
    const double re = get<double>(j, "Re", "", 0.0);
    if (!(re > 0.0)) throw ConfigError("case key 'Re' must be positive");
    c.nu = 1.0 / re;
  } else {
    c.nu = get<double>(j, "nu", "", c.nu);
  }
  c.dt = get<double>(j, "dt", "", c.dt);
  if (j.contains("steps") && j.contains("end_time")) throw ConfigError("give either 'steps' or 'end_time', not both");
  if (j.contains("end_time")) {
    const double te = get<double>(j, "end_time", "", 0.0);
    if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
    c.steps = static_cast<std::int64_t>(std::llround(te / c.dt));
  } else {
    c.steps = get<std::int64_t>(j, "steps", "", c.steps);
  }
  c.scheme_order = get<int>(j, "scheme_order", "", c.scheme_order);
  c.dealias = get<bool>(j, "dealias", "", c.dealias);
  if (j.contains("solvers")) {
    const Json& s = j.at("solvers");
    check_keys(s, "solvers", {"pressure", "velocity"});
    if (s.contains("pressure")) {
      const Json& p = s.at("pressure");
      const std::string w = "solvers.pressure";
      check_keys(p, w, {"tol", "max_iter", "restart", "projection", "preconditioner"});
      c.pressure.abs_tol = get<double>(p, "tol", w, c.pressure.abs_tol);
      c.pressure.max_iter = get<int>(p, "max_iter", w, c.pressure.max_iter);
      c.pressure.restart_m = get<int>(p, "restart", w, c.pressure.restart_m);
      c.pressure_projection = get<int>(p, "projection", w, c.pressure_projection);
      const auto pc = get<std::string>(p, "preconditioner", w, "schwarz");
      if (pc != "schwarz" && pc != "jacobi") throw ConfigError("case key 'solvers.pressure.preconditioner' must be schwarz or jacobi");
      c.schwarz = pc == "schwarz";
    }
    if (s.contains("velocity")) {
      const Json& v = s.at("velocity");
      const std::string w = "solvers.velocity";
      check_keys(v, w, {"tol", "max_iter", "projection"});
      c.velocity.abs_tol = get<double>(v, "tol", w, c.velocity.abs_tol);
      c.velocity.max_iter = get<int>(v, "max_iter", w, c.velocity.max_iter);
      c.velocity_projection = get<int>(v, "projection", w, c.velocity_projection);
    }
  }
  if (j.contains("boundaries")) {
    const Json& b = j.at("boundaries");
    if (!b.is_object()) throw ConfigError("case key 'boundaries' must be an object");
    for (const auto& [tag, spec] : b.items()) c.boundaries.push_back(parse_bc(tag, spec));
  }
  c.seed = get<std::uint64_t>(j, "seed", "", c.seed);
  if (j.contains("tripping")) {
    const Json& t = j.at("tripping");
    const std::string w = "tripping";
    check_keys(t, w, {"x0", "lx", "ly", "z", "Ts", "Tu", "ts", "modes"});
    TrippingConfig tc;
    tc.x0 = get<double>(t, "x0", w, tc.x0);
    tc.lx = get<double>(t, "lx", w, tc.lx);
    tc.ly = get<double>(t, "ly", w, tc.ly);
    const Interval z = interval(t, "z", w, Interval{tc.z_min, tc.z_max});
    tc.z_min = z.lo;
    tc.z_max = z.hi;
    tc.ts_amp = get<double>(t, "Ts", w, tc.ts_amp);
    tc.tu_amp = get<double>(t, "Tu", w, tc.tu_amp);
    tc.t_s = get<double>(t, "ts", w, tc.t_s);
    tc.n_modes = get<int>(t, "modes", w, tc.n_modes);
    tc.seed = c.seed;
    c.tripping = tc;
  }
  if (j.contains("forces")) {
    const Json& f = j.at("forces");
    const std::string w = "forces";
    check_keys(f, w, {"tag", "u_cl", "h", "diameter", "symmetric_stress", "normal"});
    c.forces.tag = get<std::string>(f, "tag", w, "");
    c.forces.u_cl = get<double>(f, "u_cl", w, c.forces.u_cl);
    c.forces.h = get<double>(f, "h", w, c.forces.h);
    c.forces.diameter = get<double>(f, "diameter", w, c.forces.diameter);
    c.forces.symmetric_stress = get<bool>(f, "symmetric_stress", w, false);
    const auto n = get<std::string>(f, "normal", w, "body");
    if (n != "body" && n != "domain") throw ConfigError("case key 'forces.normal' must be body or domain");
    c.forces.body_normal = n == "body";
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    const std::string w = "output";
    check_keys(o, w, {"diagnostics_every", "forces_every", "fields_every", "checkpoint_every"});
    c.output.diagnostics_every = get<int>(o, "diagnostics_every", w, c.output.diagnostics_every);
    c.output.forces_every = get<int>(o, "forces_every", w, c.output.forces_every);
    c.output.fields_every = get<int>(o, "fields_every", w, c.output.fields_every);
    c.output.checkpoint_every = get<int>(o, "checkpoint_every", w, c.output.checkpoint_every);
  }
  if (j.contains("initial")) {
    const Json& i = j.at("initial");
    check_keys(i, "initial", {"type", "velocity"});
    c.initial.type = get<std::string>(i, "type", "initial", c.initial.type);
    c.initial.velocity = vec3(i, "velocity", "initial", c.initial.velocity);
  }
  c.validate();
  return c;
}

CaseConfig load_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read case file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str(), path.parent_path());
}

Mesh build_mesh(const CaseConfig& config) {
  const MeshSpec& m = config.mesh;
  if (!m.file.empty()) {
    std::filesystem::path p = m.file;
    if (p.is_relative()) p = config.base_dir / p;
    return read_mesh(p);
  }
  if (m.generator == "box") return gen_box_mesh(m.box_extent, m.box_counts, m.box_tags);
  return gen_cylinder_box_mesh(m.cylinder);
}

BoundarySet build_boundaries(const CaseConfig& config) {
  BoundarySet set;
  for (const auto& b : config.boundaries) {
    BcSpec s;
    s.kind = b.kind;
    s.inflow = b.inflow;
    s.rotor = b.rotor;
    if (b.kind == BcKind::Velocity) {
      if (b.function == "taylor_green") {
        const double nu = config.nu;
        s.value = [nu](const Vec3& x, double t) { return taylor_green_velocity(x, t, nu); };
      } else {
        const Vec3 v = b.value;
        s.value = [v](const Vec3&, double) { return v; };
      }
    }
    set.add(b.tag, std::move(s));
  }
  return set;
}

FlowParams flow_params(const CaseConfig& config) {
  FlowParams p;
  p.nu = config.nu;
  p.dt = config.dt;
  p.order = config.scheme_order;
  p.dealias = config.dealias;
  p.pressure = config.pressure;
  p.velocity = config.velocity;
  p.pressure_projection = config.pressure_projection;
  p.velocity_projection = config.velocity_projection;
  p.schwarz = config.schwarz;
  return p;
}

}  // namespace semflow
