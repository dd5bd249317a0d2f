#include "semflow/bc.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "semflow/error.hpp"

namespace semflow {

namespace {

bool is_dirichlet(BcKind k) {
  return k == BcKind::NoSlip || k == BcKind::Velocity || k == BcKind::Inflow || k == BcKind::Rotor;
}

}  // namespace

BcKind parse_bc_kind(const std::string& name) {
  if (name == "no_slip" || name == "wall") return BcKind::NoSlip;
  if (name == "velocity") return BcKind::Velocity;
  if (name == "inflow") return BcKind::Inflow;
  if (name == "rotor") return BcKind::Rotor;
  if (name == "outflow") return BcKind::Outflow;
  if (name == "symmetry") return BcKind::Symmetry;
  throw ConfigError("unknown boundary condition type '" + name + "'");
}

std::string to_string(BcKind kind) {
  switch (kind) {
    case BcKind::NoSlip: return "no_slip";
    case BcKind::Velocity: return "velocity";
    case BcKind::Inflow: return "inflow";
    case BcKind::Rotor: return "rotor";
    case BcKind::Outflow: return "outflow";
    case BcKind::Symmetry: return "symmetry";
  }
  return "unknown";
}

double inflow_profile(double y, double u_cl, double h, bool* clamped) {
  // Round-off excursions from mesh coordinates are clamped silently.
  const double slack = 1e-10 * h;
  const bool c = y < -slack || y > h + slack;
  y = std::clamp(y, 0.0, h);
  if (clamped != nullptr) *clamped = c;
  return u_cl * std::pow(y / h, 1.0 / 7.0);
}

double rotor_speed(double y, double u_sp, double delta) {
  if (y <= 0.0) return 0.0;
  if (y >= delta) return u_sp;
  const double q = y / delta;
  return u_sp / (1.0 + std::exp(1.0 / (q - 1.0) + 1.0 / q));
}

Vec3 rotor_velocity(const Vec3& x, const RotorParams& params) {
  const double dx = x[0] - params.center_x;
  const double dz = x[2] - params.center_z;
  const double r = std::hypot(dx, dz);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double s = rotor_speed(x[1], params.alpha * params.u_cl, params.delta);
  // y_hat x r_hat with r_hat = (dx, 0, dz) / r
  return {s * dz / r, 0.0, -s * dx / r};
}

void BoundarySet::add(const std::string& tag, BcSpec spec) {
  if (has(tag)) throw ConfigError("duplicate boundary condition for tag '" + tag + "'");
  if (spec.kind == BcKind::Velocity && !spec.value) throw ConfigError("velocity condition on '" + tag + "' has no value");
  if (spec.kind == BcKind::Inflow && !(spec.inflow.h > 0.0)) throw ConfigError("inflow height must be positive");
  if (spec.kind == BcKind::Rotor && !(spec.rotor.delta > 0.0)) throw ConfigError("rotor delta must be positive");
  order_.push_back(tag);
  specs_.push_back(std::move(spec));
  space_ = nullptr;
}

bool BoundarySet::has(const std::string& tag) const {
  return std::find(order_.begin(), order_.end(), tag) != order_.end();
}

const BcSpec& BoundarySet::get(const std::string& tag) const {
  auto it = std::find(order_.begin(), order_.end(), tag);
  if (it == order_.end()) throw ConfigError("unknown boundary tag '" + tag + "'");
  return specs_[static_cast<std::size_t>(it - order_.begin())];
}

bool BoundarySet::is_outflow(const std::string& tag) const { return get(tag).kind == BcKind::Outflow; }

void BoundarySet::bind(const FunctionSpace& space, const GatherScatter& gs) {
  const auto mesh_tags = boundary_tags(space.mesh());
  for (const auto& t : mesh_tags)
    if (!has(t)) throw ConfigError("no boundary condition given for mesh tag '" + t + "'");
  for (const auto& t : order_)
    if (std::find(mesh_tags.begin(), mesh_tags.end(), t) == mesh_tags.end())
      throw ConfigError("boundary condition for unknown tag '" + t + "'");

  const std::size_t ng = gs.num_global();
  const auto gid = gs.global_ids();
  std::vector<int> dir_best(ng, -1);
  std::vector<int> sym_bits(ng, 0);
  std::vector<char> outflow(ng, 0);
  for (const auto& f : space.facets()) {
    const int si = static_cast<int>(std::find(order_.begin(), order_.end(), f.tag) - order_.begin());
    const BcSpec& spec = specs_[static_cast<std::size_t>(si)];
    int axis = -1;
    if (spec.kind == BcKind::Symmetry) {
      for (std::size_t q = 0; q < f.points.size(); ++q) {
        int a = -1;
        for (int c = 0; c < 3; ++c)
          if (std::abs(f.normal[static_cast<std::size_t>(c)][q]) > 1.0 - 1e-8) a = c;
        if (a < 0 || (axis >= 0 && a != axis))
          throw ConfigError("symmetry facet on tag '" + f.tag + "' (element " + std::to_string(f.element) +
                            ") is not axis-aligned");
        axis = a;
      }
    }
    for (auto p : f.points) {
      const auto g = static_cast<std::size_t>(gid[static_cast<std::size_t>(p)]);
      if (is_dirichlet(spec.kind)) {
        if (dir_best[g] < 0 || si < dir_best[g]) dir_best[g] = si;
      } else if (spec.kind == BcKind::Symmetry) {
        sym_bits[g] |= 1 << axis;
      } else {
        outflow[g] = 1;
      }
    }
  }

  const std::size_t nl = space.num_local();
  for (auto& m : masks_.velocity) m.assign(nl, 1.0);
  masks_.pressure.assign(nl, 1.0);
  masks_.pressure_pinned = false;
  dir_points_.clear();
  dir_spec_.clear();
  sym_points_.clear();
  sym_comp_.clear();
  for (std::size_t l = 0; l < nl; ++l) {
    const auto g = static_cast<std::size_t>(gid[l]);
    if (outflow[g]) {
      masks_.pressure[l] = 0.0;
      masks_.pressure_pinned = true;
    }
    if (dir_best[g] >= 0) {
      for (auto& m : masks_.velocity) m[l] = 0.0;
      dir_points_.push_back(l);
      dir_spec_.push_back(dir_best[g]);
    } else if (sym_bits[g] != 0) {
      for (int c = 0; c < 3; ++c)
        if (sym_bits[g] & (1 << c)) {
          masks_.velocity[static_cast<std::size_t>(c)][l] = 0.0;
          sym_points_.push_back(l);
          sym_comp_.push_back(c);
        }
    }
  }
  space_ = &space;
}

const Masks& BoundarySet::masks() const {
  if (space_ == nullptr) throw std::logic_error("BoundarySet used before bind()");
  return masks_;
}

Vec3 BoundarySet::evaluate(int spec, const Vec3& x, double t) const {
  const BcSpec& s = specs_[static_cast<std::size_t>(spec)];
  switch (s.kind) {
    case BcKind::NoSlip: return {0.0, 0.0, 0.0};
    case BcKind::Velocity: return s.value(x, t);
    case BcKind::Inflow: {
      bool clamped = false;
      const double u = inflow_profile(x[1], s.inflow.u_cl, s.inflow.h, &clamped);
      if (clamped) ++clamp_warnings_;
      return {u, 0.0, 0.0};
    }
    case BcKind::Rotor: return rotor_velocity(x, s.rotor);
    default: return {0.0, 0.0, 0.0};
  }
}

void BoundarySet::apply_dirichlet(VecField& v, double t) const {
  if (space_ == nullptr) throw std::logic_error("BoundarySet used before bind()");
  clamp_warnings_ = 0;
  const FunctionSpace& space = *space_;
  for (std::size_t i = 0; i < dir_points_.size(); ++i) {
    const std::size_t l = dir_points_[i];
    const Vec3 x{space.coord(0)[l], space.coord(1)[l], space.coord(2)[l]};
    const Vec3 val = evaluate(dir_spec_[i], x, t);
    for (std::size_t c = 0; c < 3; ++c) v[c][l] = val[c];
  }
  for (std::size_t i = 0; i < sym_points_.size(); ++i)
    v[static_cast<std::size_t>(sym_comp_[i])][sym_points_[i]] = 0.0;
  if (clamp_warnings_ > 0)
    std::clog << "warning: " << clamp_warnings_ << " inflow points outside [0, h] clamped\n";
}

VecField BoundarySet::lift(double t) const {
  if (space_ == nullptr) throw std::logic_error("BoundarySet used before bind()");
  VecField v = make_vec_field(*space_);
  apply_dirichlet(v, t);
  return v;
}

}  // namespace semflow
