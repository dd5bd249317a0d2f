#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "semflow/case_config.hpp"
#include "semflow/driver.hpp"
#include "semflow/error.hpp"
#include "semflow/field_io.hpp"
#include "semflow/mesh_io.hpp"

using namespace semflow;
namespace fs = std::filesystem;

namespace {

const char* kSmallCase = R"({
  "version": 1,
  "name": "small",
  "mesh": {"generator": "box", "extent": [[0, 2], [0, 1], [0, 1]], "counts": [2, 1, 1],
           "tags": ["in", "out", "wall", "wall", "side", "side"]},
  "order": 3,
  "Re": 50,
  "dt": 0.01,
  "steps": 6,
  "solvers": {"pressure": {"tol": 1e-10, "max_iter": 300}, "velocity": {"tol": 1e-12}},
  "boundaries": {
    "in": {"type": "inflow", "u_cl": 1.0, "h": 1.0},
    "wall": {"type": "no_slip"},
    "side": {"type": "symmetry"},
    "out": {"type": "outflow"}
  },
  "forces": {"tag": "wall", "u_cl": 1.0, "h": 1.0, "diameter": 2.0},
  "output": {"checkpoint_every": 3, "fields_every": 3},
  "initial": {"type": "uniform", "velocity": [0.5, 0, 0]},
  "seed": 9
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("semflow_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kSmallCase;
  const auto pos = s.find(from);
  if (pos == std::string::npos) throw std::logic_error("pattern not in case: " + from);
  return s.replace(pos, from.size(), to);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SEMFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(CaseConfig, ParsesSmallCase) {
  const auto c = parse_case(kSmallCase);
  EXPECT_EQ(c.name, "small");
  EXPECT_DOUBLE_EQ(c.nu, 1.0 / 50.0);
  EXPECT_EQ(c.steps, 6);
  EXPECT_EQ(c.order, 3);
  EXPECT_EQ(c.pressure.abs_tol, 1e-10);
  EXPECT_EQ(c.pressure.max_iter, 300);
  ASSERT_EQ(c.boundaries.size(), 4u);
  // File order is kept.
  EXPECT_EQ(c.boundaries[0].tag, "in");
  EXPECT_EQ(c.boundaries[3].kind, BcKind::Outflow);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.initial.type, "uniform");
  EXPECT_EQ(build_mesh(c).num_elements(), 2u);
}

TEST(CaseConfig, EndTimeGivesSteps) {
  const auto c = parse_case(with("\"steps\": 6", "\"end_time\": 0.05"));
  EXPECT_EQ(c.steps, 5);
}

TEST(CaseConfig, RejectsBadInput) {
  EXPECT_THROW(parse_case("{not json"), ConfigError);
  EXPECT_THROW(parse_case(with("\"seed\": 9", "\"seed\": 9, \"colour\": 1")), ConfigError);
  EXPECT_THROW(parse_case(with("\"Re\": 50", "\"Re\": 50, \"nu\": 0.1")), ConfigError);
  EXPECT_THROW(parse_case(with("\"order\": 3", "\"order\": \"three\"")), ConfigError);
  EXPECT_THROW(parse_case(with("\"version\": 1", "\"version\": 7")), ConfigError);
  EXPECT_THROW(parse_case(with("\"type\": \"no_slip\"", "\"type\": \"sticky\"")), ConfigError);
  EXPECT_THROW(parse_case(with("\"dt\": 0.01", "\"dt\": -0.01")), ConfigError);
  try {
    parse_case(with("\"tol\": 1e-10", "\"tol\": 1e-10, \"tolerance\": 1"));
    FAIL() << "unknown key accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("tolerance"), std::string::npos);
  }
}

TEST(CaseConfig, ShippedCasesParse) {
  for (const char* name : {"mini_rotor.json", "taylor_green.json", "zero_flow.json", "flettner_re30000.json"}) {
    const auto c = load_case(fs::path(SEMFLOW_CASES_DIR) / name);
    EXPECT_NO_THROW(c.validate()) << name;
  }
}

TEST(FieldIo, VtkHasOneCellPerSubHex) {
  const auto dir = scratch("vtk");
  const auto mesh = std::make_shared<Mesh>(gen_box_mesh({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {2, 1, 1},
                                                        {"a", "a", "a", "a", "a", "a"}));
  const FunctionSpace space(mesh, 3);
  const std::vector<double> p(space.num_local(), 2.5);
  const VecField v = make_vec_field(space, 1.0);
  write_vtk(space, dir / "f.vtk", {{"p", p}}, {{"velocity", &v}});
  std::ifstream in(dir / "f.vtk");
  std::string word;
  long points = -1, cells = -1, types = -1, constant = 0;
  bool in_p = false;
  while (in >> word) {
    if (word == "POINTS") in >> points;
    if (word == "CELLS") in >> cells;
    if (word == "CELL_TYPES") in >> types;
    if (word == "SCALARS") in_p = true;
    if (word == "VECTORS") in_p = false;
    if (in_p && word == "2.5") ++constant;
  }
  EXPECT_EQ(points, 128);
  EXPECT_EQ(cells, 2 * 27);
  EXPECT_EQ(types, 2 * 27);
  EXPECT_EQ(constant, 128);
}

TEST(FieldIo, CheckpointRoundTrip) {
  Checkpoint cp;
  cp.num_elements = 2;
  cp.order = 1;
  cp.dt = 0.125;
  cp.state.t = 0.375;
  cp.state.step = 3;
  cp.state.levels = 2;
  for (std::size_t q = 0; q < 3; ++q)
    for (std::size_t c = 0; c < 3; ++c) {
      cp.state.v[q][c] = std::vector<double>(16, 0.1 * static_cast<double>(q) + static_cast<double>(c));
      cp.state.e[q][c] = std::vector<double>(16, -1.0 / 3.0);
    }
  cp.state.p.assign(16, 1e-300);
  cp.pressure_projection = StoredProjection{{std::vector<double>(16, 1.0)}, {std::vector<double>(16, 2.0)}, 4};
  TrippingState ts;
  ts.segment = 5;
  ts.current.phase = {0.1, 0.2};
  ts.next.phase = {0.3, 0.4};
  ts.steady.phase = {0.5, 0.6};
  ts.last_time = 0.7;
  ts.draws = 7;
  cp.tripping = ts;
  const auto bytes = encode_checkpoint(cp);
  const auto back = decode_checkpoint(bytes);
  EXPECT_EQ(back.num_elements, 2u);
  EXPECT_EQ(back.dt, 0.125);
  EXPECT_EQ(back.state.step, 3);
  EXPECT_EQ(back.state.levels, 2);
  EXPECT_EQ(back.state.v[2][1], cp.state.v[2][1]);
  EXPECT_EQ(back.state.e[0][0], cp.state.e[0][0]);
  EXPECT_EQ(back.state.p, cp.state.p);
  ASSERT_TRUE(back.pressure_projection.has_value());
  EXPECT_EQ(back.pressure_projection->steps, 4);
  EXPECT_EQ(back.pressure_projection->ax, cp.pressure_projection->ax);
  EXPECT_FALSE(back.velocity_projection[0].has_value());
  ASSERT_TRUE(back.tripping.has_value());
  EXPECT_EQ(back.tripping->next.phase, ts.next.phase);
  EXPECT_EQ(back.tripping->draws, 7);
  EXPECT_EQ(encode_checkpoint(back), bytes);

  auto bad = bytes;
  bad[8] = 99;
  EXPECT_THROW(decode_checkpoint(bad), ParseError);
  bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), ParseError);
  bad.assign(bytes.begin(), bytes.end() - 5);
  EXPECT_THROW(decode_checkpoint(bad), ParseError);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(decode_checkpoint(bad), ParseError);
}

TEST(Driver, RunWritesOutputsAndRestartsExactly) {
  const auto cfg = parse_case(kSmallCase);
  const auto full = scratch("full");
  RunOptions o;
  o.output_dir = full;
  const auto s = run_case(cfg, o);
  EXPECT_EQ(s.final_step, 6);
  EXPECT_EQ(s.unconverged_solves, 0);
  for (const char* f : {"diagnostics.csv", "timing.csv", "forces.csv", "forces_stats.csv", "fields_00000003.vtk",
                        "fields_00000006.vtk", "checkpoint_00000003.chk", "checkpoint_00000006.chk"})
    EXPECT_TRUE(fs::exists(full / f)) << f;
  EXPECT_TRUE(slurp(full / "diagnostics.csv").starts_with("step,time,order,cfl,p_iters"));
  EXPECT_TRUE(slurp(full / "forces.csv").starts_with("time,Fx_p,Fy_p,Fz_p,Fx_v,Fy_v,Fz_v,C_d,C_l"));

  const auto half = scratch("restart");
  RunOptions r;
  r.output_dir = half;
  r.restart = full / "checkpoint_00000003.chk";
  const auto s2 = run_case(cfg, r);
  EXPECT_EQ(s2.first_step, 3);
  EXPECT_EQ(s2.final_step, 6);
  EXPECT_EQ(slurp(half / "checkpoint_00000006.chk"), slurp(full / "checkpoint_00000006.chk"));

  // A checkpoint from a different discretization is refused.
  auto other = parse_case(with("\"order\": 3", "\"order\": 4"));
  RunOptions bad;
  bad.output_dir = scratch("mismatch");
  bad.restart = full / "checkpoint_00000003.chk";
  EXPECT_THROW(run_case(other, bad), ConfigError);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  {
    std::ofstream(dir / "small.json") << kSmallCase;
    std::ofstream(dir / "broken.json") << with("\"seed\": 9", "\"seed\": 9, \"bogus\": true");
  }
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("--output-dir " + (dir / "out").string() + " run " + (dir / "small.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "diagnostics.csv"));
  EXPECT_EQ(run_cli("run " + (dir / "broken.json").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "missing.json").string()), 2);
  EXPECT_NE(run_cli("frobnicate"), 0);
  EXPECT_EQ(run_cli("meshgen box --extent 0 1 0 1 0 1 --counts 2 2 2 --tags a a b b c c -o " +
                    (dir / "box.mesh").string()),
            0);
  const auto m = read_mesh(dir / "box.mesh");
  EXPECT_EQ(m.num_elements(), 8u);
}
