#include "doctest.h"

#include "orosoar/cli.hpp"
#include "orosoar/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace orosoar;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "orosoar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("orosoar_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("JSON round trips") {
  for (const auto& name : aircraft_preset_names()) {
    const Aircraft a = aircraft_preset(name);
    CHECK(aircraft_to_json(aircraft_from_json(aircraft_to_json(a))) == aircraft_to_json(a));
  }
  for (const auto& name : controller_preset_names()) {
    const ControllerConfig c = controller_preset(name);
    const ControllerConfig back = controller_from_json(controller_to_json(c));
    CHECK(back.flags == c.flags);
    CHECK(back.switch_axis == c.switch_axis);
    CHECK(back.kp.isApprox(c.kp, 1e-12));
    CHECK(back.roll_max == doctest::Approx(c.roll_max));
    CHECK(controller_to_json(back) == controller_to_json(c));
  }
  const RampFieldParams ramp;
  CHECK(ramp_to_json(ramp_from_json(ramp_to_json(ramp))) == ramp_to_json(ramp));
  BatchSpec spec;
  spec.n_runs = 17;
  spec.seed = 99;
  const BatchSpec back = batch_from_json(batch_to_json(spec));
  CHECK(back.n_runs == 17);
  CHECK(back.seed == 99);
  CHECK(back.initial_alpha == doctest::Approx(spec.initial_alpha));
}

TEST_CASE("shipped preset files equal the built-ins") {
  const fs::path dir = OROSOAR_CONFIG_DIR;
  for (const auto& name : aircraft_preset_names()) {
    const Aircraft a = load_aircraft((dir / "aircraft" / (name + ".json")).string());
    CHECK(aircraft_to_json(a) == aircraft_to_json(aircraft_preset(name)));
  }
  for (const auto& name : controller_preset_names()) {
    const ControllerConfig c = load_controller((dir / "controller" / (name + ".json")).string());
    CHECK(controller_to_json(c) == controller_to_json(controller_preset(name)));
  }
}

TEST_CASE("unknown names and malformed files") {
  CHECK_THROWS_AS(load_aircraft("no_such_plane"), ConfigError);
  const fs::path dir = scratch("bad_json");
  std::ofstream(dir / "bad.json") << "{ \"mass\": ";
  try {
    load_aircraft((dir / "bad.json").string());
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
}

TEST_CASE("cli: missing aircraft file names the path") {
  const CliResult r = cli({"simulate", "--aircraft", "/nonexistent/plane.json", "--duration", "20"});
  CHECK(r.status == 2);
  CHECK(r.err.find("/nonexistent/plane.json") != std::string::npos);
}

TEST_CASE("cli: simulate is byte-reproducible") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  for (const auto& dir : {a, b}) {
    const CliResult r = cli({"simulate", "--controller", "saos", "--seed", "5", "--duration", "20",
                             "--out", dir.string()});
    REQUIRE(r.status == 0);
  }
  const std::string traj = slurp(a / "trajectory.csv");
  CHECK(traj.substr(0, traj.find('\n')) ==
        "t,x,y,z,vx,vy,vz,phi,theta,psi,throttle,V,alpha,mode");
  CHECK(traj == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "run.json") == slurp(b / "run.json"));
}

TEST_CASE("cli: batch writes a two-row table and identical summaries") {
  const fs::path a = scratch("batch_a"), b = scratch("batch_b");
  CliResult first;
  for (const auto& dir : {a, b}) {
    first = cli({"batch", "--controller", "base", "--controller", "saos", "--refs", "4", "--seed", "3",
                 "--duration", "20", "--out", dir.string()});
    REQUIRE(first.status == 0);
  }
  CHECK(first.out.find("base") != std::string::npos);
  CHECK(first.out.find("saos") != std::string::npos);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(fs::exists(a / "runs.csv"));
}

TEST_CASE("cli: feasibility") {
  const fs::path dir = scratch("feas");
  CHECK(cli({"feasibility", "--grid", "0:1:x,-1:0:3", "--out", dir.string()}).status != 0);
  CHECK(cli({"feasibility", "--grid", "0:1:3", "--out", dir.string()}).status != 0);

  REQUIRE(cli({"feasibility", "--wind", "uniform", "--grid", "0:2:3,-3:-1:3", "--out", dir.string()})
              .status == 0);
  std::istringstream csv(slurp(dir / "feasibility.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "x,z,excess_updraft");
  std::vector<double> values;
  while (std::getline(csv, line)) values.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  REQUIRE(values.size() == 9);
  for (double v : values) CHECK(v == doctest::Approx(values.front()));
  CHECK(values.front() < 0.0);
}

TEST_CASE("cli: malformed grid CSV exits nonzero with the line") {
  const fs::path dir = scratch("grid");
  std::ofstream(dir / "field.csv") << "x,y,z,u,v,w\n0,0,0,1,0,0\n0,0,oops,1,0,0\n";
  const CliResult r = cli({"feasibility", "--wind", (dir / "field.csv").string(), "--out", dir.string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("3") != std::string::npos);
}

TEST_CASE("cli: presets") {
  const fs::path dir = scratch("presets");
  REQUIRE(cli({"presets", "--out", dir.string()}).status == 0);
  CHECK(fs::exists(dir / "aircraft" / "eclipson_c.json"));
  CHECK(fs::exists(dir / "controller" / "saos.json"));
  CHECK(cli({}).status != 0);
}
