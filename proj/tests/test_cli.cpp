#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orbitgrasp/dynamics.hpp"
#include "support.hpp"

using namespace orbitgrasp;
using namespace orbitgrasp::testing;
namespace fs = std::filesystem;

namespace {

// Compressed close scenario so that full runs stay short.
const char* kShort =
    " --set timeline.t_start=0.2 --set timeline.t_point=1.5 --set timeline.t_grasp=2.5"
    " --set sim.hold=0.2";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("orbitgrasp_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + ORBITGRASP_BIN + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LinearizedPlant read_plant(const fs::path& p) {
  std::ifstream in(p);
  return read_linearized(in);
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("") == 1);
  CHECK(run("bogus") == 1);
  CHECK(run("run") == 1);
  CHECK(run("run /nonexistent/missing.cfg") == 1);
  CHECK(run("validate /nonexistent/missing.cfg") == 1);
  CHECK(run("run " + scenario_path("close.cfg") + " --set nosuch.key=1") == 1);
  CHECK(run("run " + scenario_path("close.cfg") + " --set sim.dt=-1") == 1);
  CHECK(run("run " + scenario_path("close.cfg") + " extra") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("validate") {
  CHECK(run("validate " + scenario_path("close.cfg")) == 0);
  CHECK(run("validate " + scenario_path("far.cfg")) == 0);
  CHECK(run("validate " + scenario_path("close.cfg") + " --set outer.delta=1.5") == 1);
}

TEST_CASE("run writes telemetry and metrics") {
  TempDir tmp;
  const int code = run("run " + scenario_path("close.cfg") + kShort + " --out " + tmp.path.string());
  CHECK((code == 0 || code == 2));
  const std::string csv = slurp(tmp.path / "close.csv");
  const std::string metrics = slurp(tmp.path / "close.metrics");
  CHECK(csv.rfind("t,p_err_x", 0) == 0);
  CHECK(metrics.find("captured = " + std::string(code == 0 ? "true" : "false")) !=
        std::string::npos);

  // Output directory from the environment when --out is absent.
  TempDir env_dir;
  fs::remove_all(env_dir.path);
  fs::create_directories(env_dir.path / "sub");
  CHECK(run("run " + scenario_path("close.cfg") + kShort + " --quiet",
            "ORBITGRASP_OUT=" + (env_dir.path / "sub").string()) == code);
  CHECK(slurp(env_dir.path / "sub" / "close.csv") == csv);
}

TEST_CASE("linearize") {
  TempDir tmp;
  const std::string base = "linearize " + scenario_path("close.cfg") + " --out " + tmp.path.string();
  CHECK(run(base + kShort) == 0);
  const LinearizedPlant p = read_plant(tmp.path / "close.linearized.txt");
  CHECK((p.B * p.M - Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((p.D).cwiseAbs().maxCoeff() == 0.0);

  CHECK(run(base + " --time 0 --set initial.base_twist=[0,0,0,0,0,0]") == 0);
  const LinearizedPlant rest = read_plant(tmp.path / "close.linearized.txt");
  CHECK(rest.A.cwiseAbs().maxCoeff() == 0.0);

  CHECK(run(base + " --time abc") == 1);
  CHECK(run(base + " --time -1") == 1);
  CHECK(run(base + " --time 1.5x") == 1);
}

TEST_CASE("sweep") {
  TempDir tmp;
  const std::string base = "sweep " + scenario_path("close.cfg") + kShort + " --out " +
                           tmp.path.string();
  CHECK(run(base) == 1);
  CHECK(run(base + " --vary controller=hierarchical,pi_baseline --vary baseline.gain_scale=2,1") ==
        0);
  std::istringstream csv(slurp(tmp.path / "close.sweep.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0].rfind("controller,baseline.gain_scale,status,captured", 0) == 0);
  CHECK(lines[1].rfind("hierarchical,1,", 0) == 0);
  CHECK(lines[2].rfind("hierarchical,2,", 0) == 0);
  CHECK(lines[4].rfind("pi_baseline,2,", 0) == 0);
  CHECK(run(base + " --vary nosuch.key=1,2") == 1);

  CHECK(run(base + " --vary outer.epsilon=scheduled,100,10,55") == 0);
  std::istringstream eps(slurp(tmp.path / "close.sweep.csv"));
  std::vector<std::string> first;
  while (std::getline(eps, line)) first.push_back(line.substr(0, line.find(',')));
  CHECK(first == std::vector<std::string>{"outer.epsilon", "10", "55", "100", "scheduled"});
}
