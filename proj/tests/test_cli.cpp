// Drives the hmmrd executable end to end. The binary path is argv[1].
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <cstdio>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_root;

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run_cli(const std::string& args) {
  const fs::path o = g_root / "stdout.txt", e = g_root / "stderr.txt";
  const std::string cmd = "'" + g_binary + "' " + args + " >'" + o.string() + "' 2>'" + e.string() + "'";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(o), slurp(e)};
}

// errors.csv without the wall-clock column.
std::string strip_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}



}  // namespace

TEST_CASE("mesh-info reports counts for n=2") {
  const auto dir = g_root / "info";
  const auto r = run_cli("mesh-info --level 2 --out '" + dir.string() + "'");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("vertices: 9") != std::string::npos);
  CHECK(r.out.find("faces: 16 (8 boundary, 8 interior)") != std::string::npos);
  CHECK(r.out.find("cells: 8") != std::string::npos);
  CHECK(r.out.find("valid: yes") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.txt"));
}

TEST_CASE("mesh-info reads mesh files") {
  const auto mesh = g_root / "square.mesh";
  std::ofstream(mesh) << "vertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n4 0 1 2 3\n";
  const auto r = run_cli("mesh-info --mesh-file '" + mesh.string() + "' --out '" +
                         (g_root / "sq").string() + "'");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("cells: 1") != std::string::npos);

  std::ofstream(g_root / "bad.mesh") << "vertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 5\n";
  const auto bad = run_cli("mesh-info --mesh-file '" + (g_root / "bad.mesh").string() + "' --out '" +
                           (g_root / "bad").string() + "'");
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("invalid configuration exits with code 2 and names the key") {
  const auto r = run_cli("solve --set dt=-1 --out '" + (g_root / "x").string() + "'");
  CHECK(r.code == 2);
  CHECK(r.err.find("dt") != std::string::npos);
  const auto u = run_cli("solve --set colour=red --out '" + (g_root / "x").string() + "'");
  CHECK(u.code == 2);
  CHECK(u.err.find("colour") != std::string::npos);
}

TEST_CASE("config file with command-line precedence") {
  const auto cfg = g_root / "run.cfg";
  std::ofstream(cfg) << "# short run\nT = 0.05\ndt = 0.5\nlevel = 3\n";
  const auto dir = g_root / "solve";
  const auto r = run_cli("solve --config '" + cfg.string() + "' --set dt=0.01 --out '" + dir.string() + "'");
  REQUIRE(r.code == 0);
  for (const char* f : {"errors.csv", "final_state.csv", "run.log", "manifest.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("dt = 0.01") != std::string::npos);
  CHECK(manifest.find("config_hash") != std::string::npos);
}

TEST_CASE("convergence run writes table and plot data, and is reproducible") {
  const std::string common = "convergence --set levels=2,4 --set T=0.1 --set dt=0.01 --out ";
  const auto a = g_root / "conv_a", b = g_root / "conv_b";
  REQUIRE(run_cli(common + "'" + a.string() + "'").code == 0);
  REQUIRE(run_cli(common + "'" + b.string() + "'").code == 0);
  for (const char* f : {"errors.csv", "grad_u.dat", "grad_v.dat", "err_u.dat", "err_v.dat", "run.log",
                        "manifest.txt"}) {
    CHECK(fs::exists(a / f));
  }
  const auto csv = slurp(a / "errors.csv");
  CHECK(csv.rfind("h,err_u,rate_u,err_v,rate_v,err_gu,rate_gu,err_gv,rate_gv,runtime_s\n", 0) == 0);
  CHECK(strip_runtime(csv) == strip_runtime(slurp(b / "errors.csv")));
  CHECK(slurp(a / "err_u.dat") == slurp(b / "err_u.dat"));
  CHECK(slurp(a / "grad_v.dat") == slurp(b / "grad_v.dat"));
  CHECK(slurp(a / "manifest.txt") == slurp(b / "manifest.txt"));
}

TEST_CASE("diagnose run is byte-identical across runs") {
  const std::string common = "diagnose --set levels=2,4 --out ";
  const auto a = g_root / "diag_a", b = g_root / "diag_b";
  REQUIRE(run_cli(common + "'" + a.string() + "'").code == 0);
  REQUIRE(run_cli(common + "'" + b.string() + "'").code == 0);
  const auto csv = slurp(a / "diagnostics.csv");
  CHECK(csv.rfind("h,C_D,", 0) == 0);
  CHECK(csv.find("S_D[sinsin]") != std::string::npos);
  CHECK(csv.find("W_D[x_axis]") != std::string::npos);
  CHECK(csv == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / "manifest.txt") == slurp(b / "manifest.txt"));
}

TEST_CASE("unknown subcommand is rejected") {
  CHECK(run_cli("plot").code != 0);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-hmmrd> [doctest options]\n");
    return 2;
  }
  g_binary = fs::absolute(argv[1]).string();
  g_root = fs::temp_directory_path() / ("hmmrd_cli_test_" + std::to_string(::getpid()));
  fs::remove_all(g_root);
  fs::create_directories(g_root);

  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  const int rc = ctx.run();
  fs::remove_all(g_root);
  return rc;
}
