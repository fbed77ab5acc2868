#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CFISAC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cfisac_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("successful run writes outputs") {
  const fs::path out = scratch("ok");
  CHECK(run_cli("run --drops 1 --mode upc --out " + out.string()) == 0);
  CHECK(fs::exists(out / "drops.csv"));
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("configuration errors exit with 2") {
  const fs::path dir = scratch("cfg");
  std::ofstream(dir / "bad.json") << R"({"n_drops": -3})";
  std::ofstream(dir / "unknown.json") << R"({"surprise": true})";
  CHECK(run_cli("run --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "unknown.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run_cli("run --mode bogus --out " + (dir / "o").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("") == 2);
}

TEST_CASE("I/O errors exit with 3") {
  const fs::path dir = scratch("io");
  std::ofstream(dir / "file") << "x";
  CHECK(run_cli("run --drops 1 --mode upc --out " + (dir / "file" / "sub").string()) == 3);
  CHECK(run_cli("run --config " + (dir / "absent.json").string()) == 3);
}
