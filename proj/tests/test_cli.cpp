#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "levimag/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" LEVIMAG_CLI "\" " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path tmp_dir() {
  const fs::path dir(LEVIMAG_TEST_TMP);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("list prints the nine bundled scenarios") {
  const auto r = run("list");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    ++count;
    CHECK(line.find("\tFig") != std::string::npos);
  }
  CHECK(count == 9);
  CHECK(run("list").out == r.out);
}

TEST_CASE("validate") {
  CHECK(run("validate fig7_fock_prep").code == 0);
  const auto empty = tmp_dir() / "empty.cfg";
  std::ofstream(empty).close();
  const auto r = run("validate " + empty.string());
  CHECK(r.code == 1);
  CHECK(r.out.find("empty.cfg:1:1") != std::string::npos);
  CHECK(run("validate no_such_scenario").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("run writes outputs and reruns are byte-identical") {
  const auto root_a = tmp_dir() / "a";
  const auto root_b = tmp_dir() / "b";
  fs::remove_all(root_a);
  fs::remove_all(root_b);
  REQUIRE(run("run fig6a_ringdown --out " + root_a.string()).code == 0);
  REQUIRE(run("run fig6a_ringdown", std::string(levimag::kOutputDirEnv) + "=" + root_b.string()).code == 0);
  const auto ma = slurp(root_a / "fig6a_ringdown" / "manifest.json");
  const auto mb = slurp(root_b / "fig6a_ringdown" / "manifest.json");
  CHECK(ma == mb);
  const auto manifest = nlohmann::json::parse(ma);
  for (const auto& o : manifest["outputs"]) {
    const std::string f = o["file"];
    CHECK(slurp(root_a / "fig6a_ringdown" / f) == slurp(root_b / "fig6a_ringdown" / f));
  }
  CHECK(fs::exists(root_a / "fig6a_ringdown" / "timing.json"));

  fs::remove_all(root_b);
  REQUIRE(run("run fig6a_ringdown --seed 8 --out " + root_b.string()).code == 0);
  CHECK(slurp(root_b / "fig6a_ringdown" / "trajectory.csv") != slurp(root_a / "fig6a_ringdown" / "trajectory.csv"));
}

TEST_CASE("numerical failures exit with code 2") {
  const auto dir = tmp_dir();
  {
    std::ofstream csv(dir / "flat.csv");
    csv << "# {}\ntime_s,signal\n";
    for (int i = 0; i < 100; ++i) csv << i * 1e-3 << ",1\n";
  }
  std::ofstream(dir / "flat.cfg") << "schema: levimag-scenario/1\nname: flat\nkind: analyze\nmode: ringdown\n"
                                     "parameters:\n  input: flat.csv\n  column: signal\n";
  const auto r = run("run " + (dir / "flat.cfg").string() + " --out " + (dir / "out").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("analysis.fit_ringdown") != std::string::npos);
}
