#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PINTLFA_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pintlfa_cli_" + name);
  fs::remove_all(p);
  return p;
}

} // namespace

TEST_CASE("trace and spectrum files") {
  const auto dir = scratch("small");
  REQUIRE(run("analyze --problem advection --n 32 --m 3 --iterations 4 --strategies apply,rho --blocks tc --out " +
              dir.string()) == 0);
  const auto t = csv(dir / "trace.csv");
  REQUIRE(t.size() == 6);
  CHECK(t[0] == std::vector<std::string>{"iteration", "actual_inf", "actual_2", "pred_apply_tc", "pred_rho_tc"});
  CHECK(t[1][1].find('e') != std::string::npos);
  CHECK(t[1][1].size() >= 22); // 17 significant digits in scientific form
  const auto text = slurp(dir / "trace.csv");
  CHECK(text.find('\r') == std::string::npos);
  const auto s = csv(dir / "spectrum.csv");
  CHECK(s[0] == std::vector<std::string>{"block_k", "block_j", "eig_re", "eig_im"});
  CHECK(s.size() == 1 + 16 * 2 * 3 * 4);

  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["config"]["n"] == 32);
  CHECK(report["aggregates"][0]["mode"] == "tc");
  CHECK(report["manifest"]["files"].size() == 3);

  // identical configuration, identical bytes
  const auto again = scratch("again");
  REQUIRE(run("analyze --problem advection --n 32 --m 3 --iterations 4 --strategies apply,rho --blocks tc --out " +
              again.string()) == 0);
  CHECK(slurp(again / "trace.csv") == text);
  CHECK(slurp(again / "spectrum.csv") == slurp(dir / "spectrum.csv"));
}

TEST_CASE("zero iterations") {
  const auto dir = scratch("zero");
  REQUIRE(run("analyze --n 32 --m 3 --iterations 0 --out " + dir.string()) == 0);
  CHECK(csv(dir / "trace.csv").size() == 2);
}

TEST_CASE("advection cfl in the report") {
  const auto dir = scratch("cfl");
  REQUIRE(run("analyze --problem advection --coefficient 4.88e-3 --iterations 0 --strategies rho --precision double --out " +
              dir.string()) == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["cfl"].get<double>() == 0.062464);
}

TEST_CASE("strategy 4 column tracks the actual error") {
  const auto dir = scratch("apply");
  REQUIRE(run("analyze --problem diffusion --mu 10 --wavenumber 8 --strategies apply --blocks tc --out " + dir.string()) == 0);
  const auto t = csv(dir / "trace.csv");
  REQUIRE(t.size() == 22);
  for (std::size_t r = 1; r < t.size(); ++r) {
    const double a = std::stod(t[r][2]), p = std::stod(t[r][3]);
    CHECK(std::abs(p - a) <= 1e-8 * a);
  }
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = scratch("bad").string();
  CHECK(run("analyze --problem advection --mu 10 --out " + dir) == 2);
  CHECK(run("analyze --coefficient 1 --mu 10 --out " + dir) == 2);
  CHECK(run("analyze --n 31 --out " + dir) == 2);
  CHECK(run("analyze --blocks diagonal --out " + dir) == 2);
  CHECK(run("analyze --strategies guess --out " + dir) == 2);
  CHECK(run("analyze --no-such-flag") == 2);
  CHECK(run("") == 2);
  CHECK(run("verify --scale huge") == 2);
}

TEST_CASE("verify") {
  CHECK(run("verify --scale small") == 0);
  CHECK(run("verify --scale small --inject-qdelta-sign-flip") == 4);
}
