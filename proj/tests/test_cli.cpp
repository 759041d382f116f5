// Integration tests driving the cpforce binary end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

const std::string kBin = CPFORCE_BIN;
const std::string kData = MOLCP_DATA_DIR;

struct RunResult {
  int exit_code;
};

RunResult run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return {WEXITSTATUS(rc)};
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.json";
  std::ofstream out(p);
  out << text;
  return p;
}

// data rows of a CSV (skipping '#' metadata and the column header)
std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column names
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string strip_generated(const fs::path& p) {
  std::ifstream in(p);
  std::string out, line;
  while (std::getline(in, line))
    if (line.rfind("# generated:", 0) != 0) out += line + "\n";
  return out;
}

std::string base_scenario(const std::string& command,
                          const std::string& material,
                          const std::string& extra = "") {
  return R"({
    "command": ")" + command + R"(",
    "molecule": ")" + kData + R"(/LiH.json",
    "material": )" + material + R"(,
    "temperature": 300.0,
    "z_grid": {"min": 2e-6, "max": 3e-5, "points": 6, "spacing": "log"}
    )" + extra + R"(
  })";
}

const std::string kAuJson =
    R"({"model": "drude", "omega_p": 1.37e16, "gamma": 5.32e13})";

}  // namespace

TEST_CASE("components with a vacuum material emits zero forces") {
  const fs::path dir = temp_dir("molcp_cli_vac");
  const fs::path cfg =
      write_config(dir, base_scenario("components", R"({"model":"vacuum"})"));
  const RunResult r =
      run("--config " + cfg.string() + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  const auto rows = read_csv(dir / "components.csv");
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 5);
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
    CHECK(row[3] == 0.0);
    CHECK(row[4] == 0.0);
  }
}

TEST_CASE("components output is deterministic and decomposes") {
  const fs::path dir = temp_dir("molcp_cli_au");
  const fs::path cfg = write_config(dir, base_scenario("components", kAuJson));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  const std::string first = strip_generated(dir / "components.csv");
  const auto rows = read_csv(dir / "components.csv");
  for (const auto& row : rows) {
    CHECK(row[4] == doctest::Approx(row[1] + row[2] + row[3])
                        .epsilon(1e-12).scale(std::abs(row[1])));
    CHECK(row[1] < 0.0);  // attractive non-resonant part
  }
  // rerun with 2 threads: byte-identical modulo the timestamp line
  CHECK(run("--config " + cfg.string() + " --out " + dir.string() +
            " --threads 2")
            .exit_code == 0);
  CHECK(strip_generated(dir / "components.csv") == first);
  CHECK(fs::exists(dir / "components.gp"));
}

TEST_CASE("thermal-compare reproduces the YbF reduction factor") {
  const fs::path dir = temp_dir("molcp_cli_ybf");
  const std::string cfg_text = R"({
    "command": "thermal-compare",
    "molecule": ")" + kData + R"(/YbF.json",
    "material": )" + kAuJson + R"(,
    "temperature": 300.0,
    "z_grid": {"min": 1e-6, "max": 2e-6, "points": 2, "spacing": "log"}
  })";
  const fs::path cfg = write_config(dir, cfg_text);
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  const auto rows = read_csv(dir / "thermal-compare.csv");
  REQUIRE(rows.size() == 2);
  // near-field ratio column ~ 1/870 (within the vibrational-population
  // normalisation of the bundled 3-level YbF, a few percent)
  for (const auto& row : rows) {
    CHECK(row[4] > 1.0 / 990.0);
    CHECK(row[4] < 1.0 / 790.0);
  }
}

TEST_CASE("rates command emits per-transition columns") {
  const fs::path dir = temp_dir("molcp_cli_rates");
  const fs::path cfg = write_config(dir, base_scenario("rates", kAuJson));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  const auto rows = read_csv(dir / "rates.csv");
  REQUIRE(rows.size() == 6);
  // z + 2 columns per transition (absorption, emission)
  REQUIRE(rows[0].size() == 7);
  for (const auto& row : rows)
    for (std::size_t c = 1; c < row.size(); ++c) CHECK(row[c] > 0.0);
}

TEST_CASE("dynamics command writes populations and force surfaces") {
  const fs::path dir = temp_dir("molcp_cli_dyn");
  const std::string extra = R"(,
    "state": "ground",
    "time_grid": {"min": 0.1, "max": 10.0, "points": 5, "spacing": "log"})";
  std::string text = R"({
    "command": "dynamics",
    "molecule": ")" + kData + R"(/LiH.json",
    "material": )" + kAuJson + R"(,
    "temperature": 300.0,
    "z_grid": {"min": 1e-5, "max": 3e-5, "points": 2, "spacing": "log"})" +
      extra + R"(
  })";
  const fs::path cfg = write_config(dir, text);
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  const auto pops = read_csv(dir / "dynamics_populations.csv");
  REQUIRE(pops.size() == 10);  // 2 z x 5 t
  for (const auto& row : pops) {
    REQUIRE(row.size() == 6);
    const double sum = row[2] + row[3] + row[4] + row[5];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10).scale(0.0));
  }
  const auto force = read_csv(dir / "dynamics_force.csv");
  REQUIRE(force.size() == 10);
}

TEST_CASE("asymptotes command emits reference columns") {
  const fs::path dir = temp_dir("molcp_cli_asym");
  const fs::path cfg = write_config(dir, base_scenario("asymptotes", kAuJson));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  const auto rows = read_csv(dir / "asymptotes.csv");
  REQUIRE(rows.size() == 6);
  REQUIRE(rows[0].size() == 5);
}

TEST_CASE("cavity command requires the cavity block and marks metadata") {
  const fs::path dir = temp_dir("molcp_cli_cav");
  // missing cavity block -> config error
  const fs::path bad = write_config(dir, base_scenario("cavity", kAuJson));
  CHECK(run("--config " + bad.string() + " --out " + dir.string())
            .exit_code == 2);
  const std::string extra = R"(, "cavity": {"length": 5e-5})";
  const fs::path cfg =
      write_config(dir, base_scenario("cavity", kAuJson, extra));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  std::ifstream in(dir / "cavity.csv");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("outlook-grade") != std::string::npos);
}

TEST_CASE("validate command") {
  const fs::path dir = temp_dir("molcp_cli_val");
  CHECK(run("--config " + kData + "/LiH.json --command validate")
            .exit_code == 0);
  const fs::path broken = dir / "broken.json";
  {
    std::ofstream out(broken);
    out << R"({"name":"x","levels":[{"id":0,"omega":0.0}],
              "transitions":[{"from":0,"to":7,"d_re":[1e-30,0,0]}]})";
  }
  CHECK(run("--config " + broken.string() + " --command validate")
            .exit_code == 2);
}

TEST_CASE("exit codes for config and numerical failures") {
  const fs::path dir = temp_dir("molcp_cli_err");
  CHECK(run("--config /nonexistent.json").exit_code == 2);
  // starving the quadrature triggers a numerical failure (exit 3)
  const std::string extra = R"(, "quad_max_panels": 4)";
  const fs::path cfg =
      write_config(dir, base_scenario("components", kAuJson, extra));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 3);
}

TEST_CASE("tolerance flags override the config") {
  const fs::path dir = temp_dir("molcp_cli_tol");
  // quad_max_panels = 4 fails at the config's 1e-9 tolerance but succeeds
  // once --quad-tol loosens it
  const std::string extra = R"(, "quad_max_panels": 4)";
  const fs::path cfg =
      write_config(dir, base_scenario("components", kAuJson, extra));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 3);
  CHECK(run("--config " + cfg.string() + " --out " + dir.string() +
            " --quad-tol 1e-3")
            .exit_code == 0);
}

TEST_CASE("force-profile command") {
  const fs::path dir = temp_dir("molcp_cli_fp");
  const fs::path cfg =
      write_config(dir, base_scenario("force-profile", kAuJson));
  CHECK(run("--config " + cfg.string() + " --out " + dir.string())
            .exit_code == 0);
  const auto rows = read_csv(dir / "force-profile.csv");
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) CHECK(row[1] < 0.0);
}
