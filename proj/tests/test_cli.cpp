#include <catch2/catch.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ionjch/report.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path temp_file(const std::string& tag) {
  static int counter = 0;
  return fs::temp_directory_path() /
         ("ionjch_cli_" + std::to_string(::getpid()) + "_" + tag + "_" +
          std::to_string(counter++));
}

RunResult run_cli(const std::string& args) {
  const fs::path out = temp_file("out"), err = temp_file("err");
  const std::string cmd = std::string("\"") + IONJCH_CLI_PATH + "\" " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  fs::remove(out);
  fs::remove(err);
  return r;
}

std::vector<double> parse_line_values(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (line.rfind(key, 0) != 0) continue;
    std::istringstream fields(line.substr(key.size()));
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    return values;
  }
  return {};
}

}  // namespace

TEST_CASE("crystal: two-ion report includes the {1, 3} eigenvalues", "[cli]") {
  const auto r = run_cli("crystal --ions 2 --alpha 0.1");
  REQUIRE(r.code == 0);
  const auto lambda = parse_line_values(r.out, "lambda:");
  REQUIRE(lambda.size() == 2);
  CHECK(lambda[0] == Approx(1.0).margin(1e-10));
  CHECK(lambda[1] == Approx(3.0).margin(1e-10));
}

TEST_CASE("crystal: single ion has trivial geometry", "[cli]") {
  const auto r = run_cli("crystal --ions 1");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("positions u_k: 0\n") != std::string::npos);
  CHECK(r.out.find("hopping t_km (units of g): none") != std::string::npos);
}

TEST_CASE("crystal: COM mode row has theta exactly zero", "[cli]") {
  const auto r = run_cli("crystal --ions 3 --alpha 0.1");
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  bool found = false;
  for (std::string line; std::getline(is, line);) {
    if (line.rfind("1 ", 0) != 0) continue;
    std::istringstream fields(line);
    std::string p, lambda, gamma, theta, cosh1, omega;
    fields >> p >> lambda >> gamma >> theta >> cosh1 >> omega;
    if (p != "1") continue;
    found = true;
    CHECK(gamma == "1");
    CHECK(theta == "0");
    CHECK(omega == "1");
    break;
  }
  CHECK(found);
}

TEST_CASE("crystal: invalid ion count exits with the domain code", "[cli]") {
  const auto r = run_cli("crystal --ions 0");
  CHECK(r.code == 3);
}

TEST_CASE("mott: header schema, resonance row and positive lobes", "[cli]") {
  const auto r = run_cli("mott --delta-min -1 --delta-max 1 --steps 3 --n-max 2");
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string header;
  std::getline(is, header);
  CHECK(header == "delta_over_g,mu_0,mu_1,mu_2,dmu_0,dmu_1");
  bool resonance_seen = false;
  for (std::string line; std::getline(is, line);) {
    std::istringstream fields(line);
    std::vector<double> v;
    for (std::string cell; std::getline(fields, cell, ',');)
      v.push_back(std::strtod(cell.c_str(), nullptr));
    REQUIRE(v.size() == 6);
    CHECK(v[4] >= 0.0);
    CHECK(v[5] >= 0.0);
    if (v[0] == 0.0) {
      resonance_seen = true;
      CHECK(v[1] == Approx(-1.0).margin(1e-14));
    }
  }
  CHECK(resonance_seen);
}

TEST_CASE("ground: resonant doublet JSON", "[cli]") {
  const auto r = run_cli("ground --ions 1 --excitations 1 --t-over-g 0.3 --delta-over-g 0");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("energy").get<double>() == Approx(-1.0).margin(1e-10));
  CHECK(j.at("observables").at("sites")[0].at("var_qubit").get<double>() ==
        Approx(0.5).margin(1e-10));
  CHECK(j.at("observables").at("delta_over_g").get<double>() == 0.0);
  CHECK(j.at("provenance").at("version").is_string());
}

TEST_CASE("ground: JSON observables round-trip into an ObservableSet", "[cli]") {
  const auto r = run_cli(
      "ground --ions 3 --excitations 2 --t-over-g 0.4 --delta-over-g -1.5");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto obs = ionjch::observables_from_json(j.at("observables"));
  // Re-serialization of the parsed set reproduces the emitted values exactly.
  CHECK(ionjch::observables_to_json(obs) == j.at("observables"));
  CHECK(obs.n_sites == 3);
  CHECK(obs.delta_over_g == -1.5);
}

TEST_CASE("ground: missing keys are named in the usage diagnostic", "[cli]") {
  const auto r = run_cli("ground --ions 1 --excitations 1 --t-over-g 0.3");
  CHECK(r.code == 2);
  CHECK(r.err.find("--delta-over-g") != std::string::npos);
  const auto r2 = run_cli("ground --excitations 1 --t-over-g 0.3 --delta-over-g 0");
  CHECK(r2.code == 2);
  CHECK(r2.err.find("--ions") != std::string::npos);
}

TEST_CASE("ground: mixing units modes is a usage error", "[cli]") {
  const auto r = run_cli(
      "ground --ions 1 --excitations 1 --t-over-g 0.3 --delta-over-g 0 --omega-z 1");
  CHECK(r.code == 2);
  const auto r2 = run_cli(
      "ground --ions 1 --excitations 1 --units physical --omega-z 1 --omega-x 10 "
      "--rabi 10 --lamb-dicke 0.1 --delta 0 --t-over-g 0.3");
  CHECK(r2.code == 2);
}

TEST_CASE("ground: capacity overflow exits with the domain code", "[cli]") {
  const auto r = run_cli(
      "ground --ions 5 --excitations 5 --t-over-g 0.3 --delta-over-g 0 --capacity 10");
  CHECK(r.code == 3);
}

TEST_CASE("ground: dumps are written alongside the report", "[cli]") {
  const auto basis_path = temp_file("basis"), matrix_path = temp_file("matrix");
  const auto r = run_cli("ground --ions 2 --excitations 1 --t-over-g 0.3 "
                         "--delta-over-g 0.5 --dump-basis " + basis_path.string() +
                         " --dump-matrix " + matrix_path.string());
  REQUIRE(r.code == 0);
  const auto basis_text = slurp(basis_path);
  CHECK(basis_text.rfind("2 1 4\n", 0) == 0);
  const auto matrix_text = slurp(matrix_path);
  CHECK(matrix_text.rfind("% 2 1 4 ", 0) == 0);
  fs::remove(basis_path);
  fs::remove(matrix_path);
}

TEST_CASE("usage errors: no subcommand, unknown flags", "[cli]") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("sweep --ions 2 --excitations 2 --t-over-g 0.3 --bogus 1").code == 2);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("--version").code == 0);
}

TEST_CASE("sweep: deterministic CSV with labels, rerun-identical", "[cli]") {
  const auto out1 = temp_file("sweep1"), out2 = temp_file("sweep2");
  const std::string args =
      "sweep --ions 2 --excitations 2 --t-over-g 0.3 --delta-min -1 --delta-max 1 "
      "--steps 3 --method dense --classify --workers 1 -o ";
  REQUIRE(run_cli(args + out1.string()).code == 0);
  REQUIRE(run_cli(args + out2.string()).code == 0);
  const auto a = slurp(out1), b = slurp(out2);
  CHECK(a == b);
  CHECK(a.find("phase_1,phase_2") != std::string::npos);
  CHECK(a.find("delta_over_g,energy,gap,degenerate,meanN_1") != std::string::npos);
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("sweep: physical units reproduce the g-units bytes exactly", "[cli]") {
  // omega_z=1, omega_x=10, rabi=10, eta=0.1: alpha=0.1, g=1, t=0.05.
  const auto out_g = temp_file("gunits"), out_p = temp_file("phys");
  const std::string tail =
      " --delta-min -1 --delta-max 1 --steps 3 --method dense --workers 1 -o ";
  REQUIRE(run_cli("sweep --ions 2 --excitations 2 --t-over-g 0.05" + tail +
                  out_g.string()).code == 0);
  REQUIRE(run_cli("sweep --ions 2 --excitations 2 --units physical --omega-z 1 "
                  "--omega-x 10 --rabi 10 --lamb-dicke 0.1" + tail + out_p.string())
              .code == 0);
  CHECK(slurp(out_g) == slurp(out_p));
  fs::remove(out_g);
  fs::remove(out_p);
}

TEST_CASE("sweep: default five-ion run has the documented schema and symmetry",
          "[cli]") {
  const auto out = temp_file("fig3");
  const auto r = run_cli("sweep --ions 5 --excitations 5 --t-over-g 0.3 --classify -o " +
                         out.string());
  REQUIRE(r.code == 0);
  std::ifstream is(out);
  std::string line;
  while (std::getline(is, line) && line.rfind("#", 0) == 0) {}
  // Header: 4 scalar + 5 per-site * 5 sites + 5 label columns.
  CHECK(std::count(line.begin(), line.end(), ',') == 4 + 25 + 5 - 1);
  std::istringstream header(line);
  std::vector<std::string> names;
  for (std::string cell; std::getline(header, cell, ',');) names.push_back(cell);
  REQUIRE(names.size() == 34);
  CHECK(names[0] == "delta_over_g");
  CHECK(names[4] == "meanN_1");
  CHECK(names[29] == "phase_1");

  int rows = 0;
  const auto column = [&names](const std::string& n) {
    return std::find(names.begin(), names.end(), n) - names.begin();
  };
  const auto var1 = column("varN_1"), var5 = column("varN_5");
  for (; std::getline(is, line); ++rows) {
    std::istringstream fields(line);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 34);
    const double v1 = std::strtod(cells[var1].c_str(), nullptr);
    const double v5 = std::strtod(cells[var5].c_str(), nullptr);
    CHECK(std::abs(v1 - v5) < 1e-8);
  }
  CHECK(rows == 301);
  fs::remove(out);
}

TEST_CASE("sweep: json format parses and mirrors the csv rows", "[cli]") {
  const auto r = run_cli(
      "sweep --ions 1 --excitations 1 --t-over-g 0.3 --delta-min -1 --delta-max 1 "
      "--steps 3 --method dense --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("rows").size() == 3);
  CHECK(j.at("rows")[1].at("delta_over_g").get<double>() == 0.0);
  CHECK(j.at("rows")[1].at("ok").get<bool>());
}

TEST_CASE("config file provides values, flags override", "[cli]") {
  const auto cfg = temp_file("cfg");
  {
    std::ofstream os(cfg);
    os << "[sweep]\n"
          "ions=2\n"
          "excitations=2\n"
          "t-over-g=0.3\n"
          "delta-min=-1\n"
          "delta-max=1\n"
          "steps=3\n"
          "method=dense\n"
          "workers=1\n";
  }
  const auto base = run_cli("--config " + cfg.string() + " sweep");
  REQUIRE(base.code == 0);
  CHECK(std::count(base.out.begin(), base.out.end(), '\n') == 3 + 1 + 3);  // comments+header+rows
  const auto overridden = run_cli("--config " + cfg.string() + " sweep --steps 5");
  REQUIRE(overridden.code == 0);
  CHECK(std::count(overridden.out.begin(), overridden.out.end(), '\n') == 3 + 1 + 5);
  fs::remove(cfg);
}
