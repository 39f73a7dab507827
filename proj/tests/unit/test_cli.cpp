#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "macroreal/conditions.hpp"
#include "macroreal/mach_zehnder.hpp"

using namespace macroreal;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "macroreal");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_file(const std::string& name) { return std::string(MACROREAL_DATA_DIR) + "/scenarios/" + name; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("parse_range") {
  CHECK(cli::parse_range("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(cli::parse_range("0.5:8:0.25").size() == 31);
  CHECK(cli::parse_range("1,2,5") == std::vector<double>{1.0, 2.0, 5.0});
  CHECK(cli::parse_range("3") == std::vector<double>{3.0});
  CHECK_THROWS_AS(cli::parse_range("0:1"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_range("0:1:0"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_range("1:0:0.1"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_range("a,b"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_range(""), cli::UsageError);
}

TEST_CASE("parse_complex") {
  CHECK(cli::parse_complex("0.3") == Complex(0.3, 0.0));
  CHECK(cli::parse_complex("0.3i") == Complex(0.0, 0.3));
  CHECK(cli::parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(cli::parse_complex("0.1+0.1i") == Complex(0.1, 0.1));
  CHECK(cli::parse_complex("1e-3-2i") == Complex(1e-3, -2.0));
  CHECK(cli::parse_complex("2e+1+1e-1i") == Complex(20.0, 0.1));
  CHECK_THROWS_AS(cli::parse_complex("x"), cli::UsageError);
}

TEST_CASE("parallel_for keeps index order") {
  std::vector<int> out(1000);
  cli::parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS(cli::parallel_for(10, 4, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
}

TEST_CASE("mz-scan") {
  SUBCASE("default lattice agrees") {
    const auto r = run({"mz-scan", "--format", "json", "--jobs", "4"});
    CHECK(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["mismatches"] == 0);
    CHECK(j["points"] == 8712);
  }
  SUBCASE("imaginary coherence flags NSIT_(0)12 violations") {
    const auto r = run({"mz-scan", "--state", "sup", "--c", "0.3i"});
    CHECK(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::size_t violated = 0;
    while (std::getline(is, line))
      if (line.find(",NSIT_(0)12,") != std::string::npos && line.find(",0,0,0,1") != std::string::npos) ++violated;
    CHECK(violated > 0);
  }
  SUBCASE("malformed range is a usage error") {
    const auto r = run({"mz-scan", "--r1", "0:1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("range") != std::string::npos);
  }
  SUBCASE("writes CSV and JSON next to each other") {
    const fs::path dir = fs::temp_directory_path() / "macroreal_cli_test";
    fs::create_directories(dir);
    const auto r = run({"mz-scan", "--r1", "0.5", "--r2", "0.5", "--out", (dir / "scan.csv").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "scan.csv"));
    CHECK(fs::exists(dir / "scan.json"));
    fs::remove_all(dir);
  }
  SUBCASE("a deliberately wrong convention reports mismatches") {
    const auto r = run({"mz-scan", "--convention", "symmetric-i", "--format", "json"});
    CHECK(r.code == 1);
    CHECK(Json::parse(r.out)["mismatches"].get<int>() > 0);
  }
  SUBCASE("byte-identical output for any job count") {
    const auto a = run({"mz-scan", "--jobs", "1", "--phi-count", "4"});
    const auto b = run({"mz-scan", "--jobs", "7", "--phi-count", "4"});
    CHECK(a.out == b.out);
  }
}

TEST_CASE("nsit-check") {
  SUBCASE("phi = 0 example violates NSIT_(1)2") {
    const auto r = run({"nsit-check", data_file("mz_phi0.json"), "--format", "json"});
    CHECK(r.code == 1);
    const auto j = Json::parse(r.out);
    bool found = false;
    for (const auto& row : j["rows"])
      if (row["condition"] == "NSIT_(1)2") {
        found = true;
        CHECK(row["holds"] == false);
      }
    CHECK(found);
  }
  SUBCASE("phi = pi/2 example satisfies MR_012") {
    const auto r = run({"nsit-check", data_file("mz_phi_half_pi.json"), "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("MR_012,") != std::string::npos);
  }
  SUBCASE("two slots: bundle skipped with a notice") {
    const auto r = run({"nsit-check", data_file("qubit_two_slot.json"), "--format", "csv"});
    CHECK(r.err.find("skipped") != std::string::npos);
    CHECK(r.out.find("MR_012") == std::string::npos);
    CHECK(r.out.find("NSIT_(0)1") != std::string::npos);
    CHECK(count_lines(r.out) == 3);
  }
  SUBCASE("schema violation") {
    const fs::path f = fs::temp_directory_path() / "macroreal_bad_scenario.json";
    std::ofstream(f) << R"({"initial": [[[1, 0]]], "slots": [{"time": 0}], "evolutions": "nope"})";
    CHECK(run({"nsit-check", f.string()}).code == 2);
    std::ofstream(f) << "{not json";
    CHECK(run({"nsit-check", f.string()}).code == 2);
    fs::remove(f);
    CHECK(run({"nsit-check", "/nonexistent/file.json"}).code == 2);
  }
  SUBCASE("tolerance from the environment") {
    ::setenv("MACROREAL_DEFAULT_TOL", "0.5", 1);
    const auto r = run({"nsit-check", data_file("mz_phi0.json"), "--format", "json"});
    ::unsetenv("MACROREAL_DEFAULT_TOL");
    CHECK(Json::parse(r.out)["rows"][0]["threshold"] == 0.5);
    ::setenv("MACROREAL_DEFAULT_TOL", "banana", 1);
    CHECK(run({"nsit-check", data_file("mz_phi0.json")}).code == 2);
    ::unsetenv("MACROREAL_DEFAULT_TOL");
  }
}

TEST_CASE("overlap") {
  SUBCASE("ring sweep on the border") {
    const auto r = run({"overlap", "ring", "--d", "0.5:8:0.25", "--gamma-mode", "border", "--jobs", "4"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("d,gamma,V,error_estimate,grid\n", 0) == 0);
    CHECK(count_lines(r.out) == 32);
  }
  SUBCASE("one Fock curve") {
    const auto r = run({"overlap", "fock", "--g", "2m^2", "--gamma", "0:6:0.1", "--jobs", "4"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 62);
  }
  SUBCASE("quadrature analytic and numeric columns") {
    const auto r = run({"overlap", "quadrature", "--case", "XX", "--t", "0:10:0.5", "--jobs", "4"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("case,t,V_analytic,V_numeric,", 0) == 0);
    CHECK(count_lines(r.out) == 22);
    CHECK(r.err.find("max |analytic - numeric|") != std::string::npos);
  }
  SUBCASE("coherent bound") {
    const auto r = run({"overlap", "coherent", "--gamma", "1", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(std::abs(Json::parse(r.out)["rows"][0]["V"].get<double>() - 0.9428) < 2e-3);
  }
  SUBCASE("unknown family") {
    const auto r = run({"overlap", "wigner"});
    CHECK(r.code == 2);
    CHECK(r.err.find("wigner") != std::string::npos);
  }
  SUBCASE("deterministic CSV bodies") {
    const auto a = run({"overlap", "ring", "--d", "1:3:1", "--jobs", "1"});
    const auto b = run({"overlap", "ring", "--d", "1:3:1", "--jobs", "3"});
    CHECK(a.out == b.out);
  }
}

TEST_CASE("mr-sweep") {
  const auto a = run({"mr-sweep", "--count", "200", "--seed", "4"});
  const auto b = run({"mr-sweep", "--count", "200", "--seed", "4"});
  CHECK(a.out == b.out);
  CHECK(Json::parse(a.out)["scenarios"] == 200);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"mz-scan", "--format", "xml"}).code == 2);
  CHECK(run({"mz-scan", "--jobs", "0"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
