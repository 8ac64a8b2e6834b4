#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "triring/errors.hpp"
#include "triring/io/config.hpp"
#include "triring/io/csv.hpp"
#include "triring/io/manifest.hpp"

using namespace triring;
using nlohmann::json;

namespace {

json minimal_smatrix_config() {
  return json{
      {"version", 1},
      {"circuit",
       {{"ej", {11.8, 11.8, 12.06}},
        {"cg", 3.5},
        {"cc", 25.0},
        {"ci", 8.0},
        {"kappa", 0.119}}},
      {"smatrix",
       {{"bias", {{"phi_b", 2.7}, {"ng", {0.41, 0.78, 0.41}}}},
        {"freq", {{"lo", 5.5}, {"hi", 6.5}, {"n", 11}}}}},
  };
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("triring_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("valid config passes validation") {
  io::validate_config(minimal_smatrix_config(), "smatrix");
}

TEST_CASE("missing version is rejected") {
  json cfg = minimal_smatrix_config();
  cfg.erase("version");
  try {
    io::validate_config(cfg, "smatrix");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/version");
  }
}

TEST_CASE("unknown keys are rejected with a pointer path") {
  json cfg = minimal_smatrix_config();
  cfg["circuit"]["turbo"] = true;
  try {
    io::validate_config(cfg, "smatrix");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/circuit/turbo");
  }

  cfg = minimal_smatrix_config();
  cfg["smatrix"]["freq"]["step"] = 0.1;
  try {
    io::validate_config(cfg, "smatrix");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/smatrix/freq/step");
  }
}

TEST_CASE("wrong types and bad values are rejected") {
  json cfg = minimal_smatrix_config();
  cfg["smatrix"]["freq"]["n"] = 0;
  CHECK_THROWS_AS(io::validate_config(cfg, "smatrix"), SchemaError);

  cfg = minimal_smatrix_config();
  cfg["circuit"]["ej"] = {11.8, 11.8};
  CHECK_THROWS_AS(io::validate_config(cfg, "smatrix"), SchemaError);

  cfg = minimal_smatrix_config();
  cfg["smatrix"]["sectors"] = {"eee", "bogus"};
  CHECK_THROWS_AS(io::validate_config(cfg, "smatrix"), SchemaError);

  // Command block must match the command.
  CHECK_THROWS_AS(io::validate_config(minimal_smatrix_config(), "classify"),
                  SchemaError);
}

TEST_CASE("environment overrides are applied before validation") {
  TempDir dir;
  const auto cfg_path = dir.path / "cfg.json";
  {
    std::ofstream out(cfg_path);
    out << minimal_smatrix_config().dump(2);
  }
  setenv("TRIRING_circuit__kappa", "0.2", 1);
  setenv("TRIRING_smatrix__freq__n", "21", 1);
  const auto cfg = io::load_config(cfg_path.string(), "smatrix");
  unsetenv("TRIRING_circuit__kappa");
  unsetenv("TRIRING_smatrix__freq__n");
  CHECK(cfg.json["circuit"]["kappa"].get<double>() == 0.2);
  CHECK(cfg.json["smatrix"]["freq"]["n"].get<int>() == 21);

  // A bad override is caught by the schema.
  setenv("TRIRING_circuit__bogus", "1", 1);
  CHECK_THROWS_AS(io::load_config(cfg_path.string(), "smatrix"), SchemaError);
  unsetenv("TRIRING_circuit__bogus");
}

TEST_CASE("typed extraction") {
  const json cfg = minimal_smatrix_config();
  const auto params = io::circuit_from_config(cfg);
  CHECK(params.ej[2] == 12.06);
  CHECK(params.kappa == 0.119);
  const auto bias = io::bias_from_json(cfg["smatrix"]["bias"]);
  CHECK(bias.phi_b == 2.7);
  const auto grid = io::grid_from_json(cfg["smatrix"]["freq"]);
  CHECK(grid.size() == 11);
  CHECK(grid.front() == 5.5);
  CHECK(grid.back() == 6.5);
}

TEST_CASE("csv round trip is lossless") {
  TempDir dir;
  const auto path = (dir.path / "t.csv").string();
  io::CsvTable table;
  table.header = {"a", "b"};
  const double values[] = {1.0 / 3.0, 6.2831853071795864769,
                           1.2345678901234567e-300, -0.0, 52.5};
  for (double v : values) {
    table.rows.push_back({io::format_double(v), "x"});
  }
  io::write_csv(path, table);
  const auto back = io::read_csv(path);
  REQUIRE(back.rows.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(io::parse_double(back.rows[i][0], "t") == values[i]);
  }
}

TEST_CASE("csv rejects malformed rows with a line number") {
  TempDir dir;
  const auto path = (dir.path / "bad.csv").string();
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3\n";
  }
  try {
    io::read_csv(path);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("sha256 known vectors") {
  CHECK(io::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // Multi-block message.
  CHECK(io::sha256_hex(std::string(1000, 'a')) ==
        "41edece42d63e8d9bf515a9ba6932e1c20cbc9f5a5d134645adb5db1b9737ea3");
}

TEST_CASE("manifest is written atomically") {
  TempDir dir;
  const auto path = (dir.path / "manifest.json").string();
  io::RunManifest m;
  m.command = "smatrix";
  m.config_sha256 = io::sha256_hex("{}");
  m.started_utc = io::utc_now_iso8601();
  m.finished_utc = io::utc_now_iso8601();
  m.outputs = {"a.csv"};
  io::write_manifest(path, m);
  CHECK(std::filesystem::exists(path));
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));

  std::ifstream in(path);
  const json back = json::parse(in);
  CHECK(back["command"] == "smatrix");
  CHECK(back["tool_version"] == io::tool_version);
  CHECK(back["outputs"][0] == "a.csv");
}
