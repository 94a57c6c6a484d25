#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "nls/checks.hpp"
#include "nls/errors.hpp"
#include "nls/io.hpp"

using namespace nls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nls_soliton_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("field files round-trip bit-exactly") {
  std::mt19937_64 rng(61);
  Field w = random_smooth_field(Grid::make(5, 3.5, 2.25, 19, 11), rng, 1.3);
  w.boundary_phase = 0.25;
  const fs::path p = scratch("w.bin");
  save_field(p, w);
  const Field r = load_field(p);
  CHECK(r.grid == w.grid);
  CHECK(r.boundary_phase == w.boundary_phase);
  CHECK(r.values == w.values);
}

TEST_CASE("corrupt field files are rejected") {
  const Field w = Field::constant(Grid::make(3, 2.0, 2.0, 9, 5));
  const fs::path p = scratch("c.bin");
  save_field(p, w);
  {
    std::ofstream f(p, std::ios::binary | std::ios::app);
    f.put('x');
  }
  CHECK_THROWS_AS(load_field(p), InputError);
  save_field(p, w);
  {
    std::fstream f(p, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.put('Z');
  }
  CHECK_THROWS_AS(load_field(p), InputError);
  save_field(p, w);
  fs::resize_file(p, fs::file_size(p) - 8);
  CHECK_THROWS_AS(load_field(p), InputError);
  CHECK_THROWS_AS(load_field(scratch("missing.bin")), InputError);
}

TEST_CASE("grid JSON") {
  const Grid g = Grid::make(4, 3.0, 4.0, 21, 13);
  CHECK(grid_from_json(grid_to_json(g)) == g);
  auto j = grid_to_json(g);
  j["n1"] = 2;
  CHECK_THROWS(grid_from_json(j));
}

TEST_CASE("records round-trip with their field") {
  SolitonRecord r;
  std::mt19937_64 rng(62);
  r.field = random_smooth_field(Grid::make(4, 3.0, 3.0, 17, 9), rng, 0.5);
  r.nu = 0.5;
  r.family = "J";
  r.lambda0 = 2.0;
  r.report = evaluate(r.field, make_gp(), 0.5);
  r.converged = true;
  r.status = "converged";
  const fs::path stem = scratch("rec");
  save_record(stem, r);
  const SolitonRecord b = load_record(fs::path(stem).replace_extension(".json"));
  CHECK(b.field.values == r.field.values);
  CHECK(b.field.grid == r.field.grid);
  CHECK(b.lambda0 == 2.0);
  CHECK(b.report.t == r.report.t);
}

TEST_CASE("CSV export has one row per node") {
  const Field w = Field::constant(Grid::make(3, 2.0, 2.0, 9, 5), 0.5);
  const fs::path p = scratch("w.csv");
  save_field_csv(p, w);
  std::ifstream f(p);
  std::string line;
  int rows = 0;
  std::getline(f, line);
  CHECK(line.find("re") != std::string::npos);
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 9 * 5);
}

TEST_CASE("malformed JSON is an input error") {
  const fs::path p = scratch("bad.json");
  std::ofstream(p) << "{ not json";
  CHECK_THROWS_AS(read_json(p), InputError);
}
