#include "nls/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "nls/errors.hpp"

namespace nls {

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'L', 'S', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "field files are written in native little-endian order");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw InputError("field file: truncated header");
  return v;
}

}  // namespace

void save_field(const std::filesystem::path& path, const Field& w) {
  if (w.values.size() != w.grid.size()) throw InputError("save_field: size mismatch");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, w.grid.dim);
  put<std::int32_t>(os, w.grid.n1);
  put<std::int32_t>(os, w.grid.n2);
  put<double>(os, w.grid.L1);
  put<double>(os, w.grid.L2);
  put<double>(os, w.boundary_phase);
  os.write(reinterpret_cast<const char*>(w.values.data()),
           static_cast<std::streamsize>(w.values.size() * sizeof(cplx)));
  if (!os) throw InputError("write failed: " + path.string());
}

Field load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw InputError(path.string() + ": not a field file");
  if (get<std::uint32_t>(is) != kVersion)
    throw InputError(path.string() + ": unsupported field format version");
  const int dim = get<std::int32_t>(is);
  const int n1 = get<std::int32_t>(is);
  const int n2 = get<std::int32_t>(is);
  const double L1 = get<double>(is);
  const double L2 = get<double>(is);
  Field w;
  try {
    w.grid = Grid::make(dim, L1, L2, n1, n2);
  } catch (const ParameterError& e) {
    throw InputError(path.string() + ": invalid grid: " + e.what());
  }
  w.boundary_phase = get<double>(is);
  w.values.resize(w.grid.size());
  is.read(reinterpret_cast<char*>(w.values.data()),
          static_cast<std::streamsize>(w.values.size() * sizeof(cplx)));
  if (!is) throw InputError(path.string() + ": truncated data");
  if (is.peek() != std::char_traits<char>::eof())
    throw InputError(path.string() + ": trailing bytes");
  return w;
}

void save_field_csv(const std::filesystem::path& path, const Field& w) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  os << "i,k,x1,rho,re,im\n" << std::setprecision(17);
  for (int i = 0; i < w.grid.n1; ++i)
    for (int k = 0; k < w.grid.n2; ++k) {
      const cplx z = w.at(i, k);
      os << i << ',' << k << ',' << w.grid.x1(i) << ',' << w.grid.rho(k) << ','
         << z.real() << ',' << z.imag() << '\n';
    }
}

nlohmann::json grid_to_json(const Grid& g) {
  return {{"dim_N", g.dim}, {"L1", g.L1}, {"L2", g.L2}, {"n1", g.n1}, {"n2", g.n2}};
}

Grid grid_from_json(const nlohmann::json& j) {
  return Grid::make(j.at("dim_N").get<int>(), j.at("L1").get<double>(),
                    j.at("L2").get<double>(), j.at("n1").get<int>(), j.at("n2").get<int>());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw InputError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_record(const std::filesystem::path& stem, const SolitonRecord& r) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path js = stem;
  js += ".json";
  save_field(bin, r.field);
  nlohmann::json j = record_to_json(r);
  j["grid"] = grid_to_json(r.field.grid);
  j["field_file"] = bin.filename().string();
  write_json(js, j);
}

SolitonRecord load_record(const std::filesystem::path& json_path) {
  const nlohmann::json j = read_json(json_path);
  SolitonRecord r;
  try {
    r = record_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(json_path.string() + ": " + e.what());
  }
  r.field = load_field(json_path.parent_path() / j.at("field_file").get<std::string>());
  return r;
}

}  // namespace nls
