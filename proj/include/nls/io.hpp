#pragma once

// Field and record persistence. A field file is self-describing: a fixed
// little-endian header (magic, format version, N, n1, n2, L1, L2, phase)
// followed by interleaved (Re, Im) doubles in node order. Values round-trip
// bit-exactly.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "nls/grid.hpp"
#include "nls/minimizer.hpp"

namespace nls {

void save_field(const std::filesystem::path& path, const Field& w);
Field load_field(const std::filesystem::path& path);  // throws InputError

// Columns i, k, x1, rho, re, im with 17 significant digits.
void save_field_csv(const std::filesystem::path& path, const Field& w);

nlohmann::json grid_to_json(const Grid& g);
Grid grid_from_json(const nlohmann::json& j);

// <stem>.json holds the record (with "field_file" naming <stem>.bin).
void save_record(const std::filesystem::path& stem, const SolitonRecord& r);
SolitonRecord load_record(const std::filesystem::path& json_path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace nls
