#pragma once

#include <filesystem>
#include <json.hpp>

#include "zeitlin/basis.hpp"
#include "zeitlin/dynamics.hpp"

namespace zeitlin::io {

// ZFLD: "ZFLD", u32 version, u32 N, then N^2-1 (re, im) f64 pairs in flat
// order, then a CRC32 of everything before it. Little-endian.
void write_field(const std::filesystem::path& file, const basis::QuantizedField& w);
basis::QuantizedField read_field(const std::filesystem::path& file);

// {"N": n, "coeffs": [[l, m, re, im], ...]}; zero coefficients are omitted on
// output and default to zero on input.
nlohmann::json field_to_json(const basis::QuantizedField& w);
basis::QuantizedField field_from_json(const nlohmann::json& j);

// Dispatch on extension: .json is JSON, anything else ZFLD.
basis::QuantizedField load_field(const std::filesystem::path& file);
void save_field(const std::filesystem::path& file, const basis::QuantizedField& w);

// ZTRJ: "ZTRJ", u32 version, u32 N, u64 frames, then per frame f64 t and the
// ZFLD coefficient block, then CRC32.
void write_trajectory(const std::filesystem::path& file, const dynamics::Trajectory& tr);
dynamics::Trajectory read_trajectory(const std::filesystem::path& file);  // states and times only

}  // namespace zeitlin::io
