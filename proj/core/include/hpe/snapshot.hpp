#pragma once

#include <filesystem>
#include <iosfwd>

#include "hpe/spectral_field.hpp"

namespace hpe {

// Field snapshot text format:
//
//   m=<int> count=<int>
//   k1 k2 value
//   ...
//
// One triple per mode with |k| <= m, k1-major order, values printed with 17
// significant digits. The reader accepts any subset of modes in any order but
// rejects malformed lines, duplicate modes, out-of-range indices and count
// mismatches.

void write_snapshot(std::ostream& os, const SpectralField& field);
SpectralField read_snapshot(std::istream& is);

void save_snapshot(const std::filesystem::path& path, const SpectralField& field);
SpectralField load_snapshot(const std::filesystem::path& path);

}  // namespace hpe
