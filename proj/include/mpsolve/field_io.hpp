#pragma once

#include <filesystem>
#include <string>

#include "mpsolve/grid.hpp"

namespace mps {

// Text field format:
//   line 1: N n1 n2 [n3]     (dimension and full node counts per axis)
//   line 2: extents per axis
//   then one value per line in row-major interior order, axis 0 fastest.
// Values use shortest round-trip decimal formatting, so write/parse is
// bit-exact.
void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

}  // namespace mps
