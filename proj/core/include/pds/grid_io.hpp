#pragma once

#include <iosfwd>
#include <string>

#include "pds/grid.hpp"

namespace pds {

// Binary grid file format "PDSGRID1": 16-byte ASCII magic ("PDSGRID1" padded
// with spaces), three little-endian uint32 dims C, H, W, then C·H·W
// little-endian IEEE-754 doubles in row-major (c, h, w) order. Real grids
// only; the byte layout is independent of host endianness.

void write_grid(std::ostream& out, const Field& x);
void write_grid(const std::string& path, const Field& x);

Field read_grid(std::istream& in, const std::string& origin = "<stream>");
Field read_grid(const std::string& path);

// One-line summary "CxHxW min=… max=…" used by the CLI's info command.
std::string describe_grid(const Field& x);

}  // namespace pds
