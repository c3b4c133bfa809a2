#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hfuv/path.hpp"

namespace hfuv {

/// Self-describing JSON document with every SamplePath field.
std::string path_to_json(const SamplePath& path);
SamplePath path_from_json(const std::string& text);

/// Binary dump: "HFUVPATH" magic, u32 version, scalar header, then
/// length-prefixed little-endian arrays (u64 length, 64-bit elements).
void write_path_binary(const SamplePath& path, std::ostream& out);
SamplePath read_path_binary(std::istream& in);

/// One increment per line; a non-numeric first line is treated as a header.
std::vector<double> read_increments_csv(std::istream& in);

}  // namespace hfuv
