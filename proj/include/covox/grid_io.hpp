// Copyright 2026 The covox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file grid_io.hpp
 * @brief Binary voxel grid files.
 *
 * Layout, all multi-byte fields little-endian:
 *
 *   offset size  field
 *   0      4     magic "C3SV"
 *   4      4     version (u32, currently 1)
 *   8      12    dims nx, ny, nz (3 x u32)
 *   20     4     resolution in metres (f32)
 *   24     12    grid origin (lower corner) in metres (3 x f32)
 *   36     1     label width in bytes (always 1)
 *   37     1     encoding: 0 dense, 1 run-length
 *   38     ...   payload
 *
 * Voxels are ordered x-fastest, then y, then z. A dense payload is one label
 * byte per voxel. A run-length payload is a sequence of (count u32, label u8)
 * pairs; writers emit the canonical form where adjacent runs never share a
 * label, and runs never have a zero count.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "covox/error.hpp"
#include "covox/voxel_grid.hpp"

// Resolution and origin are stored as 32-bit floats and read back through
// their shortest decimal form, so a round trip is exact for any spec whose
// fields have at most 7 significant digits (0.1, -38.4, ...).

namespace covox {

inline constexpr std::uint32_t kGridFileVersion = 1;
inline constexpr std::size_t kGridHeaderSize = 38;

enum class GridEncoding : std::uint8_t { Dense = 0, RunLength = 1 };

class GridFormatError : public Error {
 public:
  enum class Kind {
    BadMagic,
    VersionMismatch,
    Truncated,
    DimsMismatch,
    BadHeader,     // label width, encoding or geometry fields invalid
    InvalidLabel,  // label code >= 24
    Io,            // open / read / write failure
  };

  GridFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> encode_grid(const VoxelGrid& grid,
                                      GridEncoding encoding = GridEncoding::RunLength);
VoxelGrid decode_grid(const std::vector<std::uint8_t>& bytes);

void write_grid(const VoxelGrid& grid, const std::filesystem::path& path,
                GridEncoding encoding = GridEncoding::RunLength);
VoxelGrid read_grid(const std::filesystem::path& path);

}  // namespace covox
