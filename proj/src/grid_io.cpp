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

#include "covox/grid_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace covox {

namespace {

using Kind = GridFormatError::Kind;
constexpr char kMagic[4] = {'C', '3', 'S', 'V'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

// Widens through the shortest decimal that reproduces the float, so a field
// written from 0.1 or -38.4 reads back as exactly that double.
double get_f32(const std::uint8_t* p) {
  const float f = std::bit_cast<float>(get_u32(p));
  if (!std::isfinite(f)) return f;
  char buf[64];
  const auto printed = std::to_chars(buf, buf + sizeof buf, f);
  double out = f;
  std::from_chars(buf, printed.ptr, out);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_grid(const VoxelGrid& grid,
                                      GridEncoding encoding) {
  const GridSpec& spec = grid.spec();
  std::vector<std::uint8_t> out;
  out.reserve(kGridHeaderSize + (encoding == GridEncoding::Dense ? grid.size() : 64));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kGridFileVersion);
  for (int a = 0; a < 3; ++a) put_u32(out, static_cast<std::uint32_t>(spec.dims()[a]));
  put_f32(out, spec.resolution());
  for (int a = 0; a < 3; ++a) put_f32(out, spec.lower()[a]);
  out.push_back(1);
  out.push_back(static_cast<std::uint8_t>(encoding));

  const auto labels = grid.labels();
  if (encoding == GridEncoding::Dense) {
    for (Label l : labels) out.push_back(code(l));
    return out;
  }
  std::size_t n = 0;
  while (n < labels.size()) {
    const Label l = labels[n];
    std::size_t run = 1;
    while (n + run < labels.size() && labels[n + run] == l &&
           run < std::numeric_limits<std::uint32_t>::max()) {
      ++run;
    }
    put_u32(out, static_cast<std::uint32_t>(run));
    out.push_back(code(l));
    n += run;
  }
  return out;
}

VoxelGrid decode_grid(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw GridFormatError(Kind::BadMagic, "bad magic: not a C3SV grid file");
  }
  if (bytes.size() < kGridHeaderSize) {
    throw GridFormatError(Kind::Truncated, "truncated grid header");
  }
  const std::uint8_t* h = bytes.data();
  const std::uint32_t version = get_u32(h + 4);
  if (version != kGridFileVersion) {
    throw GridFormatError(Kind::VersionMismatch,
                          "unsupported grid file version " + std::to_string(version));
  }
  GridShape dims{};
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t d = get_u32(h + 8 + 4 * a);
    if (d == 0 || d > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
      throw GridFormatError(Kind::BadHeader, "grid dimension out of range");
    }
    dims[a] = static_cast<int>(d);
  }
  const double res = get_f32(h + 20);
  const Vec3 lower(get_f32(h + 24), get_f32(h + 28), get_f32(h + 32));
  if (h[36] != 1) {
    throw GridFormatError(Kind::BadHeader,
                          "unsupported label width " + std::to_string(h[36]));
  }
  const std::uint8_t encoding = h[37];
  if (encoding > 1) {
    throw GridFormatError(Kind::BadHeader,
                          "unknown payload encoding " + std::to_string(encoding));
  }
  GridSpec spec;
  try {
    spec = GridSpec::from_dims(lower, dims, res);
  } catch (const ConfigError& e) {
    throw GridFormatError(Kind::BadHeader, e.what());
  }

  const std::size_t count = spec.voxel_count();
  const std::uint8_t* payload = h + kGridHeaderSize;
  const std::size_t payload_size = bytes.size() - kGridHeaderSize;
  std::vector<Label> labels;
  labels.reserve(count);
  auto push = [&](std::uint8_t c, std::size_t times) {
    if (!is_valid_code(c)) {
      throw GridFormatError(Kind::InvalidLabel, "invalid label code " + std::to_string(c));
    }
    labels.insert(labels.end(), times, static_cast<Label>(c));
  };

  if (encoding == static_cast<std::uint8_t>(GridEncoding::Dense)) {
    if (payload_size < count) {
      throw GridFormatError(Kind::Truncated, "truncated dense payload");
    }
    if (payload_size > count) {
      throw GridFormatError(Kind::DimsMismatch,
                            "dense payload is longer than the grid dimensions");
    }
    for (std::size_t n = 0; n < count; ++n) push(payload[n], 1);
  } else {
    if (payload_size % 5 != 0) {
      throw GridFormatError(Kind::Truncated, "truncated run-length payload");
    }
    std::size_t total = 0;
    for (std::size_t off = 0; off < payload_size; off += 5) {
      const std::uint32_t run = get_u32(payload + off);
      if (run > count - total) {
        throw GridFormatError(Kind::DimsMismatch,
                              "run-length payload exceeds the grid dimensions");
      }
      push(payload[off + 4], run);
      total += run;
    }
    if (total != count) {
      throw GridFormatError(Kind::DimsMismatch,
                            "run-length payload covers " + std::to_string(total) +
                                " of " + std::to_string(count) + " voxels");
    }
  }
  return VoxelGrid(spec, std::move(labels));
}

void write_grid(const VoxelGrid& grid, const std::filesystem::path& path,
                GridEncoding encoding) {
  const auto bytes = encode_grid(grid, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw GridFormatError(Kind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw GridFormatError(Kind::Io, "failed writing " + path.string());
}

VoxelGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridFormatError(Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace covox
