// Copyright 2026 The acdkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "acd/error.hpp"
#include "acd/voxel.hpp"

namespace acd {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = std::bit_cast<U>(value);
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>(bits & 0xFF);
    bits = static_cast<U>(bits >> 8);
  }
  out.write(bytes, sizeof(U));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw InputError("grid file is truncated");
  U bits = 0;
  for (std::size_t i = sizeof(U); i-- > 0;) bits = static_cast<U>((bits << 8) | bytes[i]);
  return std::bit_cast<T>(bits);
}

void write_header(std::ostream& out, const char* magic, const GridFrame& f) {
  out.write(magic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.resolution));
  put_le<double>(out, f.origin.x);
  put_le<double>(out, f.origin.y);
  put_le<double>(out, f.origin.z);
  put_le<double>(out, f.cell_size);
}

GridFrame read_header(std::istream& in, const char* magic) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw InputError(std::string("grid file does not start with ") + magic);
  }
  GridFrame f;
  f.resolution = static_cast<int>(get_le<std::uint32_t>(in));
  f.origin.x = get_le<double>(in);
  f.origin.y = get_le<double>(in);
  f.origin.z = get_le<double>(in);
  f.cell_size = get_le<double>(in);
  return f;
}

}  // namespace

void write_grid_rle(std::ostream& out, const VoxelGrid& grid) {
  write_header(out, "CVG1", grid.frame());
  const auto occ = grid.occupancy();
  std::size_t i = 0;
  while (i < occ.size()) {
    std::uint32_t empty = 0, full = 0;
    while (i < occ.size() && !occ[i]) ++empty, ++i;
    while (i < occ.size() && occ[i]) ++full, ++i;
    put_le<std::uint32_t>(out, empty);
    put_le<std::uint32_t>(out, full);
  }
}

VoxelGrid read_grid_rle(std::istream& in) {
  VoxelGrid grid(read_header(in, "CVG1"));
  const std::size_t total = grid.frame().cell_count();
  std::size_t i = 0;
  while (i < total) {
    const auto empty = get_le<std::uint32_t>(in);
    const auto full = get_le<std::uint32_t>(in);
    if (i + empty + full > total) throw InputError("grid runs exceed the cell count");
    i += empty;
    for (std::uint32_t k = 0; k < full; ++k) grid.set(static_cast<CellIndex>(i++));
  }
  return grid;
}

void write_grid_rle(const std::filesystem::path& path, const VoxelGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_grid_rle(out, grid);
}

VoxelGrid read_grid_rle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_grid_rle(in);
}

void write_label_grid_rle(std::ostream& out, const LabelGrid& grid) {
  if (grid.labels.size() != grid.frame.cell_count()) throw InputError("label grid size mismatch");
  write_header(out, "CVL1", grid.frame);
  std::size_t i = 0;
  while (i < grid.labels.size()) {
    const std::uint16_t id = grid.labels[i];
    std::uint32_t run = 0;
    while (i < grid.labels.size() && grid.labels[i] == id) ++run, ++i;
    put_le<std::uint16_t>(out, id);
    put_le<std::uint32_t>(out, run);
  }
}

LabelGrid read_label_grid_rle(std::istream& in) {
  LabelGrid grid;
  grid.frame = read_header(in, "CVL1");
  if (grid.frame.resolution < 2 || grid.frame.resolution > 1024) throw InputError("bad label grid resolution");
  const std::size_t total = grid.frame.cell_count();
  grid.labels.reserve(total);
  while (grid.labels.size() < total) {
    const auto id = get_le<std::uint16_t>(in);
    const auto run = get_le<std::uint32_t>(in);
    if (grid.labels.size() + run > total) throw InputError("label runs exceed the cell count");
    grid.labels.insert(grid.labels.end(), run, id);
  }
  return grid;
}

}  // namespace acd
