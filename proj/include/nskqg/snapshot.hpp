#pragma once
// Binary field snapshots: 32-byte header then little-endian f64 samples,
// row-major with the vertical index fastest.
//
//   bytes  0..3   magic "NSKF"
//   bytes  4..7   u32 version
//   bytes  8..11  u32 Nh
//   bytes 12..15  u32 Nv (1 for planar fields)
//   bytes 16..23  f64 Lh
//   bytes 24..31  u64 tag (config hash of the producing run, 0 if none)

#include <cstdint>
#include <string>

#include "nskqg/spectral_grid.hpp"

namespace nskqg {

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const ScalarField& f, std::uint64_t tag = 0);
ScalarField read_snapshot(const std::string& path, Parity parity = Parity::even);
std::uint64_t read_snapshot_tag(const std::string& path);

}  // namespace nskqg
