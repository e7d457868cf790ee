#include "nskqg/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nskqg {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

void write_snapshot(const std::string& path, const ScalarField& f, std::uint64_t tag) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path);
  char header[32] = {};
  std::memcpy(header, "NSKF", 4);
  const std::uint32_t ver = kSnapshotVersion, nh = f.grid.Nh, nv = f.grid.Nv;
  std::memcpy(header + 4, &ver, 4);
  std::memcpy(header + 8, &nh, 4);
  std::memcpy(header + 12, &nv, 4);
  std::memcpy(header + 16, &f.grid.Lh, 8);
  std::memcpy(header + 24, &tag, 8);
  os.write(header, 32);
  os.write(reinterpret_cast<const char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write on snapshot: " + path);
}

ScalarField read_snapshot(const std::string& path, Parity parity) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot: " + path);
  char header[32];
  is.read(header, 32);
  if (!is || std::memcmp(header, "NSKF", 4) != 0) throw std::runtime_error("not a field snapshot: " + path);
  std::uint32_t ver, nh, nv;
  double lh;
  std::memcpy(&ver, header + 4, 4);
  std::memcpy(&nh, header + 8, 4);
  std::memcpy(&nv, header + 12, 4);
  std::memcpy(&lh, header + 16, 8);
  if (ver != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
  Grid g = nv == 1 ? make_plane(int(nh), lh) : make_grid(int(nh), int(nv), lh);
  ScalarField f(g, parity);
  is.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated snapshot: " + path);
  return f;
}

std::uint64_t read_snapshot_tag(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  char header[32];
  is.read(header, 32);
  if (!is || std::memcmp(header, "NSKF", 4) != 0) throw std::runtime_error("not a field snapshot: " + path);
  std::uint64_t tag;
  std::memcpy(&tag, header + 24, 8);
  return tag;
}

}  // namespace nskqg
