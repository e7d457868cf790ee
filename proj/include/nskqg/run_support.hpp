#pragma once
// Small helpers shared by the sweep and the CLI.

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>

#include "json.hpp"

namespace nskqg {

// FNV-1a 64 of the canonical (sorted-key) JSON dump, as 16 hex digits.
inline std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = hex[h & 0xF];
  return s;
}

// NSKQG_THREADS caps the worker count; default is the hardware concurrency.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* e = std::getenv("NSKQG_THREADS")) {
    const long v = std::strtol(e, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, unsigned(v));
  }
  return n;
}

}  // namespace nskqg
