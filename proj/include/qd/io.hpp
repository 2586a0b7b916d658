#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

namespace qd {

inline constexpr const char* kVersion = "0.1.0";

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// one comment line recording tool version and the configuration hash
inline void write_csv_stamp(std::ostream& os, uint64_t config_hash) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "# qd %s; config-hash=%016llx\n", kVersion,
                static_cast<unsigned long long>(config_hash));
  os << buf;
}

}  // namespace qd
