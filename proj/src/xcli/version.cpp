#include "fracnelson/xcli/version.h"

#include <cstdio>

#ifndef FRACNELSON_VERSION
#define FRACNELSON_VERSION "0.0.0"
#endif

namespace fracnelson::xcli {

std::string library_version() { return FRACNELSON_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// nlohmann::json objects are std::map backed, so dump() is already key-sorted.
std::string content_hash(const nlohmann::json& j) { return fnv1a_hex(j.dump()); }

}  // namespace fracnelson::xcli
