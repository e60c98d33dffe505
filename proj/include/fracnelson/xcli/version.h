#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace fracnelson::xcli {

std::string library_version();

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Hash of the canonical (sorted-key, compact) dump.
std::string content_hash(const nlohmann::json& j);

}  // namespace fracnelson::xcli
