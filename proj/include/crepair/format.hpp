#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace crepair {

// Every artifact (JSONL record, JSON document, checkpoint header) starts with
// this field; loaders reject anything else.
inline constexpr int kFormatVersion = 1;

void require_format_version(const nlohmann::json& j, std::string_view what);

}  // namespace crepair
