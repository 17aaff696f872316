#pragma once

#include <filesystem>

#include "gavg/field.hpp"
#include "json.hpp"

namespace gavg {

void to_json(nlohmann::json& j, const GridSpec& grid);
void from_json(const nlohmann::json& j, GridSpec& grid);
void to_json(nlohmann::json& j, const Schema& schema);
void from_json(const nlohmann::json& j, Schema& schema);

namespace detail {

nlohmann::json read_json_file(const std::filesystem::path& path);
// Writes j.dump(2) plus a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace detail
}  // namespace gavg
