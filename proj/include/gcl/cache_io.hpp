#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

namespace gcl::cache {

/// Directory named by $GCL_CACHE_DIR, if set and non-empty.
std::optional<std::filesystem::path> directory_from_env();

/// Read a JSON document under an advisory shared lock; nullopt when the file
/// is missing or unreadable.
std::optional<nlohmann::json> read_json(const std::filesystem::path& path);

/// Atomically replace `path` (write to temp + rename) under an exclusive lock.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace gcl::cache
