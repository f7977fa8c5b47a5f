#pragma once

#include <filesystem>
#include <string_view>

namespace cellbench {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace cellbench
