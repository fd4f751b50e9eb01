#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lockbreak {

// Keeps glibc from returning the training temporaries to the OS between
// steps (page-fault churn otherwise dominates). Call once from main().
void tune_allocator() noexcept;

// Throws Error("io", ...) on failure.
std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace lockbreak
