#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gmt::cli {

/// Lower-case hex SHA-256 of a byte string.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);
/// Whole file as bytes; throws FormatError if it cannot be read.
[[nodiscard]] std::string read_bytes(const std::filesystem::path& path);

}  // namespace gmt::cli
