// =============================================================================
// digest.hpp - SHA-256 digests for run manifests and fixture checks.
// =============================================================================
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fqlens {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Lower-case hex SHA-256 of a file's contents. Throws ConfigError when the
/// file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace fqlens
