#pragma once

// Config documents (TOML or JSON) normalised to one JSON tree.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string_view>

namespace fqlens::io {

enum class DocFormat { toml, json };

/// Throws ConfigError with the parser's position on malformed input.
nlohmann::json parse_document(std::string_view text, DocFormat format);

/// Format from the extension (.json → JSON, anything else → TOML).
nlohmann::json load_document(const std::filesystem::path& path);

}  // namespace fqlens::io
