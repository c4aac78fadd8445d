// =============================================================================
// output.hpp - Long-format result tables, their CSV/JSON rendering and the
// run manifest written next to every output file.
//
// CSV files open with '#' comment lines (tool version, seed, RNG, manifest
// reference, unit/sign notes) followed by one header row. Floating-point
// cells use 17 significant digits; an empty cell (JSON null) marks a value
// that is undefined or was not requested.
// =============================================================================
#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fqlens::cli {

/// Bumped whenever a column set changes.
inline constexpr int kColumnsVersion = 1;

enum class Format { csv, json };

using Cell = std::variant<std::monostate, std::string, double, std::int64_t>;

Cell number(std::optional<double> v);
Cell integer(std::uint64_t v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

struct Preamble {
    std::string command;
    std::uint64_t seed = 0;
    std::string manifest;  ///< file name of the manifest, empty when none
    std::vector<std::string> notes;
};

/// "%.17g"; non-finite values render as an empty string.
std::string format_double(double v);

void write_table(std::ostream& out, const Table& table, const Preamble& pre, Format fmt);

/// Writes to `path`, creating parent directories. Throws ConfigError.
void write_table_file(const std::filesystem::path& path, const Table& table, const Preamble& pre,
                      Format fmt);

class Manifest {
public:
    Manifest(std::string command, std::vector<std::string> argv);

    void set_seed(std::uint64_t seed) { doc_["seed"] = seed; }
    void set_config(nlohmann::json config) { doc_["config"] = std::move(config); }
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }
    void add_skipped(std::uint64_t n) { skipped_ += n; }

    /// Stamps the end time and writes the document.
    void write(const std::filesystem::path& path);

private:
    nlohmann::json doc_;
    std::uint64_t skipped_ = 0;
};

/// ISO-8601 UTC timestamp with second resolution.
std::string utc_timestamp(std::chrono::system_clock::time_point t);

}  // namespace fqlens::cli
