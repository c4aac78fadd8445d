#include "output.hpp"

#include "fqlens/digest.hpp"
#include "fqlens/error.hpp"
#include "fqlens/rng.hpp"
#include "fqlens/version.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>

namespace fqlens::cli {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string render_csv(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return csv_field(*s);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return {};
}

std::string render_json(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return nlohmann::json(*s).dump();
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_double(*d) : "null";
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return "null";
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

Cell number(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return std::monostate{};
    return *v;
}

Cell integer(std::uint64_t v) { return static_cast<std::int64_t>(v); }

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw ConfigError("internal: table row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_table(std::ostream& out, const Table& table, const Preamble& pre, Format fmt) {
    const std::string manifest = pre.manifest.empty() ? "none" : pre.manifest;
    if (fmt == Format::csv) {
        out << "# fqlens " << kVersion << ' ' << pre.command << '\n'
            << "# seed: " << pre.seed << '\n'
            << "# rng: " << kRngName << '\n'
            << "# manifest: " << manifest << '\n'
            << "# columns_version: " << kColumnsVersion << '\n';
        for (const auto& n : pre.notes) out << "# " << n << '\n';
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? "," : "") << csv_field(table.columns[i]);
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render_csv(row[i]);
            out << '\n';
        }
        return;
    }

    // Hand-rolled so that numbers keep their 17 significant digits.
    out << "{\n  \"tool\": \"fqlens\",\n  \"version\": " << quoted(kVersion)
        << ",\n  \"command\": " << quoted(pre.command) << ",\n  \"seed\": " << pre.seed
        << ",\n  \"rng\": " << quoted(kRngName) << ",\n  \"manifest\": "
        << (pre.manifest.empty() ? "null" : quoted(pre.manifest))
        << ",\n  \"columns_version\": " << kColumnsVersion << ",\n  \"notes\": [";
    for (std::size_t i = 0; i < pre.notes.size(); ++i) out << (i ? ", " : "") << quoted(pre.notes[i]);
    out << "],\n  \"columns\": [";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? ", " : "") << quoted(table.columns[i]);
    }
    out << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << (r ? ",\n    {" : "\n    {");
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? ", " : "") << quoted(table.columns[i]) << ": " << render_json(table.rows[r][i]);
        }
        out << '}';
    }
    out << (table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_table_file(const std::filesystem::path& path, const Table& table, const Preamble& pre,
                      Format fmt) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_table(out, table, pre, fmt);
    if (!out.flush()) throw ConfigError("write failed: " + path.string());
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Manifest::Manifest(std::string command, std::vector<std::string> argv) {
    doc_["tool"] = "fqlens";
    doc_["version"] = kVersion;
    doc_["command"] = std::move(command);
    doc_["argv"] = std::move(argv);
    doc_["rng"] = kRngName;
    doc_["columns_version"] = kColumnsVersion;
    doc_["started_at"] = utc_timestamp(std::chrono::system_clock::now());
    doc_["inputs"] = nlohmann::json::array();
    doc_["outputs"] = nlohmann::json::array();
}

void Manifest::add_input(const std::filesystem::path& path) {
    doc_["inputs"].push_back({{"path", std::filesystem::absolute(path).string()},
                              {"sha256", sha256_file(path)}});
}

void Manifest::add_output(const std::filesystem::path& path, const std::vector<std::string>& columns) {
    nlohmann::json o{{"path", path.filename().string()}};
    if (!columns.empty()) o["columns"] = columns;
    doc_["outputs"].push_back(std::move(o));
}

void Manifest::write(const std::filesystem::path& path) {
    doc_["skipped_loci"] = skipped_;
    doc_["finished_at"] = utc_timestamp(std::chrono::system_clock::now());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << doc_.dump(2) << '\n';
}

}  // namespace fqlens::cli
