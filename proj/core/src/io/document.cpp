#include "document.hpp"

#include "fqlens/error.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <fstream>
#include <sstream>

namespace fqlens::io {

namespace {

nlohmann::json to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        auto obj = nlohmann::json::object();
        for (const auto& [k, v] : *t) obj[std::string(k.str())] = to_json(v);
        return obj;
    }
    if (const auto* a = node.as_array()) {
        auto arr = nlohmann::json::array();
        for (const auto& v : *a) arr.push_back(to_json(v));
        return arr;
    }
    if (const auto* s = node.as_string()) return s->get();
    if (const auto* i = node.as_integer()) return i->get();
    if (const auto* f = node.as_floating_point()) return f->get();
    if (const auto* b = node.as_boolean()) return b->get();
    // Dates and times have no numeric meaning here; keep their text.
    std::ostringstream os;
    node.visit([&](const auto& n) { os << n; });
    return os.str();
}

}  // namespace

nlohmann::json parse_document(std::string_view text, DocFormat format) {
    if (format == DocFormat::json) {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
        }
    }
    try {
        const auto table = toml::parse(text);
        return to_json(table);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
}

nlohmann::json load_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto fmt = path.extension() == ".json" ? DocFormat::json : DocFormat::toml;
    try {
        return parse_document(buf.str(), fmt);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace fqlens::io
