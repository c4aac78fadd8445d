#include "fqlens/io/region_spec.hpp"

#include "document.hpp"
#include "fqlens/error.hpp"
#include "fqlens/panel.hpp"

#include <algorithm>
#include <set>

namespace fqlens::io {

namespace {

RegionSpec from_json(const nlohmann::json& doc) {
    const nlohmann::json& table = doc.contains("regions") ? doc.at("regions") : doc;
    if (!table.is_object()) throw ConfigError("regions must be a table of population lists");
    RegionSpec spec;
    for (const auto& [name, pops] : table.items()) {
        if (!pops.is_array()) throw ConfigError("region '" + name + "' must be an array of population ids");
        auto& list = spec.regions[name];
        for (const auto& p : pops) {
            if (!p.is_string()) throw ConfigError("region '" + name + "' lists a non-string population");
            list.push_back(p.get<std::string>());
        }
    }
    spec.validate();
    for (auto& [name, list] : spec.regions) std::sort(list.begin(), list.end());
    return spec;
}

}  // namespace

void RegionSpec::validate() const {
    if (regions.empty()) throw ConfigError("region spec defines no regions");
    std::map<std::string, std::string> owner;
    for (const auto& [name, pops] : regions) {
        if (pops.empty()) throw ConfigError("region '" + name + "' is empty");
        std::set<std::string> seen;
        for (const auto& p : pops) {
            if (p.empty()) throw ConfigError("region '" + name + "' lists an empty population id");
            if (!seen.insert(p).second) throw ConfigError("region '" + name + "' lists '" + p + "' twice");
            auto [it, fresh] = owner.emplace(p, name);
            if (!fresh) {
                throw ConfigError("population '" + p + "' appears in regions '" + it->second + "' and '" +
                                  name + "'");
            }
        }
    }
}

void RegionSpec::check_against(const HaplotypePanel& panel) const {
    for (const auto& [name, pops] : regions) {
        for (const auto& p : pops) {
            if (!panel.has_population(p)) {
                throw ConfigError("region '" + name + "': population '" + p + "' has no haplotypes in the panel");
            }
        }
    }
}

RegionSpec RegionSpec::whole_panel(const HaplotypePanel& panel) {
    RegionSpec s;
    s.regions["all"] = panel.populations();
    return s;
}

RegionSpec load_region_spec(const std::filesystem::path& path) {
    try {
        return from_json(load_document(path));
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path.string(), 0) == 0) throw;
        throw ConfigError(path.string() + ": " + msg);
    }
}

RegionSpec parse_region_spec(std::string_view text, bool json) {
    return from_json(parse_document(text, json ? DocFormat::json : DocFormat::toml));
}

}  // namespace fqlens::io
