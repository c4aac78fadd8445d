#include "fqlens/sim/config.hpp"

#include "fqlens/error.hpp"
#include "fqlens/fq_stats.hpp"
#include "io/document.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace fqlens::sim {

namespace {

using nlohmann::json;

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(where + " must be a table");
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
            throw ConfigError("unknown key '" + k + "' in " + where);
        }
    }
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    return v.get<double>();
}

std::uint64_t unsigned_int(const json& v, const std::string& what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        std::size_t used = 0;
        try {
            const auto x = std::stoull(s, &used);
            if (used == s.size() && s[0] != '-') return x;
        } catch (...) {
        }
    }
    throw ConfigError(what + " must be a non-negative integer");
}

bool boolean(const json& v, const std::string& what) {
    if (!v.is_boolean()) throw ConfigError(what + " must be true or false");
    return v.get<bool>();
}

std::string string(const json& v, const std::string& what) {
    if (!v.is_string()) throw ConfigError(what + " must be a string");
    return v.get<std::string>();
}

BetaProfile profile(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(what + " must be a two-element array [a, b]");
    return {number(v[0], what), number(v[1], what)};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal();
}

std::string model_name(FounderModel m) {
    switch (m) {
        case FounderModel::independent: return "independent";
        case FounderModel::shared: return "shared";
        case FounderModel::balding_nichols: return "balding_nichols";
    }
    return "?";
}

SimConfig from_json(const json& doc, const std::filesystem::path& base) {
    allow_keys(doc, "config",
               {"seed", "generations", "offspring_lambda", "demes", "q", "kinship_window", "founders", "genome",
                "schedule", "output"});
    SimConfig c;
    if (doc.contains("seed")) c.seed = unsigned_int(doc["seed"], "seed");
    if (doc.contains("generations")) {
        const auto g = unsigned_int(doc["generations"], "generations");
        if (g > 0xFFFFFF) throw ConfigError("generations is too large");
        c.n_generations = static_cast<std::uint32_t>(g);
    }
    if (doc.contains("offspring_lambda")) c.offspring_lambda = number(doc["offspring_lambda"], "offspring_lambda");
    if (doc.contains("kinship_window")) {
        c.kinship_window = static_cast<unsigned>(
            std::min<std::uint64_t>(unsigned_int(doc["kinship_window"], "kinship_window"), 62));
    }
    if (!doc.contains("demes") || !doc["demes"].is_array()) throw ConfigError("demes must be an array of names");
    for (const auto& d : doc["demes"]) c.demes.push_back(string(d, "deme name"));
    if (doc.contains("q")) {
        if (!doc["q"].is_array()) throw ConfigError("q must be an array of orders");
        c.q_values.clear();
        for (const auto& q : doc["q"]) c.q_values.push_back(number(q, "q"));
    }

    // Founders.
    const json founders = doc.value("founders", json::object());
    allow_keys(founders, "[founders]", {"count", "loci", "model", "beta", "divergence", "panel"});
    c.founders.counts.assign(c.demes.size(), 60);
    if (founders.contains("count")) {
        const auto& n = founders["count"];
        if (n.is_object()) {
            for (const auto& [k, v] : n.items()) {
                if (std::find(c.demes.begin(), c.demes.end(), k) == c.demes.end()) {
                    throw ConfigError("founder count for unknown deme '" + k + "'");
                }
            }
            for (std::size_t d = 0; d < c.demes.size(); ++d) {
                if (!n.contains(c.demes[d])) throw ConfigError("founder count missing for deme '" + c.demes[d] + "'");
                c.founders.counts[d] = static_cast<std::uint32_t>(unsigned_int(n[c.demes[d]], "founder count"));
            }
        } else {
            c.founders.counts.assign(c.demes.size(),
                                     static_cast<std::uint32_t>(unsigned_int(n, "founder count")));
        }
    }
    if (founders.contains("loci")) c.founders.n_loci = unsigned_int(founders["loci"], "founders.loci");
    if (founders.contains("model")) {
        const auto m = string(founders["model"], "founders.model");
        if (m == "independent") {
            c.founders.model = FounderModel::independent;
        } else if (m == "shared") {
            c.founders.model = FounderModel::shared;
        } else if (m == "balding_nichols") {
            c.founders.model = FounderModel::balding_nichols;
        } else {
            throw ConfigError("founders.model must be independent, shared or balding_nichols");
        }
    }
    if (founders.contains("beta")) {
        const auto& b = founders["beta"];
        c.founders.profiles.clear();
        if (b.is_object()) {
            if (c.founders.model != FounderModel::independent) {
                throw ConfigError("per-deme Beta profiles need model = \"independent\"");
            }
            for (const auto& d : c.demes) {
                if (!b.contains(d)) throw ConfigError("Beta profile missing for deme '" + d + "'");
                c.founders.profiles.push_back(profile(b[d], "founders.beta." + d));
            }
        } else {
            c.founders.profiles.push_back(profile(b, "founders.beta"));
        }
    }
    if (founders.contains("divergence")) c.founders.divergence = number(founders["divergence"], "founders.divergence");
    if (founders.contains("panel")) c.founder_panel = resolve(base, string(founders["panel"], "founders.panel"));

    // Genome.
    const json genome = doc.value("genome", json::object());
    allow_keys(genome, "[genome]", {"map", "chromosomes", "length_bp", "cm_per_mb"});
    if (genome.contains("map")) c.genome.map_path = resolve(base, string(genome["map"], "genome.map"));
    if (genome.contains("chromosomes")) {
        c.genome.chromosomes = static_cast<std::uint32_t>(unsigned_int(genome["chromosomes"], "genome.chromosomes"));
    }
    if (genome.contains("length_bp")) c.genome.length_bp = unsigned_int(genome["length_bp"], "genome.length_bp");
    if (genome.contains("cm_per_mb")) c.genome.cm_per_mb = number(genome["cm_per_mb"], "genome.cm_per_mb");

    // Schedule.
    if (!doc.contains("schedule") || !doc["schedule"].is_array()) {
        throw ConfigError("schedule must be an array of [[schedule]] entries");
    }
    std::vector<std::pair<std::uint32_t, std::map<std::string, double>>> entries;
    for (const auto& e : doc["schedule"]) {
        allow_keys(e, "[[schedule]]", {"from_generation", "rho"});
        if (!e.contains("from_generation") || !e.contains("rho")) {
            throw ConfigError("schedule entries need from_generation and rho");
        }
        std::map<std::string, double> rho;
        if (!e["rho"].is_object()) throw ConfigError("schedule rho must be a table deme → value");
        for (const auto& [k, v] : e["rho"].items()) rho[k] = number(v, "rho." + k);
        entries.emplace_back(static_cast<std::uint32_t>(unsigned_int(e["from_generation"], "from_generation")), rho);
    }
    c.schedule = PanmixiaSchedule(c.demes, entries);

    const json output = doc.value("output", json::object());
    allow_keys(output, "[output]", {"panels", "pedigree"});
    if (output.contains("panels")) c.output.panels = boolean(output["panels"], "output.panels");
    if (output.contains("pedigree")) c.output.pedigree = boolean(output["pedigree"], "output.pedigree");

    c.validate();
    return c;
}

}  // namespace

void SimConfig::validate() const {
    if (n_generations < 1) throw ConfigError("generations must be at least 1");
    if (!(offspring_lambda > 0.0) || !std::isfinite(offspring_lambda)) {
        throw ConfigError("offspring_lambda must be positive");
    }
    if (demes.size() < 2) {
        throw ConfigError("one-vs-rest statistics need at least two demes (no rest group with one deme)");
    }
    if (std::set<std::string>(demes.begin(), demes.end()).size() != demes.size()) {
        throw ConfigError("deme names must be distinct");
    }
    if (schedule.demes() != demes) throw ConfigError("schedule demes do not match the deme list");
    if (q_values.empty()) throw ConfigError("q must list at least one order");
    validate_q_grid(q_values);
    if (kinship_window < 1) throw ConfigError("kinship_window must be at least 1");
    if (founder_panel.empty()) {
        if (founders.counts.size() != demes.size()) throw ConfigError("founder counts must cover every deme");
        for (std::size_t d = 0; d < demes.size(); ++d) {
            if (founders.counts[d] < 2) {
                throw ConfigError("deme '" + demes[d] + "' needs at least 2 founders (one of each sex)");
            }
        }
        if (founders.n_loci == 0) throw ConfigError("founders.loci must be positive");
    }
    if (genome.map_path.empty()) {
        if (genome.chromosomes == 0 || genome.length_bp == 0) {
            throw ConfigError("genome needs a map or positive chromosomes and length_bp");
        }
        if (!(genome.cm_per_mb >= 0.0)) throw ConfigError("genome.cm_per_mb must be >= 0");
    }
}

io::GeneticMap SimConfig::load_map() const {
    if (!genome.map_path.empty()) {
        try {
            return io::read_genetic_map(genome.map_path);
        } catch (const FormatError& e) {
            throw ConfigError(e.what());
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> lengths;
    for (std::uint32_t i = 1; i <= genome.chromosomes; ++i) lengths.emplace_back(std::to_string(i), genome.length_bp);
    return io::GeneticMap::uniform(lengths, genome.cm_per_mb);
}

std::string SimConfig::resolved_json() const {
    json j;
    j["seed"] = seed;
    j["generations"] = n_generations;
    j["offspring_lambda"] = offspring_lambda;
    j["demes"] = demes;
    j["q"] = q_values;
    j["kinship_window"] = kinship_window;
    json f;
    if (founder_panel.empty()) {
        json counts;
        for (std::size_t d = 0; d < demes.size(); ++d) counts[demes[d]] = founders.counts[d];
        f["count"] = counts;
        f["loci"] = founders.n_loci;
        f["model"] = model_name(founders.model);
        json beta = json::array();
        for (const auto& p : founders.profiles) beta.push_back({p.a, p.b});
        f["beta"] = beta;
        if (founders.model == FounderModel::balding_nichols) f["divergence"] = founders.divergence;
    } else {
        f["panel"] = std::filesystem::absolute(founder_panel).string();
    }
    j["founders"] = f;
    json g;
    if (!genome.map_path.empty()) {
        g["map"] = std::filesystem::absolute(genome.map_path).string();
    } else {
        g["chromosomes"] = genome.chromosomes;
        g["length_bp"] = genome.length_bp;
        g["cm_per_mb"] = genome.cm_per_mb;
    }
    j["genome"] = g;
    json sched = json::array();
    for (const auto& e : schedule.entries()) {
        json rho;
        for (std::size_t d = 0; d < demes.size(); ++d) rho[demes[d]] = e.rho[d];
        sched.push_back({{"from_generation", e.from_generation}, {"rho", rho}});
    }
    j["schedule"] = sched;
    j["output"] = {{"panels", output.panels}, {"pedigree", output.pedigree}};
    return j.dump();
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    try {
        return from_json(io::load_document(path), path.parent_path());
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path.string(), 0) == 0) throw;
        throw ConfigError(path.string() + ": " + msg);
    }
}

SimConfig parse_sim_config(std::string_view text, bool json_format, const std::filesystem::path& base_dir) {
    return from_json(io::parse_document(text, json_format ? io::DocFormat::json : io::DocFormat::toml), base_dir);
}

}  // namespace fqlens::sim
