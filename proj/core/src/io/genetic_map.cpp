#include "fqlens/io/genetic_map.hpp"

#include "fqlens/error.hpp"
#include "fqlens/panel.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace fqlens::io {

ChromosomeMap::ChromosomeMap(std::vector<std::uint64_t> positions, std::vector<double> cm)
    : pos_(std::move(positions)), cm_(std::move(cm)) {
    if (pos_.empty() || pos_.size() != cm_.size()) throw FormatError("genetic map needs at least one knot");
    for (std::size_t i = 0; i < cm_.size(); ++i) {
        if (!std::isfinite(cm_[i])) throw FormatError("non-finite cM value in genetic map");
        if (i == 0) continue;
        if (pos_[i] <= pos_[i - 1]) throw FormatError("genetic map positions not strictly increasing");
        if (cm_[i] < cm_[i - 1]) throw FormatError("genetic map cM column decreases");
    }
}

double ChromosomeMap::cm_at(double x) const noexcept {
    if (x <= static_cast<double>(pos_.front())) return cm_.front();
    if (x >= static_cast<double>(pos_.back())) return cm_.back();
    // First knot strictly to the right of x.
    const auto it = std::upper_bound(pos_.begin(), pos_.end(), x,
                                     [](double v, std::uint64_t p) { return v < static_cast<double>(p); });
    const std::size_t j = static_cast<std::size_t>(it - pos_.begin());
    const double x0 = static_cast<double>(pos_[j - 1]);
    const double x1 = static_cast<double>(pos_[j]);
    return cm_[j - 1] + (cm_[j] - cm_[j - 1]) * (x - x0) / (x1 - x0);
}

double ChromosomeMap::position_at(double c) const noexcept {
    if (c <= cm_.front()) return static_cast<double>(pos_.front());
    if (c >= cm_.back()) {
        // Leftmost knot already at the final cM.
        const auto it = std::lower_bound(cm_.begin(), cm_.end(), cm_.back());
        return static_cast<double>(pos_[static_cast<std::size_t>(it - cm_.begin())]);
    }
    // First knot with cM >= c; the segment ending there has a positive rise.
    const auto it = std::lower_bound(cm_.begin(), cm_.end(), c);
    const std::size_t j = static_cast<std::size_t>(it - cm_.begin());
    if (cm_[j] == c) {
        return static_cast<double>(pos_[j]);
    }
    const double x0 = static_cast<double>(pos_[j - 1]);
    const double x1 = static_cast<double>(pos_[j]);
    return x0 + (x1 - x0) * (c - cm_[j - 1]) / (cm_[j] - cm_[j - 1]);
}

void GeneticMap::add(const std::string& chromosome, ChromosomeMap male, ChromosomeMap female) {
    if (!maps_.emplace(chromosome, std::make_pair(std::move(male), std::move(female))).second) {
        throw FormatError("chromosome '" + chromosome + "' listed twice in genetic map");
    }
}

const ChromosomeMap& GeneticMap::chromosome(const std::string& name, Sex sex) const {
    auto it = maps_.find(name);
    if (it == maps_.end()) throw LookupError("chromosome '" + name + "' not in genetic map");
    return sex == Sex::male ? it->second.first : it->second.second;
}

std::vector<std::string> GeneticMap::chromosomes() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : maps_) out.push_back(k);
    std::sort(out.begin(), out.end(), chromosome_less);
    return out;
}

GeneticMap GeneticMap::uniform(const std::vector<std::pair<std::string, std::uint64_t>>& lengths_bp,
                               double cm_per_mb) {
    if (!(cm_per_mb >= 0.0) || !std::isfinite(cm_per_mb)) throw ConfigError("cM/Mb rate must be >= 0");
    GeneticMap m;
    for (const auto& [name, len] : lengths_bp) {
        if (len == 0) throw ConfigError("chromosome '" + name + "' has zero length");
        const double total = static_cast<double>(len) * 1e-6 * cm_per_mb;
        ChromosomeMap c({0, len}, {0.0, total});
        m.add(name, c, c);
    }
    return m;
}

GeneticMap read_genetic_map(std::istream& in) {
    struct Columns {
        std::vector<std::uint64_t> pos;
        std::vector<double> male, female;
        std::size_t first_line = 0;
    };
    std::map<std::string, Columns> cols;
    std::vector<std::string> order;
    std::string line;
    std::size_t n = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++n;
        strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line, '\t');
        if (f.size() != 4) {
            throw FormatError("line " + std::to_string(n) + ": genetic map rows need 4 tab-separated columns");
        }
        const auto pos = parse_uint(f[1]);
        const auto cm_m = parse_double(f[2]);
        const auto cm_f = parse_double(f[3]);
        if (!pos || !cm_m || !cm_f) {
            if (!seen_data) {  // header row
                seen_data = true;
                continue;
            }
            throw FormatError("line " + std::to_string(n) + ": non-numeric genetic map field");
        }
        seen_data = true;
        auto [it, fresh] = cols.try_emplace(std::string(f[0]));
        auto& c = it->second;
        if (fresh) {
            c.first_line = n;
            order.push_back(it->first);
        } else {
            const std::string at = "line " + std::to_string(n) + ": ";
            if (*pos <= c.pos.back()) throw FormatError(at + "positions not sorted within chromosome " + it->first);
            if (*cm_m < c.male.back() || *cm_f < c.female.back()) {
                throw FormatError(at + "decreasing cM on chromosome " + it->first);
            }
        }
        c.pos.push_back(*pos);
        c.male.push_back(*cm_m);
        c.female.push_back(*cm_f);
    }
    if (cols.empty()) throw FormatError("genetic map has no rows");
    GeneticMap map;
    for (const auto& name : order) {
        auto& c = cols[name];
        try {
            map.add(name, ChromosomeMap(c.pos, c.male), ChromosomeMap(c.pos, c.female));
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(c.first_line) + ": " + e.what());
        }
    }
    return map;
}

GeneticMap read_genetic_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open genetic map " + path.string());
    try {
        return read_genetic_map(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_genetic_map(const GeneticMap& map, std::ostream& out) {
    out << "chromosome\tposition_bp\tcM_male\tcM_female\n";
    out << std::setprecision(17);
    for (const auto& name : map.chromosomes()) {
        const auto& m = map.chromosome(name, Sex::male);
        const auto& f = map.chromosome(name, Sex::female);
        for (std::size_t i = 0; i < m.positions().size(); ++i) {
            out << name << '\t' << m.positions()[i] << '\t' << m.cm()[i] << '\t' << f.cm()[i] << '\n';
        }
    }
}

}  // namespace fqlens::io
