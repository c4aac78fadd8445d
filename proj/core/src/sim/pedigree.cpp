#include "fqlens/sim/pedigree.hpp"

#include "fqlens/error.hpp"
#include "io/text.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace fqlens::sim {

Pedigree::Pedigree(std::vector<std::string> deme_names) : demes_(std::move(deme_names)) {}

IndividualId Pedigree::push(Individual ind) {
    if (people_.size() >= kNoParent) throw ConfigError("pedigree is full");
    ind.id = static_cast<IndividualId>(people_.size());
    if (ind.deme >= demes_.size()) throw ConfigError("deme index out of range");
    if (by_generation_.size() <= ind.generation) by_generation_.resize(ind.generation + 1);
    by_generation_[ind.generation].push_back(ind.id);
    people_.push_back(ind);
    return ind.id;
}

IndividualId Pedigree::add_founder(Sex sex, std::uint16_t deme) {
    Individual ind;
    ind.sex = sex;
    ind.deme = deme;
    return push(ind);
}

IndividualId Pedigree::add_child(IndividualId mother, IndividualId father, Sex sex, std::uint16_t deme) {
    const auto& m = at(mother);
    const auto& f = at(father);
    if (m.sex != Sex::female || f.sex != Sex::male) {
        throw ConfigError("parents " + std::to_string(mother) + " and " + std::to_string(father) +
                          " are not a female/male pair");
    }
    Individual ind;
    ind.sex = sex;
    ind.deme = deme;
    ind.mother = mother;
    ind.father = father;
    ind.generation = std::max(m.generation, f.generation) + 1;
    return push(ind);
}

const Individual& Pedigree::at(IndividualId id) const {
    if (!contains(id)) throw LookupError("unknown individual " + std::to_string(id));
    return people_[id];
}

std::span<const IndividualId> Pedigree::generation(std::uint32_t g) const noexcept {
    if (g >= by_generation_.size()) return {};
    return by_generation_[g];
}

std::uint16_t Pedigree::deme_index(const std::string& name) {
    auto it = std::find(demes_.begin(), demes_.end(), name);
    if (it != demes_.end()) return static_cast<std::uint16_t>(it - demes_.begin());
    if (demes_.size() >= 0xFFFF) throw ConfigError("too many demes");
    demes_.push_back(name);
    return static_cast<std::uint16_t>(demes_.size() - 1);
}

std::vector<std::string> Pedigree::audit() const {
    std::vector<std::string> bad;
    for (const auto& p : people_) {
        const std::string who = "individual " + std::to_string(p.id);
        if ((p.mother == kNoParent) != (p.father == kNoParent)) {
            bad.push_back(who + " has exactly one parent");
            continue;
        }
        if (p.is_founder()) {
            if (p.generation != 0) bad.push_back(who + " is a founder outside generation 0");
            continue;
        }
        if (p.mother >= p.id || p.father >= p.id) {
            bad.push_back(who + " precedes a parent (cycle)");
            continue;
        }
        const auto& m = people_[p.mother];
        const auto& f = people_[p.father];
        if (m.sex == f.sex) bad.push_back(who + " has same-sex parents");
        if (m.sex != Sex::female) bad.push_back(who + " has a male mother");
        if (p.generation != std::max(m.generation, f.generation) + 1) {
            bad.push_back(who + " breaks generation monotonicity");
        }
    }
    return bad;
}

bool operator==(const Pedigree& a, const Pedigree& b) {
    if (a.demes_ != b.demes_ || a.people_.size() != b.people_.size()) return false;
    for (std::size_t i = 0; i < a.people_.size(); ++i) {
        const auto& x = a.people_[i];
        const auto& y = b.people_[i];
        if (x.sex != y.sex || x.deme != y.deme || x.generation != y.generation || x.mother != y.mother ||
            x.father != y.father) {
            return false;
        }
    }
    return true;
}

void write_pedigree_tsv(const Pedigree& ped, std::ostream& out) {
    out << "id\tsex\tdeme\tgeneration\tmother\tfather\n";
    for (IndividualId i = 0; i < ped.size(); ++i) {
        const auto& p = ped[i];
        out << p.id << '\t' << to_string(p.sex) << '\t' << ped.deme_name(p.deme) << '\t' << p.generation << '\t';
        if (p.is_founder()) {
            out << ".\t.\n";
        } else {
            out << p.mother << '\t' << p.father << '\n';
        }
    }
}

void write_pedigree_tsv(const Pedigree& ped, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot create " + path.string());
    write_pedigree_tsv(ped, out);
}

Pedigree read_pedigree_tsv(std::istream& in) {
    Pedigree ped;
    std::string line;
    std::size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        io::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto f = io::split(line, '\t');
        if (!header) {
            header = true;
            if (f.size() == 6 && f[0] == "id") continue;
        }
        if (f.size() != 6) throw ParseError("pedigree rows need 6 tab-separated columns", n);
        const auto id = io::parse_uint(f[0]);
        if (!id || *id != ped.size()) {
            throw ParseError("pedigree ids must be 0, 1, 2, ... in row order", n);
        }
        Sex sex;
        if (f[1] == "F") {
            sex = Sex::female;
        } else if (f[1] == "M") {
            sex = Sex::male;
        } else {
            throw ParseError("sex must be F or M", n);
        }
        if (f[2].empty()) throw ParseError("empty deme", n);
        const auto deme = ped.deme_index(std::string(f[2]));
        const auto gen = io::parse_uint(f[3]);
        if (!gen) throw ParseError("invalid generation", n);
        try {
            IndividualId got;
            if (f[4] == "." && f[5] == ".") {
                got = ped.add_founder(sex, deme);
            } else {
                const auto m = io::parse_uint(f[4]);
                const auto fa = io::parse_uint(f[5]);
                if (!m || !fa || *m >= *id || *fa >= *id) {
                    throw ParseError("parents must be earlier rows (or '.' for founders)", n);
                }
                got = ped.add_child(static_cast<IndividualId>(*m), static_cast<IndividualId>(*fa), sex, deme);
            }
            if (ped[got].generation != *gen) {
                throw ParseError("generation column disagrees with parents (expected " +
                                     std::to_string(ped[got].generation) + ")",
                                 n);
            }
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), n);
        }
    }
    return ped;
}

Pedigree read_pedigree_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pedigree " + path.string(), 0);
    return read_pedigree_tsv(in);
}

}  // namespace fqlens::sim
