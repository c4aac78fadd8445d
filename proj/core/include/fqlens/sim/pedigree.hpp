// =============================================================================
// pedigree.hpp - Append-only genealogy of simulated (or fixture) individuals.
//
// Ids are dense and assigned in insertion order, so a parent always has a
// smaller id than its child and the graph is acyclic by construction.
// generation(child) = max(generation(parents)) + 1; founders sit at 0.
//
// TSV export (one row per individual, ids equal row order):
//   id  sex  deme  generation  mother  father      ('.' = founder)
// =============================================================================
#pragma once

#include "fqlens/sex.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fqlens::sim {

using IndividualId = std::uint32_t;
inline constexpr IndividualId kNoParent = std::numeric_limits<IndividualId>::max();

struct Individual {
    IndividualId id = 0;
    Sex sex = Sex::female;
    std::uint16_t deme = 0;
    std::uint32_t generation = 0;
    IndividualId mother = kNoParent;
    IndividualId father = kNoParent;

    bool is_founder() const noexcept { return mother == kNoParent; }
};

class Pedigree {
public:
    Pedigree() = default;
    explicit Pedigree(std::vector<std::string> deme_names);

    IndividualId add_founder(Sex sex, std::uint16_t deme);
    /// Throws ConfigError unless mother is female and father male.
    IndividualId add_child(IndividualId mother, IndividualId father, Sex sex, std::uint16_t deme);

    std::size_t size() const noexcept { return people_.size(); }
    bool contains(IndividualId id) const noexcept { return id < people_.size(); }
    /// Throws LookupError.
    const Individual& at(IndividualId id) const;
    const Individual& operator[](IndividualId id) const noexcept { return people_[id]; }

    std::uint32_t n_generations() const noexcept {
        return static_cast<std::uint32_t>(by_generation_.size());
    }
    /// Members of one generation in id order (empty past the last one).
    std::span<const IndividualId> generation(std::uint32_t g) const noexcept;

    const std::vector<std::string>& deme_names() const noexcept { return demes_; }
    /// Index of a deme name, appending it when new.
    std::uint16_t deme_index(const std::string& name);
    const std::string& deme_name(std::uint16_t d) const { return demes_.at(d); }

    /// Re-checks every structural invariant; returns human-readable
    /// violations (empty when valid).
    std::vector<std::string> audit() const;

    friend bool operator==(const Pedigree& a, const Pedigree& b);

private:
    IndividualId push(Individual ind);

    std::vector<std::string> demes_;
    std::vector<Individual> people_;
    std::vector<std::vector<IndividualId>> by_generation_;
};

void write_pedigree_tsv(const Pedigree& ped, std::ostream& out);
void write_pedigree_tsv(const Pedigree& ped, const std::filesystem::path& path);
/// Throws ParseError with the line number.
Pedigree read_pedigree_tsv(std::istream& in);
Pedigree read_pedigree_tsv(const std::filesystem::path& path);

}  // namespace fqlens::sim
