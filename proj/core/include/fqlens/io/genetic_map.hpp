// =============================================================================
// genetic_map.hpp - Sex-specific recombination maps.
//
// TSV columns: chromosome, position_bp, cM_male, cM_female. An optional
// header row and '#' comments are skipped. Within a chromosome, positions are
// strictly increasing and both cM columns non-decreasing. Between knots the
// map is linear; outside the knot range it is constant (the first / last
// knot's cM).
// =============================================================================
#pragma once

#include "fqlens/sex.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fqlens::io {

/// One chromosome, one sex.
class ChromosomeMap {
public:
    ChromosomeMap() = default;
    /// Throws FormatError when the knots are not monotone.
    ChromosomeMap(std::vector<std::uint64_t> positions, std::vector<double> cm);

    double cm_at(double position_bp) const noexcept;
    /// Inverse of cm_at on [first_cm, last_cm]; on flat stretches returns the
    /// leftmost position with that cM.
    double position_at(double cm) const noexcept;

    double first_cm() const noexcept { return cm_.front(); }
    double last_cm() const noexcept { return cm_.back(); }
    double length_cm() const noexcept { return cm_.back() - cm_.front(); }
    std::uint64_t first_position() const noexcept { return pos_.front(); }
    std::uint64_t last_position() const noexcept { return pos_.back(); }

    const std::vector<std::uint64_t>& positions() const noexcept { return pos_; }
    const std::vector<double>& cm() const noexcept { return cm_; }

private:
    std::vector<std::uint64_t> pos_;
    std::vector<double> cm_;
};

class GeneticMap {
public:
    void add(const std::string& chromosome, ChromosomeMap male, ChromosomeMap female);

    bool has(const std::string& chromosome) const { return maps_.count(chromosome) != 0; }
    /// Throws LookupError for an unknown chromosome.
    const ChromosomeMap& chromosome(const std::string& name, Sex sex) const;
    /// Chromosome names in natural order.
    std::vector<std::string> chromosomes() const;

    double cm_at(const std::string& chromosome, Sex sex, double position_bp) const {
        return this->chromosome(chromosome, sex).cm_at(position_bp);
    }

    /// Same uniform rate for both sexes on every chromosome: knots at 0 and
    /// the chromosome length.
    static GeneticMap uniform(const std::vector<std::pair<std::string, std::uint64_t>>& lengths_bp,
                              double cm_per_mb);

private:
    std::map<std::string, std::pair<ChromosomeMap, ChromosomeMap>> maps_;  // (male, female)
};

/// Throws FormatError with the offending line number.
GeneticMap read_genetic_map(const std::filesystem::path& path);
GeneticMap read_genetic_map(std::istream& in);

/// Writes the TSV form read by read_genetic_map (with a header row).
void write_genetic_map(const GeneticMap& map, std::ostream& out);

}  // namespace fqlens::io
