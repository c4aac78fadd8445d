// =============================================================================
// gamete.hpp - Meiosis with sex-specific maps.
//
// Per chromosome, the crossover count is Poisson(map length in cM / 100) on
// the parent's map; crossover points are uniform on the cM axis and mapped
// back to base pairs through the inverse map. Each chromosome starts on a
// uniformly chosen parental haplotype and switches at each crossover, so the
// loci between two crossovers come from one haplotype. A locus at position x
// switches when a crossover lies strictly left of x.
// =============================================================================
#pragma once

#include "fqlens/io/genetic_map.hpp"
#include "fqlens/panel.hpp"
#include "fqlens/rng.hpp"
#include "fqlens/sex.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fqlens::sim {

class GameteMaker {
public:
    /// Throws ConfigError when a locus chromosome is missing from the map.
    GameteMaker(const io::GeneticMap& map, const std::vector<LocusMeta>& loci);

    std::size_t n_loci() const noexcept { return n_loci_; }
    std::size_t words() const noexcept { return (n_loci_ + 63) / 64; }

    /// Writes one gamete of a parent with haplotypes h0, h1 into `out`;
    /// returns the number of crossovers drawn.
    std::size_t make(std::span<const std::uint64_t> h0, std::span<const std::uint64_t> h1, Sex parent_sex,
                     Philox& rng, std::span<std::uint64_t> out) const;

private:
    struct Segment {
        std::size_t begin = 0, end = 0;      ///< locus index range of one chromosome
        const io::ChromosomeMap* maps[2]{};  ///< indexed by Sex
    };

    std::size_t n_loci_ = 0;
    std::vector<double> positions_;
    std::vector<Segment> chromosomes_;
};

}  // namespace fqlens::sim
