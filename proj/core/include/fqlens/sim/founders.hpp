// =============================================================================
// founders.hpp - Generation-0 populations.
//
// Synthetic founders draw one allele frequency per locus and deme, then each
// founder haplotype allele as Bernoulli(frequency). Frequency models:
//
//   independent      every deme draws from its own Beta(a, b) profile
//   shared           one Beta(a, b) draw per locus, used by every deme
//   balding_nichols  ancestral p ~ Beta(a, b); deme frequency
//                    ~ Beta(p(1−F)/F, (1−p)(1−F)/F) with divergence F
//
// Sexes alternate female, male within each deme. Founder genomes occupy rows
// (2·id, 2·id + 1) of the returned matrix.
// =============================================================================
#pragma once

#include "fqlens/io/genetic_map.hpp"
#include "fqlens/panel.hpp"
#include "fqlens/sim/pedigree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fqlens::sim {

enum class FounderModel { independent, shared, balding_nichols };

struct BetaProfile {
    double a = 0.5;
    double b = 0.5;
};

struct FounderSpec {
    std::vector<std::uint32_t> counts;  ///< per deme, aligned with the deme list
    std::size_t n_loci = 5000;
    FounderModel model = FounderModel::independent;
    /// One profile per deme (independent) or a single ancestral profile.
    std::vector<BetaProfile> profiles{BetaProfile{}};
    double divergence = 0.05;  ///< balding_nichols F
};

struct FounderPopulation {
    Pedigree pedigree;
    BitMatrix genomes;
    std::vector<LocusMeta> loci;
};

/// `n` loci spread evenly over the map's chromosomes in proportion to their
/// base-pair span. Throws ConfigError when the map cannot hold them.
std::vector<LocusMeta> spread_loci(const io::GeneticMap& map, std::size_t n);

/// Throws ConfigError for fewer than 2 founders in a deme or bad profiles.
FounderPopulation synth_founders(const std::vector<std::string>& demes, const FounderSpec& spec,
                                 const io::GeneticMap& map, std::uint64_t seed);

/// Founders read from a panel: each sample's two haplotypes form one
/// individual; populations must be exactly the deme list.
FounderPopulation founders_from_panel(const HaplotypePanel& panel, const std::vector<std::string>& demes);

}  // namespace fqlens::sim
