// =============================================================================
// mating.hpp - Panmixia schedules and single-pass monogamous pairing.
//
// Pairing for generation g: every member is visited once in a shuffled
// order. An already matched visitor is skipped. Otherwise, with probability
// ρ(visitor's deme, g) the candidate pool is every unmatched opposite-sex
// member of the other demes, else the unmatched opposite-sex members of the
// visitor's own deme. A uniformly random eligible candidate of the pool is
// taken; when the pool has none, the other pool is tried once, unless ρ makes
// that pool impossible (ρ = 0 never looks outside the deme, ρ = 1 never inside).
// Failing both, the visitor stays single this generation.
// =============================================================================
#pragma once

#include "fqlens/sim/kinship.hpp"
#include "fqlens/sim/pedigree.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fqlens::sim {

struct ScheduleEntry {
    std::uint32_t from_generation = 0;
    std::vector<double> rho;  ///< indexed by deme
};

class PanmixiaSchedule {
public:
    PanmixiaSchedule() = default;
    /// Throws ConfigError unless entries start at generation 0, strictly
    /// increase, list every deme and keep 0 ≤ ρ ≤ 1.
    PanmixiaSchedule(std::vector<std::string> demes,
                     const std::vector<std::pair<std::uint32_t, std::map<std::string, double>>>& entries);

    /// ρ governing the pairing of generation-g parents.
    double rho(std::uint16_t deme, std::uint32_t generation) const;

    const std::vector<std::string>& demes() const noexcept { return demes_; }
    const std::vector<ScheduleEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<std::string> demes_;
    std::vector<ScheduleEntry> entries_;
};

struct Couple {
    IndividualId mother = kNoParent;
    IndividualId father = kNoParent;
};

struct PairingStats {
    std::size_t couples = 0;
    std::size_t cross_deme = 0;
    std::size_t unmatched = 0;
    std::size_t refusals = 0;  ///< candidates drawn and found ineligible
};

/// Couples in formation order. Randomness comes only from
/// stream_id(pairing, generation, 0).
std::vector<Couple> pair_generation(const Pedigree& ped, std::uint32_t generation,
                                    const PanmixiaSchedule& schedule, const KinshipCalculator& kin,
                                    std::uint64_t seed, PairingStats* stats = nullptr);

}  // namespace fqlens::sim
