// =============================================================================
// simulator.hpp - Discrete-generation forward simulation and its time series.
//
// One step: pair generation g (mating.hpp) under ρ(·, g); each couple i draws
// Poisson(λ) children and a fair-coin sex per child from stream
// (fertility, g, i), then one maternal and one paternal gamete per child from
// stream (gametes, g, i). Children join their mother's deme. A step with no
// children leaves the simulation extinct at generation g.
//
// Per generation, with the demes present as populations: one-vs-rest F_q of
// every deme against the rest and its leave-one-out ΔF_q, at each configured
// q. Haplotype row 0 of an individual is maternal, row 1 paternal.
// =============================================================================
#pragma once

#include "fqlens/panel.hpp"
#include "fqlens/sim/config.hpp"
#include "fqlens/sim/gamete.hpp"
#include "fqlens/sim/kinship.hpp"
#include "fqlens/sim/mating.hpp"
#include "fqlens/sim/pedigree.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fqlens::sim {

enum class RunStatus { completed, extinct };

struct DemeStatistic {
    std::uint32_t generation = 0;
    std::string deme;
    std::string statistic;  ///< "ovr" or "loo"
    double q = 0.0;
    std::optional<double> value;  ///< empty when undefined
    std::size_t loci_used = 0;
    std::size_t loci_skipped = 0;
};

struct CensusRow {
    std::uint32_t generation = 0;
    std::string deme;
    std::size_t individuals = 0;
    std::size_t females = 0;
    std::size_t males = 0;
};

struct StepReport {
    std::uint32_t parents_generation = 0;
    PairingStats pairing;
    std::size_t children = 0;
    std::size_t crossovers = 0;
};

class Simulator {
public:
    /// Builds the map and generation 0. Throws ConfigError.
    explicit Simulator(SimConfig config);

    const SimConfig& config() const noexcept { return cfg_; }
    std::uint32_t generation() const noexcept { return generation_; }
    bool extinct() const noexcept { return extinct_; }

    const Pedigree& pedigree() const noexcept { return ped_; }
    Pedigree release_pedigree() { return std::move(ped_); }
    std::span<const IndividualId> members() const noexcept { return ped_.generation(generation_); }
    /// Rows (2k, 2k+1) hold the haplotypes of members()[k].
    const BitMatrix& genomes() const noexcept { return genomes_; }
    const std::vector<LocusMeta>& loci() const noexcept { return loci_; }
    /// Couples formed by each completed step, indexed by parents' generation.
    const std::vector<std::vector<Couple>>& unions() const noexcept { return unions_; }

    StepReport step(unsigned threads = 1);

    std::vector<CensusRow> census() const;
    /// Statistics of the current generation; undefined values are kept as
    /// empty rows.
    std::vector<DemeStatistic> statistics(unsigned threads = 1) const;
    /// Current generation as a haplotype panel (sample id = individual id).
    HaplotypePanel panel() const;

private:
    SimConfig cfg_;
    io::GeneticMap map_;
    std::unique_ptr<GameteMaker> gametes_;
    Pedigree ped_;
    BitMatrix genomes_;
    std::vector<LocusMeta> loci_;
    std::uint32_t generation_ = 0;
    bool extinct_ = false;
    std::vector<std::vector<Couple>> unions_;
};

struct RunOptions {
    unsigned threads = 1;
    /// Called with every generation's panel (generation 0 included).
    std::function<void(std::uint32_t, const HaplotypePanel&)> on_panel;
};

struct RunResult {
    RunStatus status = RunStatus::completed;
    std::uint32_t last_generation = 0;
    std::vector<DemeStatistic> stats;
    std::vector<CensusRow> census;
    std::vector<StepReport> steps;
    std::size_t undefined_statistics = 0;
    Pedigree pedigree;
    std::vector<std::vector<Couple>> unions;
};

RunResult run_experiment(const SimConfig& config, const RunOptions& options = {});

struct AuditReport {
    std::size_t individuals = 0;
    std::size_t unions = 0;
    std::vector<std::string> violations;
};

/// Post-hoc check of a run: pedigree structure, parents drawn from the
/// previous generation, one union per individual and every union eligible
/// under the rule table with the given kinship window.
AuditReport audit_run(const Pedigree& pedigree, const std::vector<std::vector<Couple>>& unions,
                      unsigned kinship_window);

}  // namespace fqlens::sim
