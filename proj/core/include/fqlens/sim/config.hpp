// =============================================================================
// config.hpp - Simulation configuration (TOML or JSON).
//
//   seed = 7
//   generations = 17
//   offspring_lambda = 3.0
//   demes = ["WA", "EA", "CSN"]
//   q = [1.0, 2.0]                   # orders reported per generation
//   kinship_window = 4
//
//   [founders]
//   count = 60                       # or { WA = 60, EA = 40, CSN = 60 }
//   loci = 5000
//   model = "balding_nichols"        # independent | shared | balding_nichols
//   beta = [0.5, 0.5]                # or { WA = [a, b], ... } (independent)
//   divergence = 0.05                # balding_nichols only
//   # panel = "founders.fql"         # external founders instead of synthesis
//
//   [genome]
//   map = "maps/synthetic.tsv"       # or: chromosomes, length_bp, cm_per_mb
//
//   [[schedule]]
//   from_generation = 0
//   rho = { WA = 0.3, EA = 0.5, CSN = 0.1 }
//
//   [output]
//   panels = false                   # per-generation FQL1 panels
//   pedigree = true
//
// Relative paths resolve against the config file's directory. Unknown keys
// are rejected.
// =============================================================================
#pragma once

#include "fqlens/io/genetic_map.hpp"
#include "fqlens/sim/founders.hpp"
#include "fqlens/sim/mating.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fqlens::sim {

struct GenomeSpec {
    std::filesystem::path map_path;  ///< empty → uniform synthetic map
    std::uint32_t chromosomes = 1;
    std::uint64_t length_bp = 100'000'000;
    double cm_per_mb = 1.0;
};

struct OutputSpec {
    bool panels = false;
    bool pedigree = true;
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::uint32_t n_generations = 17;
    double offspring_lambda = 3.0;
    std::vector<std::string> demes;
    FounderSpec founders;
    std::filesystem::path founder_panel;
    GenomeSpec genome;
    PanmixiaSchedule schedule;
    std::vector<double> q_values{1.0, 2.0};
    unsigned kinship_window = 4;
    OutputSpec output;

    /// Throws ConfigError.
    void validate() const;
    /// Map named by `genome`, or the uniform synthetic one.
    io::GeneticMap load_map() const;
    /// Every resolved setting as a JSON object (paths absolute).
    std::string resolved_json() const;
};

SimConfig load_sim_config(const std::filesystem::path& path);
/// `json` selects the JSON reader, otherwise TOML. Relative paths resolve
/// against `base_dir`.
SimConfig parse_sim_config(std::string_view text, bool json, const std::filesystem::path& base_dir = {});

}  // namespace fqlens::sim
