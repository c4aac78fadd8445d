// =============================================================================
// resampling.hpp - Equal-weight haplotype bootstrap with per-population caps.
//
// Replicate i, independently for every population (in sorted id order), draws
// min(n_pop, per_pop_cap) haplotypes uniformly with replacement from that
// population. All draws of replicate i come from RNG stream
// stream_id(bootstrap, 0, i), so replicate values do not depend on how
// replicates are scheduled across workers. Loci are never resampled.
//
// Confidence bands are nearest-rank percentile intervals over the replicates
// that produced a value.
// =============================================================================
#pragma once

#include "fqlens/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fqlens {

struct BootstrapConfig {
    std::size_t n_replicates = 100;
    std::size_t per_pop_cap = 40;
    double ci_level = 0.95;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

struct BootstrapSummary {
    double point = 0.0;  ///< statistic on the full, unresampled panel
    double ci_low = 0.0;
    double ci_high = 0.0;
    /// One entry per replicate; empty when the statistic was undefined.
    std::vector<std::optional<double>> replicate_values;
    std::size_t n_missing = 0;
    /// More than half of the replicates were undefined.
    bool unreliable = false;
};

/// Nearest-rank interval: ranks ⌈(1−level)/2·n⌉ and ⌈(1+level)/2·n⌉ of the
/// sorted values (1-based, clamped to [1, n]). Throws UndefinedStatistic on
/// an empty input and ConfigError on a level outside (0, 1).
std::pair<double, double> percentile_interval(std::span<const double> values, double level);
std::pair<double, double> percentile_interval(std::span<const std::optional<double>> values,
                                              double level);

/// Row indices (into `panel`) drawn for one replicate.
std::vector<std::size_t> draw_replicate_rows(const HaplotypePanel& panel,
                                             const BootstrapConfig& cfg, std::size_t replicate);

/// A statistic over a panel. Throwing UndefinedStatistic marks the replicate
/// missing; NaN entries of a vector statistic mark single entries missing.
using PanelStatistic = std::function<double(const HaplotypePanel&)>;
using PanelVectorStatistic = std::function<std::vector<double>(const HaplotypePanel&)>;

BootstrapSummary bootstrap_statistic(const HaplotypePanel& panel, const PanelStatistic& stat,
                                     const BootstrapConfig& cfg, unsigned threads = 1);

/// Bootstraps every entry of a vector statistic over one shared resample set.
std::vector<BootstrapSummary> bootstrap_vector(const HaplotypePanel& panel,
                                               const PanelVectorStatistic& stat,
                                               const BootstrapConfig& cfg, unsigned threads = 1);

}  // namespace fqlens
