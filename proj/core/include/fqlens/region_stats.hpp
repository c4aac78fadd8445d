// =============================================================================
// region_stats.hpp - Population-level F_q statistics over haplotype panels.
//
//   One-vs-Rest   focal population c against the haplotypes pooled from the
//                 rest of its region, two groups at weights (½, ½).
//   Regional      every population of a region at weight 1/K.
//   Leave-One-Out ΔF_q(c) = F_q(R) − F_q(R \ {c}); positive when c drives the
//                 regional structure, negative when c homogenizes it.
//
// Allele counts are gathered once per population into a CountTable so that
// many q values (a spectrum) reuse one pass over the bit matrix. Per-locus
// work runs in fixed-size locus chunks whose compensated partial sums are
// merged in chunk order, so results are identical for any worker count.
// =============================================================================
#pragma once

#include "fqlens/fq_stats.hpp"
#include "fqlens/panel.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fqlens {

struct GroupCounts {
    std::string label;
    std::uint64_t n_haplotypes = 0;
    std::vector<std::uint32_t> alt;  ///< alternate-allele count per locus
};

class CountTable {
public:
    CountTable(std::vector<GroupCounts> groups, std::size_t n_loci);

    /// One group per listed population, in the given order.
    static CountTable from_panel(const HaplotypePanel& panel,
                                 std::span<const std::string> populations, unsigned threads = 1);

    /// One group per row set of `m`.
    static CountTable from_rows(const BitMatrix& m, std::span<const std::string> labels,
                                std::span<const std::vector<std::size_t>> rows,
                                unsigned threads = 1);

    std::size_t n_groups() const noexcept { return groups_.size(); }
    std::size_t n_loci() const noexcept { return n_loci_; }
    const GroupCounts& group(std::size_t k) const { return groups_.at(k); }
    /// Throws LookupError.
    std::size_t index_of(const std::string& label) const;

private:
    std::vector<GroupCounts> groups_;
    std::size_t n_loci_ = 0;
};

struct StatOptions {
    unsigned threads = 1;
    /// When set, receives one LocusDiff per locus.
    std::vector<LocusDiff>* per_locus = nullptr;
};

MicroAverage ovr_fq(const CountTable& counts, std::size_t focal,
                    std::span<const std::size_t> region, QOrder q, const StatOptions& opt = {});

/// Equal-weight regional statistic. A single-population region yields 0.
MicroAverage regional_fq(const CountTable& counts, std::span<const std::size_t> region, QOrder q,
                         const StatOptions& opt = {});

double loo_influence(const CountTable& counts, std::span<const std::size_t> region,
                     std::size_t removed, QOrder q, unsigned threads = 1);

// ── Panel-level entry points ────────────────────────────────────────────────

using Region = std::vector<std::string>;

/// Per-locus two-group tables for focal vs. pooled rest of the region.
std::vector<LocusFreqTable> ovr_tables(const HaplotypePanel& panel, const std::string& focal,
                                       const Region& region);

MicroAverage ovr_fq(const HaplotypePanel& panel, const std::string& focal, const Region& region,
                    QOrder q, unsigned threads = 1);

MicroAverage regional_fq(const HaplotypePanel& panel, const Region& region, QOrder q,
                         unsigned threads = 1);

double loo_influence(const HaplotypePanel& panel, const Region& region,
                     const std::string& removed, QOrder q, unsigned threads = 1);

enum class SpectrumMode { ovr, loo, regional };

struct SpectrumRequest {
    SpectrumMode mode = SpectrumMode::regional;
    Region region;
    std::string population;  ///< focal (OVR) or removed (LOO) population
};

/// Point-estimate spectrum over `q_grid` (no confidence bands).
FqSpectrum fq_spectrum(const HaplotypePanel& panel, const SpectrumRequest& request,
                       std::span<const double> q_grid, unsigned threads = 1);

/// Same, over precomputed counts whose groups are the request's region.
std::vector<double> fq_spectrum_values(const CountTable& counts, const SpectrumRequest& request,
                                       std::span<const double> q_grid, unsigned threads = 1);

}  // namespace fqlens
