// =============================================================================
// fq_stats.hpp - Per-locus Tsallis differentiation and genome-wide averages.
//
// For a locus with group frequencies p_k and weights w_k (Σ w_k = 1):
//
//   p̄          = Σ_k w_k p_k
//   S_total    = S_q(p̄)
//   S_within   = Σ_k w_k S_q(p_k)
//   Δ_q        = S_total − S_within            (Jensen gap, ≥ 0)
//   F_q        = Δ_q / S_total                  (only when S_total > 0)
//
// Genome-wide values are micro-averages Σ_ℓ Δ_q(ℓ) / Σ_ℓ S_total(ℓ).
//
// Per-group terms are accumulated in a canonical order (sorted by frequency,
// then weight), so permuting the groups of a table never changes a result bit.
// =============================================================================
#pragma once

#include "fqlens/entropy.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fqlens {

/// Allele frequencies of K groups at one locus together with group weights.
class LocusFreqTable {
public:
    /// Throws DomainError / ConfigError when the invariants do not hold.
    /// Empty `group_ids` are replaced by "0", "1", ...
    LocusFreqTable(std::vector<double> freqs, std::vector<double> weights,
                   std::vector<std::string> group_ids = {});

    /// Weights 1/K for every group.
    static LocusFreqTable equal_weights(std::vector<double> freqs,
                                        std::vector<std::string> group_ids = {});

    std::size_t size() const noexcept { return freqs_.size(); }
    std::span<const double> freqs() const noexcept { return freqs_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const std::string> group_ids() const noexcept { return group_ids_; }

private:
    std::vector<double> freqs_;
    std::vector<double> weights_;
    std::vector<std::string> group_ids_;
};

/// Weighted pooled frequency p̄ = Σ w_k p_k.
AlleleFreq pooled_frequency(const LocusFreqTable& table);

struct LocusDiff {
    double s_total = 0.0;
    double s_within = 0.0;
    double delta = 0.0;
    std::optional<double> fq;  ///< absent when s_total == 0
};

LocusDiff locus_diff(const LocusFreqTable& table, QOrder q);

/// Classical F_ST = Var_w(p) / (p̄(1−p̄)). Throws UndefinedStatistic when the
/// pooled locus is monomorphic.
double fst_classic(const LocusFreqTable& table);

/// I(X; Y) = H(X) − Σ_k w_k H(X | Y=k), in nats.
double mutual_information(const LocusFreqTable& table);

struct MicroAverage {
    double value = 0.0;         ///< Σ Δ / Σ S_total
    double delta_sum = 0.0;
    double total_sum = 0.0;
    std::size_t loci_used = 0;     ///< loci with S_total > 0
    std::size_t loci_skipped = 0;  ///< monomorphic in the pool
};

/// Ratio of sums over loci; monomorphic loci contribute (0, 0) and are
/// tallied in `loci_skipped`. Throws UndefinedStatistic when no locus is
/// polymorphic in the pool.
MicroAverage micro_average(std::span<const LocusDiff> diffs);

/// F_q (or ΔF_q) evaluated over a grid of q, with optional bootstrap bands.
struct FqSpectrum {
    std::string label;
    std::vector<double> q_grid;
    std::vector<double> values;
    std::optional<std::vector<double>> ci_low;
    std::optional<std::vector<double>> ci_high;

    /// Checks grid ordering and lengths; throws ConfigError.
    void validate() const;
};

/// Checks that a q grid is non-empty, strictly increasing and positive.
void validate_q_grid(std::span<const double> q_grid);

/// Default grid used by the command-line tool.
std::vector<double> default_q_grid();

/// F_1 − F_2 on a spectrum whose grid contains both 1 and 2.
double slope_diagnostic(const FqSpectrum& spectrum);

namespace detail {

/// Core of locus_diff on raw arrays; `order` is scratch space of size k.
/// Inputs must already satisfy the table invariants.
LocusDiff locus_diff_raw(const double* freqs, const double* weights, std::size_t k, double q,
                         std::size_t* order) noexcept;

}  // namespace detail

}  // namespace fqlens
