// =============================================================================
// panel.hpp - Bit-packed haplotype panels.
//
// A panel is a dense haplotype × locus matrix of biallelic alleles
// (0 = reference, 1 = alternate) with per-row sample/population labels and
// per-column coordinates. Rows are stored as 64-bit words, locus j of a row
// lives in bit (j % 64) of word (j / 64); padding bits are always zero.
// =============================================================================
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fqlens {

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t words_per_row() const noexcept { return stride_; }

    bool get(std::size_t r, std::size_t c) const noexcept {
        return (data_[r * stride_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) noexcept {
        auto& w = data_[r * stride_ + c / 64];
        const std::uint64_t bit = std::uint64_t{1} << (c % 64);
        w = v ? (w | bit) : (w & ~bit);
    }

    std::span<std::uint64_t> row(std::size_t r) noexcept {
        return {data_.data() + r * stride_, stride_};
    }
    std::span<const std::uint64_t> row(std::size_t r) const noexcept {
        return {data_.data() + r * stride_, stride_};
    }

    /// Number of alternate alleles in a row.
    std::size_t row_count(std::size_t r) const noexcept;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Mask with bits [begin, end) set inside a word array.
void set_bit_range(std::span<std::uint64_t> words, std::size_t begin, std::size_t end) noexcept;

struct HaplotypeMeta {
    std::string sample_id;
    std::uint8_t haplotype_index = 0;  ///< 0 = left of '|' in the source genotype
    std::string population;

    friend bool operator==(const HaplotypeMeta&, const HaplotypeMeta&) = default;
};

struct LocusMeta {
    std::string chromosome;
    std::uint64_t position = 0;  ///< base pairs
    std::string id;

    friend bool operator==(const LocusMeta&, const LocusMeta&) = default;
};

/// Natural chromosome order: optional "chr" prefix ignored, numeric names
/// ascending numerically and before non-numeric names, the rest lexicographic.
bool chromosome_less(const std::string& a, const std::string& b);

/// Total locus order by (chromosome, position).
bool locus_less(const LocusMeta& a, const LocusMeta& b);

class HaplotypePanel {
public:
    HaplotypePanel() = default;

    /// Validates dimensions and locus order; throws ConfigError.
    HaplotypePanel(std::vector<HaplotypeMeta> haplotypes, std::vector<LocusMeta> loci,
                   BitMatrix alleles);

    std::size_t n_haplotypes() const noexcept { return haplotypes_.size(); }
    std::size_t n_loci() const noexcept { return loci_.size(); }

    const BitMatrix& alleles() const noexcept { return alleles_; }
    const std::vector<HaplotypeMeta>& haplotypes() const noexcept { return haplotypes_; }
    const std::vector<LocusMeta>& loci() const noexcept { return loci_; }

    bool allele(std::size_t hap, std::size_t locus) const noexcept {
        return alleles_.get(hap, locus);
    }

    /// Sorted, distinct population ids.
    std::vector<std::string> populations() const;
    bool has_population(const std::string& pop) const;
    /// Row indices of one population, ascending. Throws LookupError.
    const std::vector<std::size_t>& rows_of(const std::string& pop) const;

    /// New panel made of the given rows (repetitions allowed), same loci.
    HaplotypePanel select_rows(std::span<const std::size_t> rows) const;
    /// New panel restricted to the given loci (ascending indices).
    HaplotypePanel select_loci(std::span<const std::size_t> loci) const;

    friend bool operator==(const HaplotypePanel& a, const HaplotypePanel& b) {
        return a.haplotypes_ == b.haplotypes_ && a.loci_ == b.loci_ && a.alleles_ == b.alleles_;
    }

private:
    std::vector<HaplotypeMeta> haplotypes_;
    std::vector<LocusMeta> loci_;
    BitMatrix alleles_;
    std::map<std::string, std::vector<std::size_t>> rows_by_pop_;
};

/// Per-locus alternate-allele counts over a multiset of rows of `m`.
/// Runs over `threads` workers; the result does not depend on the count.
std::vector<std::uint32_t> count_alternate(const BitMatrix& m, std::span<const std::size_t> rows,
                                           unsigned threads = 1);

/// Drops loci whose pooled minor-allele frequency is below `min_maf`.
/// A threshold of 0 keeps every locus.
HaplotypePanel filter_min_maf(const HaplotypePanel& panel, double min_maf);

}  // namespace fqlens
