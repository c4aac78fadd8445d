// =============================================================================
// vcf.hpp - Phased biallelic variant-call text ingestion.
//
// Accepted subset: tab-separated records with columns CHROM POS ID REF ALT
// QUAL FILTER INFO FORMAT <samples...>; a single ALT allele; FORMAT contains
// GT; every genotype is one of 0|0, 0|1, 1|0, 1|1 (other subfields ignored).
// Each sample contributes two haplotype rows, index 0 = left of the '|'.
// Missing genotypes, unphased genotypes and multi-allelic records are parse
// errors carrying the line number and locus coordinates.
// =============================================================================
#pragma once

#include "fqlens/panel.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fqlens::io {

struct VcfRecord {
    LocusMeta locus;
    /// 2 entries per sample, in sample order: (left, right) allele.
    std::vector<std::uint8_t> alleles;
    std::size_t line = 0;
};

/// Streams records in file order; memory is bounded by one record.
class VcfReader {
public:
    explicit VcfReader(std::istream& in);
    explicit VcfReader(const std::filesystem::path& path);

    const std::vector<std::string>& samples() const noexcept { return samples_; }
    std::optional<VcfRecord> next();
    /// Line number of the last line consumed.
    std::size_t line_number() const noexcept { return line_no_; }

private:
    void read_header();

    std::ifstream file_;
    std::istream* in_;
    std::vector<std::string> samples_;
    std::size_t line_no_ = 0;
    std::string line_;
};

/// sample-id → population-id, from a two-column TSV ('#' comments allowed).
std::map<std::string, std::string> read_sample_map(const std::filesystem::path& path);

/// Reads every record, sorts loci by (chromosome, position) and builds the
/// panel. Throws ParseError.
HaplotypePanel read_vcf_subset(const std::filesystem::path& vcf,
                               const std::filesystem::path& sample_map);
HaplotypePanel read_vcf_subset(std::istream& vcf, const std::map<std::string, std::string>& sample_map);

}  // namespace fqlens::io
