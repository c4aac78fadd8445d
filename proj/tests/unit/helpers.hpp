// Shared builders for unit tests.
#pragma once

#include "fqlens/panel.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(FQLENS_TEST_DATA_DIR) / name;
}

inline std::filesystem::path source_path(const std::string& rel) {
    return std::filesystem::path(FQLENS_SOURCE_DIR) / rel;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("fqlens_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// One population per entry of `alt_counts[k]`, `n_hap` haplotypes each; at
/// locus j the first alt_counts[k][j] haplotypes carry the alternate allele.
inline fqlens::HaplotypePanel counts_panel(const std::vector<std::string>& pops, std::size_t n_hap,
                                           const std::vector<std::vector<std::size_t>>& alt_counts) {
    const std::size_t n_loci = alt_counts.at(0).size();
    std::vector<fqlens::HaplotypeMeta> haps;
    for (const auto& p : pops) {
        for (std::size_t h = 0; h < n_hap; ++h) {
            haps.push_back({p + "_" + std::to_string(h / 2), static_cast<std::uint8_t>(h % 2), p});
        }
    }
    std::vector<fqlens::LocusMeta> loci;
    for (std::size_t j = 0; j < n_loci; ++j) {
        loci.push_back({"1", 1000 * (j + 1), "l" + std::to_string(j)});
    }
    fqlens::BitMatrix m(haps.size(), n_loci);
    for (std::size_t k = 0; k < pops.size(); ++k) {
        for (std::size_t j = 0; j < n_loci; ++j) {
            for (std::size_t h = 0; h < alt_counts[k][j]; ++h) m.set(k * n_hap + h, j, true);
        }
    }
    return fqlens::HaplotypePanel(std::move(haps), std::move(loci), std::move(m));
}

/// Random panel: populations drawn per haplotype, alleles Bernoulli(p_j)
/// with p_j uniform per locus. Deterministic in `seed`.
inline fqlens::HaplotypePanel random_panel(std::uint64_t seed, std::size_t n_hap, std::size_t n_loci,
                                           std::size_t n_pops = 3, std::size_t n_chrom = 2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<fqlens::HaplotypeMeta> haps;
    for (std::size_t h = 0; h < n_hap; ++h) {
        haps.push_back({"s" + std::to_string(h / 2), static_cast<std::uint8_t>(h % 2),
                        "pop" + std::to_string((h / 2) % n_pops)});
    }
    std::vector<fqlens::LocusMeta> loci;
    for (std::size_t j = 0; j < n_loci; ++j) {
        const std::size_t c = j * n_chrom / std::max<std::size_t>(n_loci, 1);
        loci.push_back({std::to_string(c + 1), 100 + 37 * j, "v" + std::to_string(j)});
    }
    fqlens::BitMatrix m(n_hap, n_loci);
    for (std::size_t j = 0; j < n_loci; ++j) {
        const double p = u(rng);
        for (std::size_t h = 0; h < n_hap; ++h) m.set(h, j, u(rng) < p);
    }
    return fqlens::HaplotypePanel(std::move(haps), std::move(loci), std::move(m));
}

}  // namespace testing
