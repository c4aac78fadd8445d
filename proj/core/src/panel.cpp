#include "fqlens/panel.hpp"

#include "fqlens/error.hpp"
#include "fqlens/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>

namespace fqlens {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_((cols + 63) / 64), data_(rows * ((cols + 63) / 64), 0) {}

std::size_t BitMatrix::row_count(std::size_t r) const noexcept {
    std::size_t n = 0;
    for (auto w : row(r)) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

void set_bit_range(std::span<std::uint64_t> words, std::size_t begin, std::size_t end) noexcept {
    if (begin >= end) return;
    std::size_t wb = begin / 64;
    const std::size_t we = (end - 1) / 64;
    const std::uint64_t first = ~std::uint64_t{0} << (begin % 64);
    const std::uint64_t last = ~std::uint64_t{0} >> (63 - (end - 1) % 64);
    if (wb == we) {
        words[wb] |= first & last;
        return;
    }
    words[wb++] |= first;
    for (; wb < we; ++wb) words[wb] = ~std::uint64_t{0};
    words[we] |= last;
}

namespace {

std::string strip_chr(const std::string& s) {
    if (s.size() > 3 && (s.compare(0, 3, "chr") == 0 || s.compare(0, 3, "Chr") == 0 ||
                         s.compare(0, 3, "CHR") == 0)) {
        return s.substr(3);
    }
    return s;
}

bool all_digits(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

bool chromosome_less(const std::string& a, const std::string& b) {
    const std::string sa = strip_chr(a);
    const std::string sb = strip_chr(b);
    const bool da = all_digits(sa);
    const bool db = all_digits(sb);
    if (da && db) {
        // Compare numerically without overflow: strip leading zeros, then length.
        auto trim = [](const std::string& s) {
            const auto nz = s.find_first_not_of('0');
            return nz == std::string::npos ? std::string("0") : s.substr(nz);
        };
        const std::string ta = trim(sa);
        const std::string tb = trim(sb);
        if (ta.size() != tb.size()) return ta.size() < tb.size();
        if (ta != tb) return ta < tb;
        return a < b;
    }
    if (da != db) return da;
    if (sa != sb) return sa < sb;
    return a < b;
}

bool locus_less(const LocusMeta& a, const LocusMeta& b) {
    if (a.chromosome != b.chromosome) return chromosome_less(a.chromosome, b.chromosome);
    return a.position < b.position;
}

HaplotypePanel::HaplotypePanel(std::vector<HaplotypeMeta> haplotypes, std::vector<LocusMeta> loci,
                               BitMatrix alleles)
    : haplotypes_(std::move(haplotypes)), loci_(std::move(loci)), alleles_(std::move(alleles)) {
    if (alleles_.rows() != haplotypes_.size() || alleles_.cols() != loci_.size()) {
        throw ConfigError("panel: allele matrix is " + std::to_string(alleles_.rows()) + "x" +
                          std::to_string(alleles_.cols()) + " but metadata describes " +
                          std::to_string(haplotypes_.size()) + "x" + std::to_string(loci_.size()));
    }
    for (std::size_t j = 1; j < loci_.size(); ++j) {
        if (!locus_less(loci_[j - 1], loci_[j])) {
            throw ConfigError("panel: loci not strictly ordered at " + loci_[j].chromosome + ":" +
                              std::to_string(loci_[j].position));
        }
    }
    for (std::size_t r = 0; r < haplotypes_.size(); ++r) {
        if (haplotypes_[r].population.empty()) {
            throw ConfigError("panel: haplotype " + std::to_string(r) + " has no population");
        }
        rows_by_pop_[haplotypes_[r].population].push_back(r);
    }
}

std::vector<std::string> HaplotypePanel::populations() const {
    std::vector<std::string> out;
    out.reserve(rows_by_pop_.size());
    for (const auto& [pop, rows] : rows_by_pop_) out.push_back(pop);
    return out;
}

bool HaplotypePanel::has_population(const std::string& pop) const {
    return rows_by_pop_.count(pop) > 0;
}

const std::vector<std::size_t>& HaplotypePanel::rows_of(const std::string& pop) const {
    auto it = rows_by_pop_.find(pop);
    if (it == rows_by_pop_.end()) throw LookupError("population not in panel: " + pop);
    return it->second;
}

HaplotypePanel HaplotypePanel::select_rows(std::span<const std::size_t> rows) const {
    BitMatrix m(rows.size(), n_loci());
    std::vector<HaplotypeMeta> meta;
    meta.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = alleles_.row(rows[i]);
        std::copy(src.begin(), src.end(), m.row(i).begin());
        meta.push_back(haplotypes_[rows[i]]);
    }
    return HaplotypePanel(std::move(meta), loci_, std::move(m));
}

HaplotypePanel HaplotypePanel::select_loci(std::span<const std::size_t> loci) const {
    BitMatrix m(n_haplotypes(), loci.size());
    std::vector<LocusMeta> meta;
    meta.reserve(loci.size());
    for (auto j : loci) meta.push_back(loci_[j]);
    for (std::size_t r = 0; r < n_haplotypes(); ++r) {
        for (std::size_t i = 0; i < loci.size(); ++i) {
            if (alleles_.get(r, loci[i])) m.set(r, i, true);
        }
    }
    return HaplotypePanel(haplotypes_, std::move(meta), std::move(m));
}

namespace {

// kSpread[b] has byte lane i equal to bit i of b: adding it to a word of
// eight 8-bit counters increments the counters of the set loci.
constexpr std::array<std::uint64_t, 256> make_spread() {
    std::array<std::uint64_t, 256> t{};
    for (unsigned b = 0; b < 256; ++b) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < 8; ++i) {
            if (b & (1u << i)) v |= std::uint64_t{1} << (8 * i);
        }
        t[b] = v;
    }
    return t;
}
constexpr auto kSpread = make_spread();

constexpr std::size_t kCountChunkWords = 256;  // 16384 loci per chunk
constexpr std::size_t kLaneFlush = 255;

void count_chunk(const BitMatrix& m, std::span<const std::size_t> rows, std::size_t word_begin,
                 std::size_t word_end, std::uint32_t* out) {
    const std::size_t nw = word_end - word_begin;
    std::vector<std::uint64_t> lanes(nw * 8, 0);
    auto flush = [&] {
        for (std::size_t i = 0; i < nw * 8; ++i) {
            const std::uint64_t v = lanes[i];
            if (v == 0) continue;
            const std::size_t locus0 = (word_begin * 8 + i) * 8;
            for (unsigned k = 0; k < 8; ++k) {
                const std::size_t locus = locus0 + k;
                if (locus < m.cols()) out[locus] += static_cast<std::uint32_t>((v >> (8 * k)) & 0xFF);
            }
            lanes[i] = 0;
        }
    };
    std::size_t pending = 0;
    for (std::size_t r : rows) {
        const auto row = m.row(r);
        for (std::size_t w = word_begin; w < word_end; ++w) {
            std::uint64_t bits = row[w];
            if (bits == 0) continue;
            std::uint64_t* lane = lanes.data() + (w - word_begin) * 8;
            for (unsigned b = 0; b < 8; ++b, bits >>= 8) lane[b] += kSpread[bits & 0xFF];
        }
        if (++pending == kLaneFlush) {
            flush();
            pending = 0;
        }
    }
    if (pending) flush();
}

}  // namespace

std::vector<std::uint32_t> count_alternate(const BitMatrix& m, std::span<const std::size_t> rows,
                                           unsigned threads) {
    std::vector<std::uint32_t> counts(m.cols(), 0);
    const std::size_t nw = m.words_per_row();
    const std::size_t n_chunks = (nw + kCountChunkWords - 1) / kCountChunkWords;
    for_each_chunk(n_chunks, threads, [&](std::size_t c) {
        const std::size_t wb = c * kCountChunkWords;
        const std::size_t we = std::min(nw, wb + kCountChunkWords);
        count_chunk(m, rows, wb, we, counts.data());
    });
    return counts;
}

HaplotypePanel filter_min_maf(const HaplotypePanel& panel, double min_maf) {
    if (!(min_maf >= 0.0 && min_maf <= 0.5)) throw ConfigError("min MAF must lie in [0, 0.5]");
    if (min_maf == 0.0 || panel.n_haplotypes() == 0) return panel;
    std::vector<std::size_t> all(panel.n_haplotypes());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto counts = count_alternate(panel.alleles(), all);
    const double n = static_cast<double>(panel.n_haplotypes());
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const double p = counts[j] / n;
        if (std::min(p, 1.0 - p) >= min_maf) keep.push_back(j);
    }
    return panel.select_loci(keep);
}

}  // namespace fqlens
