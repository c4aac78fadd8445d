#include "fqlens/io/vcf.hpp"

#include "fqlens/error.hpp"
#include "text.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace fqlens::io {

namespace {

constexpr std::size_t kFixedColumns = 9;

std::string where(const LocusMeta& l) { return l.chromosome + ":" + std::to_string(l.position); }

}  // namespace

VcfReader::VcfReader(std::istream& in) : in_(&in) { read_header(); }

VcfReader::VcfReader(const std::filesystem::path& path) : file_(path), in_(&file_) {
    if (!file_) throw ParseError("cannot open variant file " + path.string(), 0);
    read_header();
}

void VcfReader::read_header() {
    while (std::getline(*in_, line_)) {
        ++line_no_;
        strip_cr(line_);
        if (line_.rfind("##", 0) == 0) continue;
        if (line_.rfind("#CHROM", 0) == 0) {
            const auto cols = split(line_, '\t');
            if (cols.size() <= kFixedColumns || cols[8] != "FORMAT") {
                throw ParseError("header must list FORMAT and at least one sample", line_no_);
            }
            samples_.assign(cols.begin() + kFixedColumns, cols.end());
            std::set<std::string> seen;
            for (const auto& s : samples_) {
                if (!seen.insert(s).second) throw ParseError("duplicate sample '" + s + "'", line_no_);
            }
            return;
        }
        if (line_.empty()) continue;
        throw ParseError("record before the #CHROM header line", line_no_);
    }
    throw ParseError("missing #CHROM header line", line_no_);
}

std::optional<VcfRecord> VcfReader::next() {
    while (std::getline(*in_, line_)) {
        ++line_no_;
        strip_cr(line_);
        if (line_.empty()) continue;
        if (line_[0] == '#') throw ParseError("unexpected header line after #CHROM", line_no_);

        const auto cols = split(line_, '\t');
        if (cols.size() != kFixedColumns + samples_.size()) {
            throw ParseError("expected " + std::to_string(kFixedColumns + samples_.size()) +
                                 " columns, found " + std::to_string(cols.size()),
                             line_no_);
        }
        VcfRecord rec;
        rec.line = line_no_;
        rec.locus.chromosome = std::string(cols[0]);
        const auto pos = parse_uint(cols[1]);
        if (!pos || *pos == 0) throw ParseError("invalid POS '" + std::string(cols[1]) + "'", line_no_);
        rec.locus.position = *pos;
        rec.locus.id = cols[2] == "." ? where(rec.locus) : std::string(cols[2]);
        const std::string loc = where(rec.locus);

        if (cols[3].empty() || cols[3] == ".") throw ParseError("missing REF at " + loc, line_no_);
        const std::string_view alt = cols[4];
        if (alt.find(',') != std::string_view::npos || alt == "." || alt == "*" || alt.empty()) {
            throw ParseError("non-biallelic ALT '" + std::string(alt) + "' at " + loc, line_no_);
        }

        const auto format = split(cols[8], ':');
        const auto gt_it = std::find(format.begin(), format.end(), "GT");
        if (gt_it == format.end()) throw ParseError("FORMAT lacks GT at " + loc, line_no_);
        const auto gt_index = static_cast<std::size_t>(gt_it - format.begin());

        rec.alleles.resize(2 * samples_.size());
        for (std::size_t s = 0; s < samples_.size(); ++s) {
            const auto sub = split(cols[kFixedColumns + s], ':');
            if (gt_index >= sub.size()) {
                throw ParseError("sample '" + samples_[s] + "' lacks GT at " + loc, line_no_);
            }
            const std::string_view gt = sub[gt_index];
            const std::string what = "genotype '" + std::string(gt) + "' of sample '" + samples_[s] +
                                     "' at " + loc;
            if (gt.find('.') != std::string_view::npos) {
                throw ParseError("missing " + what, line_no_);
            }
            if (gt.size() == 3 && gt[1] == '/') throw ParseError("unphased " + what, line_no_);
            if (gt.size() != 3 || gt[1] != '|') throw ParseError("malformed " + what, line_no_);
            for (int side = 0; side < 2; ++side) {
                const char c = gt[side * 2];
                if (c == '0' || c == '1') {
                    rec.alleles[2 * s + side] = static_cast<std::uint8_t>(c - '0');
                } else if (c >= '2' && c <= '9') {
                    throw ParseError("non-biallelic " + what, line_no_);
                } else {
                    throw ParseError("malformed " + what, line_no_);
                }
            }
        }
        return rec;
    }
    return std::nullopt;
}

std::map<std::string, std::string> read_sample_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sample map " + path.string(), 0);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
            throw ParseError("sample map rows need two tab-separated columns", n);
        }
        if (!out.emplace(std::string(cols[0]), std::string(cols[1])).second) {
            throw ParseError("sample '" + std::string(cols[0]) + "' listed twice", n);
        }
    }
    if (out.empty()) throw ParseError("sample map " + path.string() + " is empty", 0);
    return out;
}

HaplotypePanel read_vcf_subset(std::istream& vcf, const std::map<std::string, std::string>& sample_map) {
    if (sample_map.empty()) throw ParseError("sample map is empty", 0);
    VcfReader reader(vcf);
    const auto& samples = reader.samples();
    std::vector<HaplotypeMeta> haps;
    haps.reserve(2 * samples.size());
    for (const auto& s : samples) {
        auto it = sample_map.find(s);
        if (it == sample_map.end()) throw ParseError("sample '" + s + "' missing from sample map", reader.line_number());
        haps.push_back({s, 0, it->second});
        haps.push_back({s, 1, it->second});
    }

    // Column-major staging, one bit row per locus.
    std::vector<LocusMeta> loci;
    std::vector<std::size_t> lines;
    std::vector<std::vector<std::uint64_t>> staged;
    const std::size_t words = (haps.size() + 63) / 64;
    while (auto rec = reader.next()) {
        std::vector<std::uint64_t> bits(words, 0);
        for (std::size_t h = 0; h < rec->alleles.size(); ++h) {
            if (rec->alleles[h]) bits[h / 64] |= std::uint64_t{1} << (h % 64);
        }
        staged.push_back(std::move(bits));
        loci.push_back(std::move(rec->locus));
        lines.push_back(rec->line);
    }

    std::vector<std::size_t> order(loci.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return locus_less(loci[a], loci[b]); });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const auto& a = loci[order[i - 1]];
        const auto& b = loci[order[i]];
        if (a.chromosome == b.chromosome && a.position == b.position) {
            throw ParseError("duplicate locus " + where(b),
                             std::max(lines[order[i - 1]], lines[order[i]]));
        }
    }

    BitMatrix m(haps.size(), loci.size());
    std::vector<LocusMeta> sorted_loci;
    sorted_loci.reserve(loci.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& bits = staged[order[j]];
        for (std::size_t w = 0; w < bits.size(); ++w) {
            for (std::uint64_t x = bits[w]; x; x &= x - 1) {
                m.set(w * 64 + static_cast<std::size_t>(__builtin_ctzll(x)), j, true);
            }
        }
        sorted_loci.push_back(std::move(loci[order[j]]));
    }
    return HaplotypePanel(std::move(haps), std::move(sorted_loci), std::move(m));
}

HaplotypePanel read_vcf_subset(const std::filesystem::path& vcf,
                               const std::filesystem::path& sample_map) {
    const auto map = read_sample_map(sample_map);
    std::ifstream in(vcf);
    if (!in) throw ParseError("cannot open variant file " + vcf.string(), 0);
    return read_vcf_subset(in, map);
}

}  // namespace fqlens::io
