#include "fqlens/sim/gamete.hpp"

#include "fqlens/error.hpp"

#include <algorithm>
#include <random>

namespace fqlens::sim {

GameteMaker::GameteMaker(const io::GeneticMap& map, const std::vector<LocusMeta>& loci)
    : n_loci_(loci.size()) {
    positions_.reserve(loci.size());
    for (std::size_t j = 0; j < loci.size(); ++j) {
        positions_.push_back(static_cast<double>(loci[j].position));
        if (j == 0 || loci[j].chromosome != loci[j - 1].chromosome) {
            const auto& name = loci[j].chromosome;
            if (!map.has(name)) throw ConfigError("chromosome '" + name + "' is not covered by the genetic map");
            Segment s;
            s.begin = j;
            s.maps[static_cast<int>(Sex::female)] = &map.chromosome(name, Sex::female);
            s.maps[static_cast<int>(Sex::male)] = &map.chromosome(name, Sex::male);
            chromosomes_.push_back(s);
        }
        chromosomes_.back().end = j + 1;
    }
}

std::size_t GameteMaker::make(std::span<const std::uint64_t> h0, std::span<const std::uint64_t> h1,
                              Sex parent_sex, Philox& rng, std::span<std::uint64_t> out) const {
    const std::size_t nw = words();
    std::vector<std::uint64_t> mask(nw, 0);  // bit set → copy from h1
    std::vector<double> points;
    std::size_t total = 0;
    for (const auto& c : chromosomes_) {
        const auto& m = *c.maps[static_cast<int>(parent_sex)];
        const double length = m.length_cm();
        std::size_t k = 0;
        if (length > 0.0) {
            std::poisson_distribution<std::size_t> pois(length / 100.0);
            k = pois(rng);
        }
        points.clear();
        for (std::size_t i = 0; i < k; ++i) points.push_back(m.position_at(m.first_cm() + rng.uniform() * length));
        std::sort(points.begin(), points.end());
        total += k;

        std::size_t hap = rng.below(2);
        std::size_t seg_begin = c.begin;
        const auto first = positions_.begin() + static_cast<std::ptrdiff_t>(c.begin);
        const auto last = positions_.begin() + static_cast<std::ptrdiff_t>(c.end);
        for (double x : points) {
            const std::size_t seg_end =
                static_cast<std::size_t>(std::upper_bound(first, last, x) - positions_.begin());
            if (hap) set_bit_range(mask, seg_begin, seg_end);
            seg_begin = seg_end;
            hap ^= 1;
        }
        if (hap) set_bit_range(mask, seg_begin, c.end);
    }
    for (std::size_t w = 0; w < nw; ++w) out[w] = (h0[w] & ~mask[w]) | (h1[w] & mask[w]);
    return total;
}

}  // namespace fqlens::sim
