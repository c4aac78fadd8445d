#include "fqlens/sim/founders.hpp"

#include "fqlens/error.hpp"
#include "fqlens/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

namespace fqlens::sim {

namespace {

double draw_beta(Philox& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    if (x + y > 0.0) return x / (x + y);
    // Both shapes tiny enough to underflow: the limit is a point mass at 0/1.
    return rng.uniform() < a / (a + b) ? 1.0 : 0.0;
}

void check_profile(const BetaProfile& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
        throw ConfigError("Beta profile parameters must be positive and finite");
    }
}

}  // namespace

std::vector<LocusMeta> spread_loci(const io::GeneticMap& map, std::size_t n) {
    const auto names = map.chromosomes();
    if (names.empty()) throw ConfigError("genetic map has no chromosomes");
    std::vector<double> span;
    double total = 0.0;
    for (const auto& c : names) {
        const auto& m = map.chromosome(c, Sex::female);
        span.push_back(static_cast<double>(m.last_position() - m.first_position() + 1));
        total += span.back();
    }
    // Largest-remainder apportionment.
    std::vector<std::size_t> share(names.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double exact = static_cast<double>(n) * span[i] / total;
        share[i] = static_cast<std::size_t>(std::floor(exact));
        given += share[i];
        rem.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto& l, auto& r) { return l.first > r.first; });
    for (std::size_t k = 0; given < n; ++k, ++given) ++share[rem[k % rem.size()].second];

    std::vector<LocusMeta> loci;
    loci.reserve(n);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (share[i] == 0) continue;
        const auto& m = map.chromosome(names[i], Sex::female);
        if (static_cast<double>(share[i]) > span[i]) {
            throw ConfigError("chromosome '" + names[i] + "' is too short for its share of loci");
        }
        const double step = span[i] / static_cast<double>(share[i]);
        std::uint64_t prev = 0;
        for (std::size_t k = 0; k < share[i]; ++k) {
            auto pos = m.first_position() + static_cast<std::uint64_t>(std::floor((static_cast<double>(k) + 0.5) * step));
            pos = std::max<std::uint64_t>(pos, std::max<std::uint64_t>(prev + 1, 1));
            prev = pos;
            loci.push_back({names[i], pos, names[i] + ":" + std::to_string(pos)});
        }
    }
    return loci;
}

FounderPopulation synth_founders(const std::vector<std::string>& demes, const FounderSpec& spec,
                                 const io::GeneticMap& map, std::uint64_t seed) {
    if (demes.empty()) throw ConfigError("no demes configured");
    if (spec.counts.size() != demes.size()) throw ConfigError("founder counts must list every deme");
    for (std::size_t d = 0; d < demes.size(); ++d) {
        if (spec.counts[d] < 2) {
            throw ConfigError("deme '" + demes[d] + "' needs at least 2 founders (one of each sex)");
        }
    }
    const bool per_deme = spec.model == FounderModel::independent;
    if (spec.profiles.size() != (per_deme ? demes.size() : 1) && !(per_deme && spec.profiles.size() == 1)) {
        throw ConfigError("founder Beta profiles: give one per deme or a single shared profile");
    }
    for (const auto& p : spec.profiles) check_profile(p);
    if (spec.model == FounderModel::balding_nichols && !(spec.divergence > 0.0 && spec.divergence < 1.0)) {
        throw ConfigError("balding_nichols divergence must lie in (0, 1)");
    }
    if (spec.n_loci == 0) throw ConfigError("founders need at least one locus");

    FounderPopulation out;
    out.loci = spread_loci(map, spec.n_loci);
    const std::size_t L = out.loci.size();

    // Per-deme frequencies.
    std::vector<std::vector<double>> freq(demes.size(), std::vector<double>(L));
    if (spec.model == FounderModel::independent) {
        for (std::size_t d = 0; d < demes.size(); ++d) {
            const auto& p = spec.profiles[spec.profiles.size() == 1 ? 0 : d];
            Philox rng(seed, stream_id(StreamTag::founders, 1, d));
            for (auto& f : freq[d]) f = draw_beta(rng, p.a, p.b);
        }
    } else {
        Philox anc(seed, stream_id(StreamTag::founders, 0, 0));
        std::vector<double> ancestral(L);
        for (auto& f : ancestral) f = draw_beta(anc, spec.profiles[0].a, spec.profiles[0].b);
        for (std::size_t d = 0; d < demes.size(); ++d) {
            if (spec.model == FounderModel::shared) {
                freq[d] = ancestral;
                continue;
            }
            Philox rng(seed, stream_id(StreamTag::founders, 1, d));
            const double k = (1.0 - spec.divergence) / spec.divergence;
            for (std::size_t j = 0; j < L; ++j) {
                const double p = ancestral[j];
                freq[d][j] = (p <= 0.0 || p >= 1.0) ? p : draw_beta(rng, p * k, (1.0 - p) * k);
            }
        }
    }

    out.pedigree = Pedigree(demes);
    std::size_t n = 0;
    for (auto c : spec.counts) n += c;
    out.genomes = BitMatrix(2 * n, L);
    for (std::size_t d = 0; d < demes.size(); ++d) {
        for (std::uint32_t i = 0; i < spec.counts[d]; ++i) {
            const auto id = out.pedigree.add_founder(i % 2 == 0 ? Sex::female : Sex::male,
                                                     static_cast<std::uint16_t>(d));
            Philox rng(seed, stream_id(StreamTag::founders, 2, id));
            for (std::size_t h = 0; h < 2; ++h) {
                auto row = out.genomes.row(2 * static_cast<std::size_t>(id) + h);
                for (std::size_t j = 0; j < L; ++j) {
                    if (rng.uniform() < freq[d][j]) row[j / 64] |= std::uint64_t{1} << (j % 64);
                }
            }
        }
    }
    return out;
}

FounderPopulation founders_from_panel(const HaplotypePanel& panel, const std::vector<std::string>& demes) {
    auto pops = panel.populations();
    auto sorted = demes;
    std::sort(sorted.begin(), sorted.end());
    if (pops != sorted) throw ConfigError("founder panel populations must match the configured demes");

    FounderPopulation out;
    out.pedigree = Pedigree(demes);
    out.loci = panel.loci();
    // Pair haplotype rows by sample id, keeping first-appearance order.
    std::map<std::string, std::array<std::size_t, 2>> rows;
    std::vector<std::string> order;
    for (std::size_t r = 0; r < panel.n_haplotypes(); ++r) {
        const auto& h = panel.haplotypes()[r];
        if (h.haplotype_index > 1) throw ConfigError("founder panel haplotype index must be 0 or 1");
        auto [it, fresh] = rows.try_emplace(h.sample_id, std::array<std::size_t, 2>{SIZE_MAX, SIZE_MAX});
        if (fresh) order.push_back(h.sample_id);
        if (it->second[h.haplotype_index] != SIZE_MAX) {
            throw ConfigError("founder sample '" + h.sample_id + "' repeats a haplotype index");
        }
        it->second[h.haplotype_index] = r;
    }
    std::vector<std::uint32_t> per_deme(demes.size(), 0);
    std::vector<std::pair<std::uint16_t, std::array<std::size_t, 2>>> people;
    for (const auto& s : order) {
        const auto& r = rows[s];
        if (r[0] == SIZE_MAX || r[1] == SIZE_MAX) throw ConfigError("founder sample '" + s + "' is not diploid");
        const auto& pop = panel.haplotypes()[r[0]].population;
        if (panel.haplotypes()[r[1]].population != pop) {
            throw ConfigError("founder sample '" + s + "' spans two populations");
        }
        const auto d = static_cast<std::uint16_t>(std::find(demes.begin(), demes.end(), pop) - demes.begin());
        people.push_back({d, r});
    }
    // Deme-major order keeps founders of one deme contiguous.
    std::stable_sort(people.begin(), people.end(), [](auto& l, auto& r) { return l.first < r.first; });
    out.genomes = BitMatrix(2 * people.size(), out.loci.size());
    for (const auto& [d, r] : people) {
        const auto id = out.pedigree.add_founder(per_deme[d]++ % 2 == 0 ? Sex::female : Sex::male, d);
        for (std::size_t h = 0; h < 2; ++h) {
            const auto src = panel.alleles().row(r[h]);
            std::copy(src.begin(), src.end(), out.genomes.row(2 * static_cast<std::size_t>(id) + h).begin());
        }
    }
    for (std::size_t d = 0; d < demes.size(); ++d) {
        if (per_deme[d] < 2) throw ConfigError("deme '" + demes[d] + "' needs at least 2 founders");
    }
    return out;
}

}  // namespace fqlens::sim
