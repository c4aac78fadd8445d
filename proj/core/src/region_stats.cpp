#include "fqlens/region_stats.hpp"

#include "fqlens/error.hpp"
#include "fqlens/parallel.hpp"
#include "fqlens/summation.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace fqlens {

namespace {

constexpr std::size_t kLocusChunk = 8192;

struct ChunkSums {
    CompensatedSum delta;
    CompensatedSum total;
    std::size_t used = 0;
    std::size_t skipped = 0;
};

// Evaluates `fill(locus, freqs, weights)` → k groups at every locus and folds
// the resulting LocusDiffs into a micro-average. Does not throw on an all-
// monomorphic input; callers decide.
template <typename Fill>
MicroAverage micro_average_over_loci(std::size_t n_loci, std::size_t k, double q,
                                     const StatOptions& opt, Fill fill) {
    const std::size_t n_chunks = (n_loci + kLocusChunk - 1) / kLocusChunk;
    std::vector<ChunkSums> sums(n_chunks);
    if (opt.per_locus) opt.per_locus->assign(n_loci, LocusDiff{});
    for_each_chunk(n_chunks, opt.threads, [&](std::size_t c) {
        std::vector<double> freqs(k);
        std::vector<double> weights(k);
        std::vector<std::size_t> order(k);
        auto& s = sums[c];
        const std::size_t end = std::min(n_loci, (c + 1) * kLocusChunk);
        for (std::size_t l = c * kLocusChunk; l < end; ++l) {
            fill(l, freqs.data(), weights.data());
            const LocusDiff d =
                detail::locus_diff_raw(freqs.data(), weights.data(), k, q, order.data());
            if (d.s_total > 0.0) {
                s.delta.add(d.delta);
                s.total.add(d.s_total);
                ++s.used;
            } else {
                ++s.skipped;
            }
            if (opt.per_locus) (*opt.per_locus)[l] = d;
        }
    });
    CompensatedSum delta;
    CompensatedSum total;
    MicroAverage out;
    for (const auto& s : sums) {
        delta.merge(s.delta);
        total.merge(s.total);
        out.loci_used += s.used;
        out.loci_skipped += s.skipped;
    }
    out.delta_sum = delta.value();
    out.total_sum = total.value();
    out.value = out.loci_used ? out.delta_sum / out.total_sum : 0.0;
    return out;
}

void require_defined(const MicroAverage& m, const char* what) {
    if (m.loci_used == 0) {
        throw UndefinedStatistic(std::string(what) +
                                 " undefined: every locus is monomorphic in the pool");
    }
}

void check_region_indices(const CountTable& counts, std::span<const std::size_t> region) {
    if (region.empty()) throw ConfigError("region is empty");
    std::set<std::size_t> seen;
    for (auto k : region) {
        if (k >= counts.n_groups()) throw ConfigError("region refers to an unknown group");
        if (!seen.insert(k).second) throw ConfigError("region lists a population twice");
        if (counts.group(k).n_haplotypes == 0) {
            throw ConfigError("population '" + counts.group(k).label + "' has no haplotypes");
        }
    }
}

}  // namespace

CountTable::CountTable(std::vector<GroupCounts> groups, std::size_t n_loci)
    : groups_(std::move(groups)), n_loci_(n_loci) {
    for (const auto& g : groups_) {
        if (g.alt.size() != n_loci_) throw ConfigError("count table: ragged group '" + g.label + "'");
        for (auto a : g.alt) {
            if (a > g.n_haplotypes) {
                throw ConfigError("count table: alternate count exceeds haplotypes in '" +
                                  g.label + "'");
            }
        }
    }
}

CountTable CountTable::from_rows(const BitMatrix& m, std::span<const std::string> labels,
                                 std::span<const std::vector<std::size_t>> rows,
                                 unsigned threads) {
    if (labels.size() != rows.size()) throw ConfigError("count table: label/row-set mismatch");
    std::vector<GroupCounts> groups;
    groups.reserve(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        groups.push_back({labels[k], rows[k].size(), count_alternate(m, rows[k], threads)});
    }
    return CountTable(std::move(groups), m.cols());
}

CountTable CountTable::from_panel(const HaplotypePanel& panel,
                                  std::span<const std::string> populations, unsigned threads) {
    std::vector<std::vector<std::size_t>> rows;
    rows.reserve(populations.size());
    for (const auto& pop : populations) {
        if (!panel.has_population(pop)) {
            throw ConfigError("population '" + pop + "' has no haplotypes in the panel");
        }
        rows.push_back(panel.rows_of(pop));
    }
    return from_rows(panel.alleles(), populations, rows, threads);
}

std::size_t CountTable::index_of(const std::string& label) const {
    for (std::size_t k = 0; k < groups_.size(); ++k) {
        if (groups_[k].label == label) return k;
    }
    throw LookupError("unknown group: " + label);
}

MicroAverage ovr_fq(const CountTable& counts, std::size_t focal,
                    std::span<const std::size_t> region, QOrder q, const StatOptions& opt) {
    check_region_indices(counts, region);
    if (std::find(region.begin(), region.end(), focal) == region.end()) {
        throw ConfigError("focal population is not part of the region");
    }
    if (region.size() < 2) throw ConfigError("one-vs-rest needs at least two populations");

    const auto& a = counts.group(focal);
    std::vector<const GroupCounts*> rest;
    std::uint64_t n_rest = 0;
    for (auto k : region) {
        if (k == focal) continue;
        rest.push_back(&counts.group(k));
        n_rest += counts.group(k).n_haplotypes;
    }
    const double na = static_cast<double>(a.n_haplotypes);
    const double nb = static_cast<double>(n_rest);
    auto m = micro_average_over_loci(counts.n_loci(), 2, q.value(), opt,
                                     [&](std::size_t l, double* f, double* w) {
                                         std::uint64_t alt_b = 0;
                                         for (const auto* g : rest) alt_b += g->alt[l];
                                         f[0] = a.alt[l] / na;
                                         f[1] = static_cast<double>(alt_b) / nb;
                                         w[0] = 0.5;
                                         w[1] = 0.5;
                                     });
    require_defined(m, "one-vs-rest F_q");
    return m;
}

MicroAverage regional_fq(const CountTable& counts, std::span<const std::size_t> region, QOrder q,
                         const StatOptions& opt) {
    check_region_indices(counts, region);
    if (region.size() == 1) {
        if (opt.per_locus) opt.per_locus->assign(counts.n_loci(), LocusDiff{});
        return MicroAverage{};
    }
    const std::size_t k = region.size();
    const double w = 1.0 / static_cast<double>(k);
    std::vector<const GroupCounts*> groups;
    std::vector<double> n_hap;
    for (auto g : region) {
        groups.push_back(&counts.group(g));
        n_hap.push_back(static_cast<double>(counts.group(g).n_haplotypes));
    }
    auto m = micro_average_over_loci(counts.n_loci(), k, q.value(), opt,
                                     [&](std::size_t l, double* f, double* wt) {
                                         for (std::size_t i = 0; i < k; ++i) {
                                             f[i] = groups[i]->alt[l] / n_hap[i];
                                             wt[i] = w;
                                         }
                                     });
    require_defined(m, "regional F_q");
    return m;
}

double loo_influence(const CountTable& counts, std::span<const std::size_t> region,
                     std::size_t removed, QOrder q, unsigned threads) {
    check_region_indices(counts, region);
    if (region.size() < 2) throw ConfigError("leave-one-out needs a region of at least two populations");
    if (std::find(region.begin(), region.end(), removed) == region.end()) {
        throw ConfigError("removed population is not part of the region");
    }
    std::vector<std::size_t> reduced;
    for (auto k : region) {
        if (k != removed) reduced.push_back(k);
    }
    StatOptions opt;
    opt.threads = threads;
    const double full = regional_fq(counts, region, q, opt).value;
    const double without = regional_fq(counts, reduced, q, opt).value;
    return full - without;
}

// ── Panel-level ─────────────────────────────────────────────────────────────

namespace {

Region canonical_region(const HaplotypePanel& panel, const Region& region) {
    if (region.empty()) throw ConfigError("region is empty");
    Region out = region;
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw ConfigError("region lists a population twice");
    }
    for (const auto& pop : out) {
        if (!panel.has_population(pop)) {
            throw ConfigError("population '" + pop + "' has no haplotypes in the panel");
        }
    }
    return out;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

std::size_t position_in(const Region& region, const std::string& pop, const char* role) {
    auto it = std::find(region.begin(), region.end(), pop);
    if (it == region.end()) {
        throw ConfigError(std::string(role) + " population '" + pop + "' is not in the region");
    }
    return static_cast<std::size_t>(it - region.begin());
}

}  // namespace

std::vector<LocusFreqTable> ovr_tables(const HaplotypePanel& panel, const std::string& focal,
                                       const Region& region) {
    const Region r = canonical_region(panel, region);
    const std::size_t fi = position_in(r, focal, "focal");
    if (r.size() < 2) throw ConfigError("one-vs-rest needs at least two populations");
    const CountTable counts = CountTable::from_panel(panel, r);
    const auto& a = counts.group(fi);
    std::uint64_t n_rest = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (k != fi) n_rest += counts.group(k).n_haplotypes;
    }
    std::vector<LocusFreqTable> out;
    out.reserve(counts.n_loci());
    for (std::size_t l = 0; l < counts.n_loci(); ++l) {
        std::uint64_t alt_b = 0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k != fi) alt_b += counts.group(k).alt[l];
        }
        out.emplace_back(std::vector<double>{a.alt[l] / static_cast<double>(a.n_haplotypes),
                                             static_cast<double>(alt_b) / static_cast<double>(n_rest)},
                         std::vector<double>{0.5, 0.5},
                         std::vector<std::string>{focal, "rest"});
    }
    return out;
}

MicroAverage ovr_fq(const HaplotypePanel& panel, const std::string& focal, const Region& region,
                    QOrder q, unsigned threads) {
    const Region r = canonical_region(panel, region);
    const std::size_t fi = position_in(r, focal, "focal");
    const CountTable counts = CountTable::from_panel(panel, r, threads);
    StatOptions opt;
    opt.threads = threads;
    return ovr_fq(counts, fi, iota_indices(r.size()), q, opt);
}

MicroAverage regional_fq(const HaplotypePanel& panel, const Region& region, QOrder q,
                         unsigned threads) {
    const Region r = canonical_region(panel, region);
    const CountTable counts = CountTable::from_panel(panel, r, threads);
    StatOptions opt;
    opt.threads = threads;
    return regional_fq(counts, iota_indices(r.size()), q, opt);
}

double loo_influence(const HaplotypePanel& panel, const Region& region,
                     const std::string& removed, QOrder q, unsigned threads) {
    const Region r = canonical_region(panel, region);
    const std::size_t ci = position_in(r, removed, "removed");
    const CountTable counts = CountTable::from_panel(panel, r, threads);
    return loo_influence(counts, iota_indices(r.size()), ci, q, threads);
}

std::vector<double> fq_spectrum_values(const CountTable& counts, const SpectrumRequest& request,
                                       std::span<const double> q_grid, unsigned threads) {
    validate_q_grid(q_grid);
    std::vector<std::size_t> region;
    for (const auto& pop : request.region) region.push_back(counts.index_of(pop));
    StatOptions opt;
    opt.threads = threads;
    std::vector<double> values;
    values.reserve(q_grid.size());
    for (double qv : q_grid) {
        const QOrder q(qv);
        switch (request.mode) {
            case SpectrumMode::ovr:
                values.push_back(ovr_fq(counts, counts.index_of(request.population), region, q, opt).value);
                break;
            case SpectrumMode::loo:
                values.push_back(
                    loo_influence(counts, region, counts.index_of(request.population), q, threads));
                break;
            case SpectrumMode::regional:
                values.push_back(regional_fq(counts, region, q, opt).value);
                break;
        }
    }
    return values;
}

FqSpectrum fq_spectrum(const HaplotypePanel& panel, const SpectrumRequest& request,
                       std::span<const double> q_grid, unsigned threads) {
    validate_q_grid(q_grid);
    SpectrumRequest req = request;
    req.region = canonical_region(panel, request.region);
    if (req.mode != SpectrumMode::regional) position_in(req.region, req.population, "requested");
    const CountTable counts = CountTable::from_panel(panel, req.region, threads);
    FqSpectrum out;
    out.label = req.mode == SpectrumMode::regional ? std::string("region") : req.population;
    out.q_grid.assign(q_grid.begin(), q_grid.end());
    out.values = fq_spectrum_values(counts, req, q_grid, threads);
    return out;
}

}  // namespace fqlens
