#include "fqlens/resampling.hpp"

#include "fqlens/error.hpp"
#include "fqlens/parallel.hpp"
#include "fqlens/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fqlens {

void BootstrapConfig::validate() const {
    if (n_replicates < 2) throw ConfigError("bootstrap needs at least 2 replicates");
    if (per_pop_cap < 1) throw ConfigError("bootstrap per-population cap must be >= 1");
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw ConfigError("CI level must lie in (0, 1)");
}

namespace {

std::size_t nearest_rank(double fraction, std::size_t n) {
    // The small slack keeps products such as 0.975·200 = 195.00000000000003
    // on the intended rank.
    const double x = fraction * static_cast<double>(n);
    auto rank = static_cast<std::size_t>(std::ceil(x - 1e-9));
    return std::clamp<std::size_t>(rank, 1, n);
}

}  // namespace

std::pair<double, double> percentile_interval(std::span<const double> values, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("CI level must lie in (0, 1)");
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (double v : values) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    if (sorted.empty()) throw UndefinedStatistic("percentile interval of an empty sample");
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t lo = nearest_rank((1.0 - level) / 2.0, n);
    const std::size_t hi = nearest_rank((1.0 + level) / 2.0, n);
    return {sorted[lo - 1], sorted[hi - 1]};
}

std::pair<double, double> percentile_interval(std::span<const std::optional<double>> values,
                                              double level) {
    std::vector<double> present;
    for (const auto& v : values) {
        if (v) present.push_back(*v);
    }
    return percentile_interval(std::span<const double>(present), level);
}

std::vector<std::size_t> draw_replicate_rows(const HaplotypePanel& panel,
                                             const BootstrapConfig& cfg, std::size_t replicate) {
    Philox rng(cfg.seed, stream_id(StreamTag::bootstrap, 0, replicate));
    std::vector<std::size_t> rows;
    for (const auto& pop : panel.populations()) {
        const auto& members = panel.rows_of(pop);
        const std::size_t draws = std::min(members.size(), cfg.per_pop_cap);
        for (std::size_t i = 0; i < draws; ++i) rows.push_back(members[rng.below(members.size())]);
    }
    return rows;
}

std::vector<BootstrapSummary> bootstrap_vector(const HaplotypePanel& panel,
                                               const PanelVectorStatistic& stat,
                                               const BootstrapConfig& cfg, unsigned threads) {
    cfg.validate();
    for (const auto& pop : panel.populations()) {
        if (panel.rows_of(pop).empty()) throw ConfigError("population without haplotypes: " + pop);
    }
    const std::vector<double> point = stat(panel);
    const std::size_t m = point.size();

    std::vector<std::vector<std::optional<double>>> reps(cfg.n_replicates);
    for_each_chunk(cfg.n_replicates, threads, [&](std::size_t i) {
        const HaplotypePanel resampled = panel.select_rows(draw_replicate_rows(panel, cfg, i));
        std::vector<std::optional<double>> row(m);
        try {
            const auto values = stat(resampled);
            if (values.size() != m) throw ConfigError("bootstrap statistic changed its length");
            for (std::size_t j = 0; j < m; ++j) {
                if (!std::isnan(values[j])) row[j] = values[j];
            }
        } catch (const UndefinedStatistic&) {
            // Whole replicate missing.
        }
        reps[i] = std::move(row);
    });

    std::vector<BootstrapSummary> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        auto& s = out[j];
        s.point = point[j];
        s.replicate_values.reserve(cfg.n_replicates);
        for (const auto& r : reps) {
            s.replicate_values.push_back(r[j]);
            if (!r[j]) ++s.n_missing;
        }
        s.unreliable = 2 * s.n_missing > cfg.n_replicates;
        if (s.n_missing < cfg.n_replicates) {
            std::tie(s.ci_low, s.ci_high) = percentile_interval(
                std::span<const std::optional<double>>(s.replicate_values), cfg.ci_level);
        } else {
            s.ci_low = s.ci_high = std::nan("");
        }
    }
    return out;
}

BootstrapSummary bootstrap_statistic(const HaplotypePanel& panel, const PanelStatistic& stat,
                                     const BootstrapConfig& cfg, unsigned threads) {
    auto out = bootstrap_vector(
        panel, [&](const HaplotypePanel& p) { return std::vector<double>{stat(p)}; }, cfg, threads);
    return std::move(out.front());
}

}  // namespace fqlens
