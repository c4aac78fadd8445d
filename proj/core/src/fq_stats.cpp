#include "fqlens/fq_stats.hpp"

#include "fqlens/error.hpp"
#include "fqlens/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fqlens {

namespace {

constexpr double kWeightSumTol = 1e-12;

void canonical_order(const double* freqs, const double* weights, std::size_t k,
                     std::size_t* order) noexcept {
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    // Insertion sort: k is a handful of populations in practice.
    for (std::size_t i = 1; i < k; ++i) {
        const std::size_t cur = order[i];
        std::size_t j = i;
        while (j > 0) {
            const std::size_t prev = order[j - 1];
            const bool less = freqs[cur] < freqs[prev] ||
                              (freqs[cur] == freqs[prev] && weights[cur] < weights[prev]);
            if (!less) break;
            order[j] = prev;
            --j;
        }
        order[j] = cur;
    }
}

// p̄ = p_ref + Σ w_k (p_k − p_ref): exact when all p_k coincide, and
// insensitive to weight sums that are only 1 within rounding.
double pooled_raw(const double* freqs, const double* weights, std::size_t k,
                  const std::size_t* order) noexcept {
    const double ref = freqs[order[0]];
    CompensatedSum acc;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t g = order[i];
        acc.add(weights[g] * (freqs[g] - ref));
    }
    return std::clamp(ref + acc.value(), 0.0, 1.0);
}

std::vector<std::size_t> table_order(const LocusFreqTable& t) {
    std::vector<std::size_t> order(t.size());
    canonical_order(t.freqs().data(), t.weights().data(), t.size(), order.data());
    return order;
}

}  // namespace

LocusFreqTable::LocusFreqTable(std::vector<double> freqs, std::vector<double> weights,
                               std::vector<std::string> group_ids)
    : freqs_(std::move(freqs)), weights_(std::move(weights)), group_ids_(std::move(group_ids)) {
    if (freqs_.empty()) throw ConfigError("frequency table needs at least one group");
    if (weights_.size() != freqs_.size()) {
        throw ConfigError("frequency table: " + std::to_string(freqs_.size()) +
                          " frequencies but " + std::to_string(weights_.size()) + " weights");
    }
    if (group_ids_.empty()) {
        for (std::size_t k = 0; k < freqs_.size(); ++k) group_ids_.push_back(std::to_string(k));
    } else if (group_ids_.size() != freqs_.size()) {
        throw ConfigError("frequency table: group id count does not match group count");
    }
    CompensatedSum wsum;
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        AlleleFreq{freqs_[k]};
        if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k])) {
            throw DomainError("group weights must be finite and > 0");
        }
        wsum.add(weights_[k]);
    }
    if (std::fabs(wsum.value() - 1.0) > kWeightSumTol) {
        throw DomainError("group weights must sum to 1 (got " + std::to_string(wsum.value()) + ")");
    }
}

LocusFreqTable LocusFreqTable::equal_weights(std::vector<double> freqs,
                                             std::vector<std::string> group_ids) {
    const std::size_t k = freqs.size();
    if (k == 0) throw ConfigError("frequency table needs at least one group");
    std::vector<double> w(k, 1.0 / static_cast<double>(k));
    return LocusFreqTable(std::move(freqs), std::move(w), std::move(group_ids));
}

AlleleFreq pooled_frequency(const LocusFreqTable& table) {
    const auto order = table_order(table);
    return AlleleFreq(pooled_raw(table.freqs().data(), table.weights().data(), table.size(),
                                 order.data()));
}

namespace detail {

LocusDiff locus_diff_raw(const double* freqs, const double* weights, std::size_t k, double q,
                         std::size_t* order) noexcept {
    canonical_order(freqs, weights, k, order);
    const double p_bar = pooled_raw(freqs, weights, k, order);

    LocusDiff out;
    out.s_total = tsallis_unchecked(p_bar, q);
    CompensatedSum within;
    CompensatedSum gap;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t g = order[i];
        const double s = tsallis_unchecked(freqs[g], q);
        within.add(weights[g] * s);
        gap.add(weights[g] * (out.s_total - s));
    }
    out.s_within = within.value();
    out.delta = gap.value();
    if (out.s_total > 0.0) out.fq = out.delta / out.s_total;
    return out;
}

}  // namespace detail

LocusDiff locus_diff(const LocusFreqTable& table, QOrder q) {
    std::vector<std::size_t> order(table.size());
    return detail::locus_diff_raw(table.freqs().data(), table.weights().data(), table.size(),
                                  q.value(), order.data());
}

double fst_classic(const LocusFreqTable& table) {
    const auto order = table_order(table);
    const double* f = table.freqs().data();
    const double* w = table.weights().data();
    const double p_bar = pooled_raw(f, w, table.size(), order.data());
    const double denom = p_bar * (1.0 - p_bar);
    if (!(denom > 0.0)) throw UndefinedStatistic("F_ST undefined: pooled locus is monomorphic");
    CompensatedSum var;
    for (std::size_t g : order) {
        const double d = f[g] - p_bar;
        var.add(w[g] * d * d);
    }
    return var.value() / denom;
}

double mutual_information(const LocusFreqTable& table) {
    const auto order = table_order(table);
    const double* f = table.freqs().data();
    const double* w = table.weights().data();
    const double h_total = detail::shannon_unchecked(pooled_raw(f, w, table.size(), order.data()));
    CompensatedSum gap;
    for (std::size_t g : order) gap.add(w[g] * (h_total - detail::shannon_unchecked(f[g])));
    return gap.value();
}

MicroAverage micro_average(std::span<const LocusDiff> diffs) {
    CompensatedSum num;
    CompensatedSum den;
    MicroAverage out;
    for (const auto& d : diffs) {
        if (d.s_total > 0.0) {
            num.add(d.delta);
            den.add(d.s_total);
            ++out.loci_used;
        } else {
            ++out.loci_skipped;
        }
    }
    if (out.loci_used == 0) {
        throw UndefinedStatistic("micro-average undefined: every locus is monomorphic in the pool");
    }
    out.delta_sum = num.value();
    out.total_sum = den.value();
    out.value = out.delta_sum / out.total_sum;
    return out;
}

void validate_q_grid(std::span<const double> q_grid) {
    if (q_grid.empty()) throw ConfigError("q grid is empty");
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        QOrder{q_grid[i]};
        if (i > 0 && !(q_grid[i] > q_grid[i - 1])) {
            throw ConfigError("q grid must be strictly increasing");
        }
    }
}

std::vector<double> default_q_grid() { return {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0}; }

void FqSpectrum::validate() const {
    validate_q_grid(q_grid);
    if (values.size() != q_grid.size()) throw ConfigError("spectrum: value count != grid size");
    if (ci_low.has_value() != ci_high.has_value()) {
        throw ConfigError("spectrum: confidence band needs both ends");
    }
    if (ci_low && (ci_low->size() != q_grid.size() || ci_high->size() != q_grid.size())) {
        throw ConfigError("spectrum: band length != grid size");
    }
    // The point estimate may fall outside its percentile band; only the band
    // itself has to be ordered. NaN marks an entry without a band.
    if (ci_low) {
        for (std::size_t i = 0; i < q_grid.size(); ++i) {
            if ((*ci_low)[i] > (*ci_high)[i]) throw ConfigError("spectrum: ci_low above ci_high");
        }
    }
}

double slope_diagnostic(const FqSpectrum& spectrum) {
    spectrum.validate();
    auto find = [&](double q) -> std::optional<double> {
        for (std::size_t i = 0; i < spectrum.q_grid.size(); ++i) {
            if (std::fabs(spectrum.q_grid[i] - q) < kLimitEps) return spectrum.values[i];
        }
        return std::nullopt;
    };
    const auto f1 = find(1.0);
    const auto f2 = find(2.0);
    if (!f1 || !f2) throw ConfigError("slope diagnostic needs q = 1 and q = 2 in the grid");
    return *f1 - *f2;
}

}  // namespace fqlens
