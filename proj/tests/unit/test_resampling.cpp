#include "fqlens/error.hpp"
#include "fqlens/region_stats.hpp"
#include "fqlens/resampling.hpp"

#include "helpers.hpp"
#include "percentile.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace fqlens;

namespace {

double ovr2(const HaplotypePanel& p) { return ovr_fq(p, "pop0", {"pop0", "pop1", "pop2"}, QOrder(2.0)).value; }

/// Two populations sampled from fixed per-locus frequencies.
HaplotypePanel sampled_panel(const std::vector<std::pair<double, double>>& freqs, std::size_t n_hap,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> counts(2, std::vector<std::size_t>(freqs.size()));
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        counts[0][j] = std::binomial_distribution<std::size_t>(n_hap, freqs[j].first)(rng);
        counts[1][j] = std::binomial_distribution<std::size_t>(n_hap, freqs[j].second)(rng);
    }
    return testing::counts_panel({"A", "B"}, n_hap, counts);
}

}  // namespace

TEST_SUITE("resampling") {

TEST_CASE("config validation") {
    BootstrapConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_replicates = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.per_pop_cap = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.ci_level = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("percentile interval matches the brute-force nearest rank") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> small(0, 30);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 257);
        std::vector<double> v(n);
        // Integer-valued draws produce plenty of ties.
        for (auto& x : v) x = trial % 2 ? small(rng) : std::normal_distribution<double>()(rng);
        for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
            const auto got = percentile_interval(std::span<const double>(v), level);
            const auto want = oracle::percentile_interval(v, level);
            CHECK(got.first == want.first);
            CHECK(got.second == want.second);
        }
    }
    // 0.025 * 200 and 0.975 * 200 land exactly on ranks 5 and 195.
    std::vector<double> v(200);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
    const auto ci = percentile_interval(std::span<const double>(v), 0.95);
    CHECK(ci.first == 5.0);
    CHECK(ci.second == 195.0);

    CHECK_THROWS_AS(percentile_interval(std::span<const double>(), 0.95), UndefinedStatistic);
    CHECK_THROWS_AS(percentile_interval(std::span<const double>(v), 0.0), ConfigError);
    std::vector<std::optional<double>> with_gaps{3.0, std::nullopt, 1.0, 2.0, std::nullopt};
    const auto g = percentile_interval(std::span<const std::optional<double>>(with_gaps), 0.5);
    CHECK(g.first == 1.0);
    CHECK(g.second == 3.0);
}

TEST_CASE("cap limits every population draw") {
    const auto panel = testing::random_panel(1, 600, 10, 3);  // 200 haplotypes per population
    BootstrapConfig cfg;
    for (std::size_t rep = 0; rep < 20; ++rep) {
        const auto rows = draw_replicate_rows(panel, cfg, rep);
        std::map<std::string, std::size_t> per_pop;
        for (auto r : rows) ++per_pop[panel.haplotypes()[r].population];
        CHECK(per_pop.size() == 3);
        for (const auto& [pop, n] : per_pop) CHECK(n == 40);
    }
}

TEST_CASE("inactive cap draws every population at its size") {
    const auto panel = testing::random_panel(2, 60, 10, 3);  // 20 each
    BootstrapConfig cfg;
    const auto rows = draw_replicate_rows(panel, cfg, 7);
    std::map<std::string, std::size_t> per_pop;
    for (auto r : rows) {
        REQUIRE(r < panel.n_haplotypes());
        ++per_pop[panel.haplotypes()[r].population];
    }
    CHECK(rows.size() == 60);
    for (const auto& [pop, n] : per_pop) CHECK(n == 20);
}

TEST_CASE("replicates are deterministic and independent of the worker count") {
    const auto panel = testing::random_panel(3, 150, 300, 3);
    BootstrapConfig cfg;
    cfg.n_replicates = 40;
    cfg.seed = 99;
    const auto a = bootstrap_statistic(panel, ovr2, cfg, 1);
    const auto b = bootstrap_statistic(panel, ovr2, cfg, 4);
    CHECK(a.replicate_values == b.replicate_values);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    CHECK(a.point == ovr2(panel));
    CHECK(a.n_missing == 0);
    CHECK(a.ci_low <= a.ci_high);

    cfg.seed = 100;
    const auto c = bootstrap_statistic(panel, ovr2, cfg, 1);
    CHECK(c.replicate_values != a.replicate_values);

    // Replicate i depends on i alone: a longer run extends a shorter one.
    cfg.seed = 99;
    cfg.n_replicates = 60;
    const auto longer = bootstrap_statistic(panel, ovr2, cfg, 2);
    for (std::size_t i = 0; i < 40; ++i) CHECK(longer.replicate_values[i] == a.replicate_values[i]);

    const auto vec = bootstrap_vector(
        panel, [](const HaplotypePanel& p) { return std::vector<double>{ovr2(p), 2.0 * ovr2(p)}; }, cfg, 3);
    REQUIRE(vec.size() == 2);
    CHECK(vec[0].replicate_values == longer.replicate_values);
}

TEST_CASE("undefined replicates are counted as missing") {
    // One polymorphic locus carried by a single haplotype: many resamples miss it.
    const auto panel = testing::counts_panel({"A", "B"}, 10, {{1, 0}, {0, 0}});
    BootstrapConfig cfg;
    cfg.n_replicates = 200;
    const auto s = bootstrap_statistic(
        panel, [](const HaplotypePanel& p) { return regional_fq(p, {"A", "B"}, QOrder(2.0)).value; }, cfg);
    CHECK(s.n_missing > 0);
    CHECK(s.n_missing < 200);
    std::size_t missing = 0;
    for (const auto& v : s.replicate_values) missing += !v.has_value();
    CHECK(missing == s.n_missing);
    CHECK(s.unreliable == (2 * s.n_missing > 200));
}

TEST_CASE("percentile band covers the large-sample value") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<std::pair<double, double>> freqs(40);
    for (auto& f : freqs) f = {u(rng), u(rng)};
    std::vector<std::vector<std::size_t>> exact(2, std::vector<std::size_t>(freqs.size()));
    const std::size_t big = 100000;
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        exact[0][j] = static_cast<std::size_t>(freqs[j].first * big);
        exact[1][j] = static_cast<std::size_t>(freqs[j].second * big);
    }
    // F_2 of the generating frequencies, from one very large panel.
    auto f2 = [](const HaplotypePanel& p) { return regional_fq(p, {"A", "B"}, QOrder(2.0)).value; };
    const double truth = f2(testing::counts_panel({"A", "B"}, big, exact));

    BootstrapConfig cfg;
    cfg.n_replicates = 100;
    cfg.per_pop_cap = 200;
    int covered = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const auto panel = sampled_panel(freqs, 200, 1000 + trial);
        cfg.seed = trial;
        const auto s = bootstrap_statistic(panel, f2, cfg);
        covered += s.ci_low <= truth && truth <= s.ci_high;
    }
    MESSAGE("coverage " << covered << "/100");
    CHECK(covered >= 80);
}

}  // TEST_SUITE
