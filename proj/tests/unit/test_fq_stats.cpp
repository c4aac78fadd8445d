#include "fqlens/error.hpp"
#include "fqlens/fq_stats.hpp"

#include "information.hpp"
#include "tables.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace fqlens;

namespace {

const std::vector<double> kBoundGrid{0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};

LocusFreqTable make(const oracle::FreqTable& t) { return LocusFreqTable(t.freqs, t.weights); }

}  // namespace

TEST_SUITE("fq_stats") {

TEST_CASE("table validation") {
    CHECK_THROWS_AS(LocusFreqTable({}, {}), ConfigError);
    CHECK_THROWS_AS(LocusFreqTable({0.1, 0.2}, {1.0}), ConfigError);
    CHECK_THROWS_AS(LocusFreqTable({0.1, 0.2}, {0.5, 0.5}, {"a"}), ConfigError);
    CHECK_THROWS_AS(LocusFreqTable({0.1, 1.2}, {0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(LocusFreqTable({0.1, 0.2}, {0.7, 0.7}), DomainError);
    CHECK_THROWS_AS(LocusFreqTable({0.1, 0.2}, {1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(LocusFreqTable({0.1, 0.2}, {1.5, -0.5}), DomainError);
    const auto t = LocusFreqTable::equal_weights({0.1, 0.2, 0.3});
    CHECK(t.group_ids()[2] == "2");
    CHECK(t.weights()[0] == doctest::Approx(1.0 / 3));
}

TEST_CASE("hand-derived three-group locus") {
    // p = (0.2, 0.4, 0.6) at equal weights: p̄ = 0.4, Var_w = 0.08/3,
    // F_2 = Var_w / (p̄(1 - p̄)) = 1/9.
    const std::vector<double> f{0.2, 0.4, 0.6};
    const std::vector<double> w(3, 1.0 / 3);
    const long double brute = oracle::weighted_variance(f, w) /
                              (oracle::weighted_mean(f, w) * (1.0L - oracle::weighted_mean(f, w)));
    CHECK(static_cast<double>(brute) == doctest::Approx(1.0 / 9).epsilon(1e-12));

    const auto d = locus_diff(LocusFreqTable::equal_weights(f), QOrder(2.0));
    REQUIRE(d.fq);
    CHECK(std::round(*d.fq * 1e6) / 1e6 == doctest::Approx(0.111111).epsilon(1e-12));
    CHECK(std::fabs(*d.fq - static_cast<double>(brute)) < 1e-14);
    CHECK(std::fabs(d.delta - 2.0 * static_cast<double>(oracle::weighted_variance(f, w))) < 1e-15);
}

TEST_CASE("mutual information of (0.1, 0.9)") {
    const auto t = LocusFreqTable::equal_weights({0.1, 0.9});
    const double oracle_mi = static_cast<double>(oracle::mutual_information({0.1, 0.9}, {0.5, 0.5}));
    CHECK(std::round(oracle_mi * 1e6) / 1e6 == doctest::Approx(0.368064).epsilon(1e-12));
    CHECK(std::fabs(mutual_information(t) - oracle_mi) < 1e-15);
    CHECK(std::fabs(locus_diff(t, QOrder(1.0)).delta - oracle_mi) < 1e-15);
}

TEST_CASE("boundary tables") {
    for (double q : kBoundGrid) {
        const auto same = locus_diff(LocusFreqTable::equal_weights({0.3, 0.3, 0.3}), QOrder(q));
        CHECK(same.delta == 0.0);
        CHECK(*same.fq == 0.0);
        const auto opposite = locus_diff(LocusFreqTable::equal_weights({0.0, 1.0}), QOrder(q));
        CHECK(*opposite.fq == 1.0);
        const auto mono = locus_diff(LocusFreqTable::equal_weights({1.0, 1.0}), QOrder(q));
        CHECK(mono.s_total == 0.0);
        CHECK_FALSE(mono.fq.has_value());
    }
    CHECK_THROWS_AS(fst_classic(LocusFreqTable::equal_weights({0.0, 0.0})), UndefinedStatistic);
}

TEST_CASE("Jensen gap bounds on random tables") {
    const auto tables = oracle::random_tables(10000, 1);
    for (const auto& raw : tables) {
        const auto t = make(raw);
        for (double q : kBoundGrid) {
            const auto d = locus_diff(t, QOrder(q));
            CHECK(d.delta >= -1e-12);
            REQUIRE(d.fq);
            CHECK(*d.fq >= -1e-12);
            CHECK(*d.fq <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("q = 2 reduces to F_ST and twice the weighted variance") {
    for (const auto& raw : oracle::random_tables(10000, 2)) {
        const auto t = make(raw);
        const auto d = locus_diff(t, QOrder(2.0));
        CHECK(std::fabs(*d.fq - fst_classic(t)) < 1e-12);
        const double var = static_cast<double>(oracle::weighted_variance(raw.freqs, raw.weights));
        CHECK(std::fabs(d.delta - 2.0 * var) < 1e-12);
    }
}

TEST_CASE("q = 1 reduces to mutual information") {
    for (const auto& raw : oracle::random_tables(10000, 3)) {
        const auto t = make(raw);
        const double mi = static_cast<double>(oracle::mutual_information(raw.freqs, raw.weights));
        CHECK(std::fabs(locus_diff(t, QOrder(1.0)).delta - mi) < 1e-12);
        CHECK(std::fabs(mutual_information(t) - mi) < 1e-12);
    }
}

TEST_CASE("general q matches the brute-force Jensen gap") {
    for (const auto& raw : oracle::random_tables(2000, 4)) {
        const auto t = make(raw);
        for (double q : kBoundGrid) {
            const double ref = static_cast<double>(oracle::jensen_gap(raw.freqs, raw.weights, q));
            CHECK(std::fabs(locus_diff(t, QOrder(q)).delta - ref) < 1e-12);
        }
    }
}

TEST_CASE("dominant weight") {
    const double eps = 1e-12;
    for (double q : kBoundGrid) {
        const auto same = locus_diff(LocusFreqTable({0.37, 0.37, 0.37}, {1.0 - eps, eps / 2, eps / 2}), QOrder(q));
        CHECK(std::fabs(*same.fq) < 1e-6);
        const auto near = locus_diff(LocusFreqTable({0.37, 0.9, 0.0}, {1.0 - eps, eps / 2, eps / 2}), QOrder(q));
        CHECK(std::fabs(*near.fq) < 1e-6);
    }
}

TEST_CASE("group order never changes a bit") {
    std::mt19937_64 rng(5);
    for (const auto& raw : oracle::random_tables(2000, 6)) {
        std::vector<std::size_t> perm(raw.freqs.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> f, w;
        for (auto i : perm) {
            f.push_back(raw.freqs[i]);
            w.push_back(raw.weights[i]);
        }
        const LocusFreqTable a(raw.freqs, raw.weights);
        const LocusFreqTable b(f, w);
        for (double q : kBoundGrid) {
            const auto da = locus_diff(a, QOrder(q));
            const auto db = locus_diff(b, QOrder(q));
            CHECK(da.delta == db.delta);
            CHECK(da.s_total == db.s_total);
            CHECK(*da.fq == *db.fq);
        }
        CHECK(fst_classic(a) == fst_classic(b));
        CHECK(mutual_information(a) == mutual_information(b));
        CHECK(pooled_frequency(a).value() == pooled_frequency(b).value());
    }
}

TEST_CASE("micro-average lies between per-locus extremes") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LocusDiff> diffs;
        double lo = 2.0, hi = -1.0;
        for (int l = 0; l < 50; ++l) {
            const auto raw = oracle::random_table(rng);
            diffs.push_back(locus_diff(make(raw), QOrder(1.5)));
            lo = std::min(lo, *diffs.back().fq);
            hi = std::max(hi, *diffs.back().fq);
        }
        diffs.push_back(locus_diff(LocusFreqTable::equal_weights({0.0, 0.0}), QOrder(1.5)));
        const auto m = micro_average(diffs);
        CHECK(m.loci_used == 50);
        CHECK(m.loci_skipped == 1);
        CHECK(m.value >= lo - 1e-15);
        CHECK(m.value <= hi + 1e-15);
    }
    std::vector<LocusDiff> mono(3, locus_diff(LocusFreqTable::equal_weights({1.0, 1.0}), QOrder(2.0)));
    CHECK_THROWS_AS(micro_average(mono), UndefinedStatistic);
}

TEST_CASE("q grids and spectra") {
    CHECK_NOTHROW(validate_q_grid(default_q_grid()));
    CHECK(default_q_grid().size() == 9);
    CHECK_THROWS_AS(validate_q_grid(std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(validate_q_grid(std::vector<double>{1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate_q_grid(std::vector<double>{2.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate_q_grid(std::vector<double>{0.0, 1.0}), DomainError);

    FqSpectrum s{"x", {0.5, 1.0, 2.0}, {0.4, 0.3, 0.1}, std::nullopt, std::nullopt};
    CHECK(slope_diagnostic(s) == doctest::Approx(0.2));
    s.ci_low = std::vector<double>{0.3, 0.2, 0.05};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.ci_high = std::vector<double>{0.5, 0.4, 0.2};
    CHECK_NOTHROW(s.validate());
    // The point may sit outside its band; only the band order is enforced.
    s.ci_low = std::vector<double>{0.45, 0.2, 0.05};
    CHECK_NOTHROW(s.validate());
    s.ci_low = std::vector<double>{0.6, 0.2, 0.05};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    FqSpectrum no_two{"x", {0.5, 1.0}, {0.4, 0.3}, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(slope_diagnostic(no_two), ConfigError);
}

}  // TEST_SUITE
