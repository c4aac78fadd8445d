#include "fqlens/error.hpp"
#include "fqlens/panel.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace fqlens;

TEST_SUITE("panel") {

TEST_CASE("bit matrix layout and padding") {
    BitMatrix m(3, 130);
    CHECK(m.words_per_row() == 3);
    m.set(1, 0, true);
    m.set(1, 64, true);
    m.set(1, 129, true);
    CHECK(m.row(1)[0] == 1);
    CHECK(m.row(1)[1] == 1);
    CHECK(m.row(1)[2] == 2);
    CHECK(m.row_count(1) == 3);
    CHECK(m.row_count(0) == 0);
    m.set(1, 64, false);
    CHECK_FALSE(m.get(1, 64));
    CHECK(m.row_count(1) == 2);

    std::vector<std::uint64_t> w(3, 0);
    set_bit_range(w, 60, 130);
    CHECK(w[0] == 0xF000000000000000ULL);
    CHECK(w[1] == ~0ULL);
    CHECK(w[2] == 3);
}

TEST_CASE("natural chromosome order") {
    std::vector<std::string> names{"X", "chr10", "2", "1", "chr2b", "MT", "9"};
    std::sort(names.begin(), names.end(), chromosome_less);
    CHECK(names == std::vector<std::string>{"1", "2", "9", "chr10", "chr2b", "MT", "X"});
    CHECK(chromosome_less("2", "10"));
    CHECK(chromosome_less("chr2", "10"));
    CHECK_FALSE(chromosome_less("10", "2"));
    CHECK(chromosome_less("22", "X"));
    CHECK(chromosome_less("X", "Y"));
    CHECK(locus_less({"1", 500, ""}, {"2", 100, ""}));
    CHECK(locus_less({"1", 100, ""}, {"1", 500, ""}));
}

TEST_CASE("panel construction checks") {
    std::vector<HaplotypeMeta> haps{{"a", 0, "P"}, {"a", 1, "P"}};
    std::vector<LocusMeta> loci{{"1", 100, "x"}, {"1", 50, "y"}};
    CHECK_THROWS_AS(HaplotypePanel(haps, loci, BitMatrix(2, 2)), ConfigError);
    loci[1].position = 100;
    CHECK_THROWS_AS(HaplotypePanel(haps, loci, BitMatrix(2, 2)), ConfigError);
    loci[1].position = 200;
    CHECK_THROWS_AS(HaplotypePanel(haps, loci, BitMatrix(3, 2)), ConfigError);
    haps[1].population.clear();
    CHECK_THROWS_AS(HaplotypePanel(haps, loci, BitMatrix(2, 2)), ConfigError);
}

TEST_CASE("populations, row selection and locus selection") {
    const auto p = testing::random_panel(4, 40, 100, 3);
    CHECK(p.populations() == std::vector<std::string>{"pop0", "pop1", "pop2"});
    CHECK(p.has_population("pop1"));
    CHECK_FALSE(p.has_population("pop9"));
    CHECK_THROWS_AS(p.rows_of("pop9"), LookupError);
    std::size_t total = 0;
    for (const auto& pop : p.populations()) {
        const auto& rows = p.rows_of(pop);
        CHECK(std::is_sorted(rows.begin(), rows.end()));
        for (auto r : rows) CHECK(p.haplotypes()[r].population == pop);
        total += rows.size();
    }
    CHECK(total == 40);

    const std::vector<std::size_t> pick{5, 5, 0};
    const auto s = p.select_rows(pick);
    REQUIRE(s.n_haplotypes() == 3);
    for (std::size_t j = 0; j < p.n_loci(); ++j) {
        CHECK(s.allele(0, j) == p.allele(5, j));
        CHECK(s.allele(1, j) == p.allele(5, j));
        CHECK(s.allele(2, j) == p.allele(0, j));
    }
    const std::vector<std::size_t> cols{1, 63, 64, 99};
    const auto l = p.select_loci(cols);
    REQUIRE(l.n_loci() == 4);
    for (std::size_t h = 0; h < p.n_haplotypes(); ++h) {
        for (std::size_t c = 0; c < cols.size(); ++c) CHECK(l.allele(h, c) == p.allele(h, cols[c]));
    }
    CHECK(l.loci()[2] == p.loci()[64]);
    CHECK(p == testing::random_panel(4, 40, 100, 3));
    CHECK_FALSE(p == s);
}

TEST_CASE("alternate counts over row multisets") {
    const auto p = testing::random_panel(5, 200, 777, 2);
    std::mt19937_64 rng(1);
    std::vector<std::size_t> rows(300);
    for (auto& r : rows) r = rng() % 200;
    const auto c1 = count_alternate(p.alleles(), rows, 1);
    const auto c4 = count_alternate(p.alleles(), rows, 4);
    CHECK(c1 == c4);
    for (std::size_t j = 0; j < p.n_loci(); j += 13) {
        std::uint32_t want = 0;
        for (auto r : rows) want += p.allele(r, j);
        CHECK(c1[j] == want);
    }
}

TEST_CASE("minor allele frequency filter") {
    // Pooled alternate counts over 20 haplotypes: 0, 1, 2, 10, 19, 20.
    const auto p = testing::counts_panel({"A", "B"}, 10, {{0, 1, 2, 10, 10, 10}, {0, 0, 0, 0, 9, 10}});
    CHECK(filter_min_maf(p, 0.0).n_loci() == 6);
    const auto f = filter_min_maf(p, 0.1);
    REQUIRE(f.n_loci() == 2);
    CHECK(f.loci()[0].id == "l2");
    CHECK(f.loci()[1].id == "l3");
    CHECK(filter_min_maf(p, 0.05).n_loci() == 4);
    CHECK_THROWS_AS(filter_min_maf(p, 0.6), ConfigError);
    CHECK_THROWS_AS(filter_min_maf(p, -0.1), ConfigError);
}

}  // TEST_SUITE
