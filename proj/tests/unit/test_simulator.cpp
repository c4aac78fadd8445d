#include "fqlens/error.hpp"
#include "fqlens/io/native.hpp"
#include "fqlens/region_stats.hpp"
#include "fqlens/sim/config.hpp"
#include "fqlens/sim/founders.hpp"
#include "fqlens/sim/gamete.hpp"
#include "fqlens/sim/mating.hpp"
#include "fqlens/sim/simulator.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace fqlens;
using namespace fqlens::sim;

namespace {

const std::string kSmall = R"(
seed = 3
generations = 4
offspring_lambda = 3.0
demes = ["A", "B"]
q = [1.0, 2.0]

[founders]
count = 20
loci = 300
model = "shared"
beta = [0.5, 0.5]

[genome]
chromosomes = 2
length_bp = 50000000
cm_per_mb = 1.5

[[schedule]]
from_generation = 0
rho = { A = 0.2, B = 0.4 }
)";

SimConfig small_config(const std::string& extra = {}) { return parse_sim_config(kSmall + extra, false); }

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config parsing and rejection") {
    const auto c = small_config();
    CHECK(c.seed == 3);
    CHECK(c.demes == std::vector<std::string>{"A", "B"});
    CHECK(c.founders.counts == std::vector<std::uint32_t>{20, 20});
    CHECK(c.founders.model == FounderModel::shared);
    CHECK(c.kinship_window == 4);
    CHECK(c.schedule.rho(1, 3) == 0.4);
    CHECK_FALSE(c.resolved_json().empty());

    CHECK_THROWS_AS(parse_sim_config(kSmall + "colour = 1\n", false), ConfigError);
    CHECK_THROWS_AS(parse_sim_config(kSmall + "[output]\nframes = true\n", false), ConfigError);
    std::string one_deme = kSmall;
    one_deme.replace(one_deme.find("[\"A\", \"B\"]"), 10, "[\"A\"]");
    one_deme.replace(one_deme.find("rho = { A = 0.2, B = 0.4 }"), 26, "rho = { A = 0.2 }");
    CHECK_THROWS_AS(parse_sim_config(one_deme, false), ConfigError);
    std::string bad_rho = kSmall;
    bad_rho.replace(bad_rho.find("B = 0.4"), 7, "B = 1.4");
    CHECK_THROWS_AS(parse_sim_config(bad_rho, false), ConfigError);
    std::string late = kSmall;
    late.replace(late.find("from_generation = 0"), 19, "from_generation = 2");
    CHECK_THROWS_AS(parse_sim_config(late, false), ConfigError);

    const auto j = parse_sim_config(
        R"({"demes": ["A", "B"], "founders": {"count": {"A": 4, "B": 6}, "loci": 10},
            "genome": {"map": "m.tsv"},
            "schedule": [{"from_generation": 0, "rho": {"A": 0, "B": 0}},
                         {"from_generation": 5, "rho": {"A": 1, "B": 0.5}}]})",
        true, "/base/dir");
    CHECK(j.founders.counts == std::vector<std::uint32_t>{4, 6});
    CHECK(j.genome.map_path == std::filesystem::path("/base/dir/m.tsv"));
    CHECK(j.schedule.rho(0, 4) == 0.0);
    CHECK(j.schedule.rho(0, 5) == 1.0);
    CHECK(j.schedule.rho(1, 100) == 0.5);

    for (const char* name : {"configs/baseline_drift.toml", "configs/isolation_pulse.toml"}) {
        const auto shipped = load_sim_config(testing::source_path(name));
        CHECK(shipped.n_generations == 17);
        CHECK(shipped.demes.size() == 3);
        CHECK_NOTHROW(shipped.load_map());
    }
}

TEST_CASE("founders: layout, sexes and determinism") {
    auto cfg = small_config();
    const auto map = cfg.load_map();
    const auto loci = spread_loci(map, 300);
    REQUIRE(loci.size() == 300);
    for (std::size_t j = 1; j < loci.size(); ++j) CHECK(locus_less(loci[j - 1], loci[j]));

    for (auto model : {FounderModel::independent, FounderModel::shared, FounderModel::balding_nichols}) {
        cfg.founders.model = model;
        const auto a = synth_founders(cfg.demes, cfg.founders, map, 11);
        const auto b = synth_founders(cfg.demes, cfg.founders, map, 11);
        const auto c = synth_founders(cfg.demes, cfg.founders, map, 12);
        CHECK(a.genomes == b.genomes);
        CHECK_FALSE(a.genomes == c.genomes);
        REQUIRE(a.pedigree.size() == 40);
        CHECK(a.genomes.rows() == 80);
        CHECK(a.genomes.cols() == 300);
        std::size_t females = 0;
        for (IndividualId i = 0; i < a.pedigree.size(); ++i) {
            CHECK(a.pedigree[i].is_founder());
            females += a.pedigree[i].sex == Sex::female;
        }
        CHECK(females == 20);
    }
    cfg.founders.counts = {1, 20};
    CHECK_THROWS_AS(synth_founders(cfg.demes, cfg.founders, map, 1), ConfigError);
}

TEST_CASE("gametes copy whole parental segments") {
    const auto map = io::GeneticMap::uniform({{"1", 100'000'000}, {"2", 60'000'000}}, 2.0);
    const auto loci = spread_loci(map, 500);
    GameteMaker maker(map, loci);
    BitMatrix parents(2, loci.size());
    for (std::size_t j = 0; j < loci.size(); ++j) parents.set(1, j, true);  // h0 all 0, h1 all 1
    BitMatrix out(1, loci.size());

    Philox rng(5, stream_id(StreamTag::test, 0, 0));
    double total_xo = 0.0;
    const int n = 2000;
    for (int t = 0; t < n; ++t) {
        const auto xo = maker.make(parents.row(0), parents.row(1), t % 2 ? Sex::male : Sex::female, rng, out.row(0));
        total_xo += static_cast<double>(xo);
        std::size_t switches = 0;
        for (std::size_t j = 1; j < loci.size(); ++j) {
            if (loci[j].chromosome == loci[j - 1].chromosome) switches += out.get(0, j) != out.get(0, j - 1);
        }
        CHECK(switches <= xo);
        // Padding past the last locus stays clear.
        CHECK((out.row(0).back() >> (loci.size() % 64)) == 0);
    }
    // 2 cM/Mb over 160 Mb: 3.2 expected crossovers per gamete.
    CHECK(total_xo / n == doctest::Approx(3.2).epsilon(0.05));

    // Identical parental haplotypes pass through unchanged.
    BitMatrix same(2, loci.size());
    for (std::size_t j = 0; j < loci.size(); j += 3) {
        same.set(0, j, true);
        same.set(1, j, true);
    }
    for (int t = 0; t < 20; ++t) {
        maker.make(same.row(0), same.row(1), Sex::female, rng, out.row(0));
        for (std::size_t j = 0; j < loci.size(); ++j) CHECK(out.get(0, j) == same.get(0, j));
    }

    const auto flat = io::GeneticMap::uniform({{"1", 100'000'000}, {"2", 60'000'000}}, 0.0);
    GameteMaker none(flat, loci);
    // Without crossovers each chromosome is one intact parental haplotype.
    for (int t = 0; t < 20; ++t) {
        CHECK(none.make(parents.row(0), parents.row(1), Sex::male, rng, out.row(0)) == 0);
        for (std::size_t j = 1; j < loci.size(); ++j) {
            if (loci[j].chromosome == loci[j - 1].chromosome) CHECK(out.get(0, j) == out.get(0, j - 1));
        }
    }
    std::vector<LocusMeta> stray{{"7", 10, "x"}};
    CHECK_THROWS_AS(GameteMaker(map, stray), ConfigError);
}

TEST_CASE("pairing: monogamy, opposite sexes, schedule extremes") {
    Pedigree ped({"A", "B"});
    for (int i = 0; i < 60; ++i) ped.add_founder(i % 2 ? Sex::male : Sex::female, static_cast<std::uint16_t>(i / 30));
    const KinshipCalculator kin(ped, 4);
    for (double rho : {0.0, 0.5, 1.0}) {
        PanmixiaSchedule sched({"A", "B"}, {{0, {{"A", rho}, {"B", rho}}}});
        PairingStats st;
        const auto couples = pair_generation(ped, 0, sched, kin, 9, &st);
        CHECK(couples.size() == st.couples);
        CHECK(pair_generation(ped, 0, sched, kin, 9).size() == couples.size());
        std::set<IndividualId> seen;
        std::size_t cross = 0;
        for (const auto& c : couples) {
            CHECK(ped[c.mother].sex == Sex::female);
            CHECK(ped[c.father].sex == Sex::male);
            CHECK(seen.insert(c.mother).second);
            CHECK(seen.insert(c.father).second);
            cross += ped[c.mother].deme != ped[c.father].deme;
        }
        CHECK(cross == st.cross_deme);
        CHECK(2 * couples.size() + st.unmatched == 60);
        // Unrelated founders, 15 of each sex per deme: everyone pairs.
        CHECK(couples.size() == 30);
        if (rho == 0.0) CHECK(cross == 0);
        if (rho == 1.0) CHECK(cross == 30);
    }
    PanmixiaSchedule s({"A", "B"}, {{0, {{"A", 0.5}, {"B", 0.5}}}});
    const auto x = pair_generation(ped, 0, s, kin, 1);
    const auto y = pair_generation(ped, 0, s, kin, 2);
    bool differ = x.size() != y.size();
    for (std::size_t i = 0; !differ && i < x.size(); ++i) differ = x[i].mother != y[i].mother || x[i].father != y[i].father;
    CHECK(differ);
}

TEST_CASE("runs are reproducible and independent of the worker count") {
    const auto cfg = small_config();
    const auto a = run_experiment(cfg, {1, {}});
    const auto b = run_experiment(cfg, {3, {}});
    REQUIRE(a.status == RunStatus::completed);
    CHECK(a.last_generation == 4);
    CHECK(a.pedigree == b.pedigree);
    REQUIRE(a.stats.size() == b.stats.size());
    for (std::size_t i = 0; i < a.stats.size(); ++i) {
        CHECK(a.stats[i].value == b.stats[i].value);
        CHECK(a.stats[i].deme == b.stats[i].deme);
    }
    // 5 generations × 2 demes × {ovr, loo} × 2 orders.
    CHECK(a.stats.size() == 40);
    const auto rep = audit_run(a.pedigree, a.unions, cfg.kinship_window);
    CHECK(rep.violations.empty());
    CHECK(rep.individuals == a.pedigree.size());

    auto other = cfg;
    other.seed = 4;
    CHECK_FALSE(run_experiment(other).pedigree == a.pedigree);
}

TEST_CASE("children inherit parental alleles and deme") {
    Simulator sim(small_config());
    for (int g = 0; g < 3; ++g) {
        const auto parent_ids = std::vector<IndividualId>(sim.members().begin(), sim.members().end());
        const BitMatrix parents = sim.genomes();
        const auto rep = sim.step();
        REQUIRE_FALSE(sim.extinct());
        const auto kids = sim.members();
        CHECK(kids.size() == rep.children);
        auto row_of = [&](IndividualId id) {
            return 2 * static_cast<std::size_t>(id - parent_ids.front());
        };
        for (std::size_t k = 0; k < kids.size(); ++k) {
            const auto& kid = sim.pedigree()[kids[k]];
            CHECK(kid.deme == sim.pedigree()[kid.mother].deme);
            const std::size_t m = row_of(kid.mother), f = row_of(kid.father);
            for (std::size_t j = 0; j < sim.loci().size(); ++j) {
                const bool mat = sim.genomes().get(2 * k, j);
                const bool pat = sim.genomes().get(2 * k + 1, j);
                CHECK((mat == parents.get(m, j) || mat == parents.get(m + 1, j)));
                CHECK((pat == parents.get(f, j) || pat == parents.get(f + 1, j)));
            }
        }
    }
}

TEST_CASE("isolated demes with fixed differences stay fully differentiated") {
    // Deme A fixed for the reference allele, deme B for the alternate.
    const std::size_t loci = 50;
    const auto panel = testing::counts_panel({"A", "B"}, 40, {std::vector<std::size_t>(loci, 0),
                                                              std::vector<std::size_t>(loci, 40)});
    const auto dir = testing::temp_dir("fixed_demes");
    io::write_native(panel, dir / "founders.fql");
    const auto cfg = parse_sim_config(R"(
generations = 6
demes = ["A", "B"]
q = [0.5, 1.0, 2.0]
[founders]
panel = "founders.fql"
[[schedule]]
from_generation = 0
rho = { A = 0.0, B = 0.0 }
)",
                                      false, dir);
    const auto res = run_experiment(cfg);
    REQUIRE(res.status == RunStatus::completed);
    std::size_t checked = 0;
    for (const auto& s : res.stats) {
        if (s.statistic != "ovr") continue;
        REQUIRE(s.value.has_value());
        CHECK(*s.value == doctest::Approx(1.0).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked == 7 * 2 * 3);
    CHECK(audit_run(res.pedigree, res.unions, cfg.kinship_window).violations.empty());
}

TEST_CASE("a population without offspring goes extinct") {
    auto cfg = small_config();
    cfg.offspring_lambda = 1e-9;
    const auto res = run_experiment(cfg);
    CHECK(res.status == RunStatus::extinct);
    CHECK(res.last_generation == 0);
}

}  // TEST_SUITE
