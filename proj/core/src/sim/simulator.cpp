#include "fqlens/sim/simulator.hpp"

#include "fqlens/error.hpp"
#include "fqlens/io/native.hpp"
#include "fqlens/parallel.hpp"
#include "fqlens/region_stats.hpp"
#include "fqlens/rng.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace fqlens::sim {

Simulator::Simulator(SimConfig config) : cfg_(std::move(config)) {
    cfg_.validate();
    map_ = cfg_.load_map();
    FounderPopulation f;
    if (!cfg_.founder_panel.empty()) {
        HaplotypePanel panel;
        try {
            panel = io::read_native(cfg_.founder_panel);
        } catch (const FormatError& e) {
            throw ConfigError(std::string("founder panel: ") + e.what());
        }
        f = founders_from_panel(panel, cfg_.demes);
    } else {
        f = synth_founders(cfg_.demes, cfg_.founders, map_, cfg_.seed);
    }
    ped_ = std::move(f.pedigree);
    genomes_ = std::move(f.genomes);
    loci_ = std::move(f.loci);
    gametes_ = std::make_unique<GameteMaker>(map_, loci_);
}

StepReport Simulator::step(unsigned threads) {
    StepReport rep;
    rep.parents_generation = generation_;
    if (extinct_) return rep;
    const std::uint32_t g = generation_;
    const KinshipCalculator kin(ped_, cfg_.kinship_window);
    auto couples = pair_generation(ped_, g, cfg_.schedule, kin, cfg_.seed, &rep.pairing);

    const auto parents = ped_.generation(g);
    const IndividualId first_parent = parents.empty() ? 0 : parents.front();

    // Children and their sexes, sequentially (pedigree ids are dense).
    std::vector<std::size_t> first_child(couples.size() + 1, 0);
    std::vector<Sex> sexes;
    for (std::size_t i = 0; i < couples.size(); ++i) {
        Philox rng(cfg_.seed, stream_id(StreamTag::fertility, g, i));
        std::poisson_distribution<std::size_t> pois(cfg_.offspring_lambda);
        const std::size_t k = pois(rng);
        for (std::size_t c = 0; c < k; ++c) sexes.push_back(rng.bernoulli(0.5) ? Sex::male : Sex::female);
        first_child[i + 1] = first_child[i] + k;
    }
    rep.children = sexes.size();
    unions_.push_back(couples);
    if (rep.children == 0) {
        extinct_ = true;
        return rep;
    }
    for (std::size_t i = 0; i < couples.size(); ++i) {
        const auto deme = ped_[couples[i].mother].deme;
        for (std::size_t c = first_child[i]; c < first_child[i + 1]; ++c) {
            ped_.add_child(couples[i].mother, couples[i].father, sexes[c], deme);
        }
    }

    BitMatrix next(2 * rep.children, loci_.size());
    std::vector<std::size_t> crossovers(couples.size(), 0);
    for_each_chunk(couples.size(), threads, [&](std::size_t i) {
        Philox rng(cfg_.seed, stream_id(StreamTag::gametes, g, i));
        const std::size_t m = 2 * static_cast<std::size_t>(couples[i].mother - first_parent);
        const std::size_t f = 2 * static_cast<std::size_t>(couples[i].father - first_parent);
        for (std::size_t c = first_child[i]; c < first_child[i + 1]; ++c) {
            crossovers[i] += gametes_->make(genomes_.row(m), genomes_.row(m + 1), Sex::female, rng, next.row(2 * c));
            crossovers[i] += gametes_->make(genomes_.row(f), genomes_.row(f + 1), Sex::male, rng, next.row(2 * c + 1));
        }
    });
    for (auto x : crossovers) rep.crossovers += x;
    genomes_ = std::move(next);
    ++generation_;
    return rep;
}

std::vector<CensusRow> Simulator::census() const {
    std::vector<CensusRow> rows(cfg_.demes.size());
    for (std::size_t d = 0; d < rows.size(); ++d) {
        rows[d].generation = generation_;
        rows[d].deme = cfg_.demes[d];
    }
    for (auto id : members()) {
        const auto& p = ped_[id];
        auto& r = rows[p.deme];
        ++r.individuals;
        ++(p.sex == Sex::female ? r.females : r.males);
    }
    return rows;
}

std::vector<DemeStatistic> Simulator::statistics(unsigned threads) const {
    const auto ids = members();
    const std::size_t n_demes = cfg_.demes.size();
    std::vector<std::vector<std::size_t>> rows(n_demes);
    for (std::size_t k = 0; k < ids.size(); ++k) {
        auto& r = rows[ped_[ids[k]].deme];
        r.push_back(2 * k);
        r.push_back(2 * k + 1);
    }
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> present_rows;
    for (std::size_t d = 0; d < n_demes; ++d) {
        if (rows[d].empty()) continue;
        labels.push_back(cfg_.demes[d]);
        present_rows.push_back(std::move(rows[d]));
    }
    const auto counts = CountTable::from_rows(genomes_, labels, present_rows, threads);
    std::vector<std::size_t> region(labels.size());
    for (std::size_t k = 0; k < region.size(); ++k) region[k] = k;

    std::vector<DemeStatistic> out;
    for (std::size_t d = 0; d < n_demes; ++d) {
        const auto it = std::find(labels.begin(), labels.end(), cfg_.demes[d]);
        for (double qv : cfg_.q_values) {
            const QOrder q(qv);
            DemeStatistic ovr{generation_, cfg_.demes[d], "ovr", qv, std::nullopt, 0, 0};
            DemeStatistic loo{generation_, cfg_.demes[d], "loo", qv, std::nullopt, 0, 0};
            if (it != labels.end() && region.size() >= 2) {
                const auto k = static_cast<std::size_t>(it - labels.begin());
                try {
                    const auto m = ovr_fq(counts, k, region, q, {threads, nullptr});
                    ovr.value = m.value;
                    ovr.loci_used = m.loci_used;
                    ovr.loci_skipped = m.loci_skipped;
                } catch (const UndefinedStatistic&) {
                    ovr.loci_skipped = loci_.size();
                }
                try {
                    const auto m = regional_fq(counts, region, q, {threads, nullptr});
                    loo.loci_used = m.loci_used;
                    loo.loci_skipped = m.loci_skipped;
                    loo.value = loo_influence(counts, region, k, q, threads);
                } catch (const UndefinedStatistic&) {
                    loo.value.reset();
                }
            }
            out.push_back(std::move(ovr));
            out.push_back(std::move(loo));
        }
    }
    return out;
}

HaplotypePanel Simulator::panel() const {
    const auto ids = members();
    std::vector<HaplotypeMeta> haps;
    haps.reserve(2 * ids.size());
    for (auto id : ids) {
        const auto& p = ped_[id];
        const auto sid = std::to_string(id);
        haps.push_back({sid, 0, cfg_.demes[p.deme]});
        haps.push_back({sid, 1, cfg_.demes[p.deme]});
    }
    return HaplotypePanel(std::move(haps), loci_, genomes_);
}

RunResult run_experiment(const SimConfig& config, const RunOptions& options) {
    Simulator sim(config);
    RunResult res;
    auto record = [&] {
        for (auto& c : sim.census()) res.census.push_back(std::move(c));
        for (auto& s : sim.statistics(options.threads)) {
            if (!s.value) ++res.undefined_statistics;
            res.stats.push_back(std::move(s));
        }
        if (options.on_panel) options.on_panel(sim.generation(), sim.panel());
    };
    record();
    for (std::uint32_t g = 0; g < config.n_generations; ++g) {
        res.steps.push_back(sim.step(options.threads));
        if (sim.extinct()) {
            res.status = RunStatus::extinct;
            break;
        }
        record();
    }
    res.last_generation = sim.generation();
    res.unions = sim.unions();
    res.pedigree = sim.release_pedigree();
    return res;
}

AuditReport audit_run(const Pedigree& ped, const std::vector<std::vector<Couple>>& unions,
                      unsigned kinship_window) {
    AuditReport rep;
    rep.individuals = ped.size();
    rep.violations = ped.audit();
    for (IndividualId i = 0; i < ped.size(); ++i) {
        const auto& p = ped[i];
        if (p.is_founder()) continue;
        if (ped[p.mother].generation + 1 != p.generation || ped[p.father].generation + 1 != p.generation) {
            rep.violations.push_back("individual " + std::to_string(i) + " has a parent outside the previous generation");
        }
    }
    const KinshipCalculator kin(ped, kinship_window);
    std::set<IndividualId> seen;
    for (std::size_t g = 0; g < unions.size(); ++g) {
        for (const auto& c : unions[g]) {
            ++rep.unions;
            const std::string who = "union " + std::to_string(c.mother) + " x " + std::to_string(c.father);
            if (!ped.contains(c.mother) || !ped.contains(c.father)) {
                rep.violations.push_back(who + " names an unknown individual");
                continue;
            }
            if (ped[c.mother].generation != g || ped[c.father].generation != g) {
                rep.violations.push_back(who + " is not within generation " + std::to_string(g));
            }
            if (!seen.insert(c.mother).second || !seen.insert(c.father).second) {
                rep.violations.push_back(who + " breaks monogamy");
            }
            const auto e = kin.eligibility(c.mother, c.father);
            if (!e.eligible) rep.violations.push_back(who + " refused: " + std::string(to_string(e.reason)));
        }
    }
    // Children must come from recorded unions.
    std::set<std::pair<IndividualId, IndividualId>> recorded;
    for (const auto& gen : unions) {
        for (const auto& c : gen) recorded.emplace(c.mother, c.father);
    }
    for (IndividualId i = 0; i < ped.size(); ++i) {
        const auto& p = ped[i];
        if (!p.is_founder() && !recorded.count({p.mother, p.father})) {
            rep.violations.push_back("individual " + std::to_string(i) + " has parents outside any recorded union");
        }
    }
    return rep;
}

}  // namespace fqlens::sim
