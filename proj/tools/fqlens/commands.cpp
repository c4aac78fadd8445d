#include "commands.hpp"

#include "fqlens/digest.hpp"
#include "fqlens/error.hpp"
#include "fqlens/fq_stats.hpp"
#include "fqlens/io/native.hpp"
#include "fqlens/io/region_spec.hpp"
#include "fqlens/io/vcf.hpp"
#include "fqlens/region_stats.hpp"
#include "fqlens/resampling.hpp"
#include "fqlens/sim/config.hpp"
#include "fqlens/sim/pedigree.hpp"
#include "fqlens/sim/simulator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace fqlens::cli {

namespace fs = std::filesystem;

namespace {

const char* format_name(Format f) { return f == Format::csv ? "csv" : "json"; }
const char* extension(Format f) { return f == Format::csv ? ".csv" : ".json"; }

fs::path manifest_path_for(const fs::path& output) {
    return fs::path(output.string() + ".manifest.json");
}

nlohmann::json global_json(const GlobalOptions& g) {
    return {{"seed", g.seed},         {"threads", g.threads},     {"q_grid", g.q_grid},
            {"bootstrap", g.bootstrap}, {"replicates", g.replicates}, {"cap", g.cap},
            {"ci", g.ci},             {"min_maf", g.min_maf},     {"format", format_name(g.format)}};
}

nlohmann::json analysis_json(const GlobalOptions& g, const AnalysisOptions& o) {
    auto j = global_json(g);
    auto path_or_null = [](const fs::path& p) -> nlohmann::json {
        return p.empty() ? nlohmann::json() : nlohmann::json(fs::absolute(p).string());
    };
    j["panel"] = path_or_null(o.panel);
    j["sample_map"] = path_or_null(o.sample_map);
    j["regions"] = path_or_null(o.regions);
    j["output"] = path_or_null(o.output);
    j["per_locus"] = path_or_null(o.per_locus);
    j["focal"] = o.focal;
    j["all"] = o.all;
    return j;
}

HaplotypePanel load_panel(const fs::path& path, const fs::path& sample_map) {
    if (io::is_native_file(path)) return io::read_native(path);
    if (sample_map.empty()) {
        throw ConfigError(path.string() + " is not a native panel; variant text input needs --sample-map");
    }
    return io::read_vcf_subset(path, sample_map);
}

BootstrapConfig bootstrap_config(const GlobalOptions& g) {
    BootstrapConfig cfg;
    cfg.n_replicates = g.replicates;
    cfg.per_pop_cap = g.cap;
    cfg.ci_level = g.ci;
    cfg.seed = g.seed;
    cfg.validate();
    return cfg;
}

/// Panel, regions and manifest shared by compute / ovr / loo.
struct Analysis {
    HaplotypePanel panel;
    io::RegionSpec regions;
    Manifest manifest;
    std::vector<double> grid;
    std::optional<BootstrapConfig> boot;
};

Analysis prepare(Context& ctx, const AnalysisOptions& opt, const std::string& command) {
    Analysis a{{}, {}, Manifest(command, ctx.argv), {}, std::nullopt};
    const auto& g = ctx.global;
    a.grid = g.q_grid.empty() ? default_q_grid() : g.q_grid;
    validate_q_grid(a.grid);
    if (g.min_maf < 0.0 || g.min_maf > 0.5) throw ConfigError("--min-maf must lie in [0, 0.5]");
    if (g.bootstrap) a.boot = bootstrap_config(g);

    a.panel = load_panel(opt.panel, opt.sample_map);
    a.manifest.add_input(opt.panel);
    if (!opt.sample_map.empty()) a.manifest.add_input(opt.sample_map);
    ctx.log->info("panel {}: {} haplotypes, {} loci, {} populations", opt.panel.string(),
                  a.panel.n_haplotypes(), a.panel.n_loci(), a.panel.populations().size());

    if (g.min_maf > 0.0) {
        const std::size_t before = a.panel.n_loci();
        a.panel = filter_min_maf(a.panel, g.min_maf);
        const std::size_t dropped = before - a.panel.n_loci();
        ctx.log->info("--min-maf {} dropped {} loci", g.min_maf, dropped);
        a.manifest.set("min_maf_dropped", dropped);
    }

    if (opt.regions.empty()) {
        a.regions = io::RegionSpec::whole_panel(a.panel);
    } else {
        a.regions = io::load_region_spec(opt.regions);
        a.manifest.add_input(opt.regions);
    }
    a.regions.check_against(a.panel);

    nlohmann::json cfg = analysis_json(g, opt);
    cfg["q_grid"] = a.grid;
    nlohmann::json regions_json = nlohmann::json::object();
    for (const auto& [name, pops] : a.regions.regions) regions_json[name] = pops;
    cfg["resolved_regions"] = std::move(regions_json);
    a.manifest.set_config(std::move(cfg));
    a.manifest.set_seed(g.seed);
    return a;
}

std::vector<std::size_t> region_rows(const HaplotypePanel& panel, const std::vector<std::string>& pops) {
    std::vector<std::size_t> rows;
    for (const auto& p : pops) {
        const auto& r = panel.rows_of(p);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
}

std::vector<std::size_t> iota_region(std::size_t k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    return idx;
}

/// Bootstraps the concatenation of several spectra over one region.
std::vector<BootstrapSummary> bootstrap_requests(const HaplotypePanel& panel,
                                                 const std::vector<std::string>& pops,
                                                 const std::vector<SpectrumRequest>& requests,
                                                 const std::vector<double>& grid,
                                                 const BootstrapConfig& cfg, unsigned threads) {
    const HaplotypePanel sub = panel.select_rows(region_rows(panel, pops));
    auto stat = [&](const HaplotypePanel& p) {
        const CountTable counts = CountTable::from_panel(p, pops);
        std::vector<double> all;
        for (const auto& req : requests) {
            const auto v = fq_spectrum_values(counts, req, grid);
            all.insert(all.end(), v.begin(), v.end());
        }
        return all;
    };
    return bootstrap_vector(sub, stat, cfg, threads);
}

void warn_unreliable(Context& ctx, const std::vector<BootstrapSummary>& s, const std::string& what) {
    std::size_t bad = 0;
    for (const auto& b : s) bad += b.unreliable;
    if (bad) {
        ctx.log->warn("{}: {} bootstrap entries undefined in more than half of the replicates", what, bad);
    }
}

struct Ci {
    Cell low;
    Cell high;
};

Ci ci_cells(const std::optional<std::vector<BootstrapSummary>>& boot, std::size_t i) {
    if (!boot) return {std::monostate{}, std::monostate{}};
    return {number((*boot)[i].ci_low), number((*boot)[i].ci_high)};
}

std::vector<std::string> ci_notes(const GlobalOptions& g) {
    std::vector<std::string> notes;
    if (g.bootstrap) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "ci: nearest-rank percentile interval at level %g over %zu haplotype "
                      "bootstrap replicates, at most %zu haplotypes per population",
                      g.ci, g.replicates, g.cap);
        notes.emplace_back(buf);
    } else {
        notes.emplace_back("ci: empty (run with --bootstrap for percentile intervals)");
    }
    return notes;
}

Table per_locus_table() {
    return Table{{"region", "group", "q", "locus", "chromosome", "position", "s_total", "s_within",
                  "delta_q", "F_q"},
                 {}};
}

void add_per_locus(Table& t, const HaplotypePanel& panel, const std::string& region,
                   const std::string& group, double q, const std::vector<LocusDiff>& diffs) {
    const auto& loci = panel.loci();
    for (std::size_t j = 0; j < diffs.size() && j < loci.size(); ++j) {
        const auto& d = diffs[j];
        t.add({region, group, q, loci[j].id, loci[j].chromosome, integer(loci[j].position), d.s_total,
               d.s_within, d.delta, number(d.fq)});
    }
}

/// Writes the main table to stdout or to `opt.output` plus its manifest.
void emit(Context& ctx, const AnalysisOptions& opt, Analysis& a, const Table& table,
          Preamble pre, const Table* per_locus) {
    pre.seed = ctx.global.seed;
    const auto fmt = ctx.global.format;
    if (opt.output.empty()) {
        write_table(ctx.out, table, pre, fmt);
    } else {
        const fs::path mpath = manifest_path_for(opt.output);
        pre.manifest = mpath.filename().string();
        write_table_file(opt.output, table, pre, fmt);
        a.manifest.add_output(opt.output, table.columns);
        if (per_locus) {
            write_table_file(opt.per_locus, *per_locus, pre, fmt);
            a.manifest.add_output(opt.per_locus, per_locus->columns);
        }
        a.manifest.write(mpath);
        ctx.log->info("wrote {} ({} rows) and {}", opt.output.string(), table.rows.size(), mpath.string());
        return;
    }
    if (per_locus) {
        pre.manifest.clear();
        write_table_file(opt.per_locus, *per_locus, pre, fmt);
    }
}

const std::string kUnitsNote =
    "units: natural logarithms; delta_q at q = 1 is in nats; F_q is the micro-average "
    "sum(delta_q) / sum(S_total) over loci polymorphic in the pool";

}  // namespace

// ── convert ─────────────────────────────────────────────────────────────────

int cmd_convert(Context& ctx, const ConvertOptions& opt) {
    if (opt.output.empty()) throw ConfigError("convert needs an output path (-o)");
    Manifest manifest("convert", ctx.argv);
    manifest.set_seed(ctx.global.seed);
    const HaplotypePanel panel = load_panel(opt.input, opt.sample_map);
    manifest.add_input(opt.input);
    if (!opt.sample_map.empty()) manifest.add_input(opt.sample_map);
    manifest.set_config({{"input", fs::absolute(opt.input).string()},
                         {"sample_map", opt.sample_map.empty() ? nlohmann::json()
                                                               : nlohmann::json(fs::absolute(opt.sample_map).string())},
                         {"output", fs::absolute(opt.output).string()}});

    if (opt.output.has_parent_path()) fs::create_directories(opt.output.parent_path());
    io::write_native(panel, opt.output);
    const std::string digest = sha256_file(opt.output);
    const auto pops = panel.populations();
    manifest.add_output(opt.output, {});
    manifest.set("panel", {{"haplotypes", panel.n_haplotypes()},
                           {"loci", panel.n_loci()},
                           {"populations", pops},
                           {"sha256", digest}});
    manifest.write(manifest_path_for(opt.output));

    ctx.out << "haplotypes\t" << panel.n_haplotypes() << '\n'
            << "loci\t" << panel.n_loci() << '\n'
            << "populations\t" << pops.size() << '\t';
    for (std::size_t i = 0; i < pops.size(); ++i) ctx.out << (i ? "," : "") << pops[i];
    ctx.out << "\nsha256\t" << digest << '\n';
    return 0;
}

// ── compute ─────────────────────────────────────────────────────────────────

int cmd_compute(Context& ctx, const AnalysisOptions& opt) {
    Analysis a = prepare(ctx, opt, "compute");
    const auto& g = ctx.global;
    Table table{{"region", "q", "F_q", "ci_low", "ci_high", "n_loci_used", "n_loci_skipped"}, {}};
    std::optional<Table> loci;
    if (!opt.per_locus.empty()) loci = per_locus_table();

    for (const auto& [name, pops] : a.regions.regions) {
        const CountTable counts = CountTable::from_panel(a.panel, pops, g.threads);
        const auto idx = iota_region(pops.size());
        std::optional<std::vector<BootstrapSummary>> boot;
        if (a.boot) {
            SpectrumRequest req{SpectrumMode::regional, pops, {}};
            boot = bootstrap_requests(a.panel, pops, {req}, a.grid, *a.boot, g.threads);
            warn_unreliable(ctx, *boot, "region " + name);
        }
        for (std::size_t i = 0; i < a.grid.size(); ++i) {
            std::vector<LocusDiff> diffs;
            StatOptions so;
            so.threads = g.threads;
            if (loci) so.per_locus = &diffs;
            const MicroAverage m = regional_fq(counts, idx, QOrder(a.grid[i]), so);
            if (i == 0) a.manifest.add_skipped(m.loci_skipped);
            const Ci ci = ci_cells(boot, i);
            table.add({name, a.grid[i], m.value, ci.low, ci.high, integer(m.loci_used),
                       integer(m.loci_skipped)});
            if (loci) add_per_locus(*loci, a.panel, name, name, a.grid[i], diffs);
        }
    }

    Preamble pre{"compute", 0, {}, {kUnitsNote, "F_q: equal-weight regional statistic over the populations of each region"}};
    for (auto& n : ci_notes(g)) pre.notes.push_back(std::move(n));
    emit(ctx, opt, a, table, pre, loci ? &*loci : nullptr);
    return 0;
}

// ── ovr ─────────────────────────────────────────────────────────────────────

int cmd_ovr(Context& ctx, const AnalysisOptions& opt) {
    Analysis a = prepare(ctx, opt, "ovr");
    const auto& g = ctx.global;
    if (!opt.focal.empty() && opt.all) throw ConfigError("--focal and --all are mutually exclusive");

    // Every requested focal population must sit in some region.
    for (const auto& f : opt.focal) {
        bool found = false;
        for (const auto& [name, pops] : a.regions.regions) {
            if (std::find(pops.begin(), pops.end(), f) != pops.end()) found = true;
        }
        if (!found) throw ConfigError("focal population '" + f + "' is not in any region");
    }

    Table table{{"region", "focal", "q", "F_q", "ci_low", "ci_high", "n_loci_used", "n_loci_skipped"}, {}};
    std::optional<Table> loci;
    if (!opt.per_locus.empty()) loci = per_locus_table();

    for (const auto& [name, pops] : a.regions.regions) {
        std::vector<std::string> focal;
        for (const auto& p : pops) {
            if (opt.focal.empty() || std::find(opt.focal.begin(), opt.focal.end(), p) != opt.focal.end()) {
                focal.push_back(p);
            }
        }
        if (focal.empty()) continue;
        if (pops.size() < 2) {
            if (!opt.focal.empty()) {
                throw ConfigError("region '" + name + "' has one population; one-vs-rest needs two");
            }
            ctx.log->warn("skipping region '{}': one-vs-rest needs at least two populations", name);
            continue;
        }

        const CountTable counts = CountTable::from_panel(a.panel, pops, g.threads);
        const auto idx = iota_region(pops.size());
        std::optional<std::vector<BootstrapSummary>> boot;
        if (a.boot) {
            std::vector<SpectrumRequest> reqs;
            for (const auto& f : focal) reqs.push_back({SpectrumMode::ovr, pops, f});
            boot = bootstrap_requests(a.panel, pops, reqs, a.grid, *a.boot, g.threads);
            warn_unreliable(ctx, *boot, "region " + name);
        }
        for (std::size_t fi = 0; fi < focal.size(); ++fi) {
            const std::size_t k = counts.index_of(focal[fi]);
            for (std::size_t i = 0; i < a.grid.size(); ++i) {
                std::vector<LocusDiff> diffs;
                StatOptions so;
                so.threads = g.threads;
                if (loci) so.per_locus = &diffs;
                const MicroAverage m = ovr_fq(counts, k, idx, QOrder(a.grid[i]), so);
                if (i == 0) a.manifest.add_skipped(m.loci_skipped);
                const Ci ci = ci_cells(boot, fi * a.grid.size() + i);
                table.add({name, focal[fi], a.grid[i], m.value, ci.low, ci.high, integer(m.loci_used),
                           integer(m.loci_skipped)});
                if (loci) add_per_locus(*loci, a.panel, name, focal[fi], a.grid[i], diffs);
            }
        }
    }
    if (table.rows.empty()) throw ConfigError("no region offers a focal population with a rest to compare against");

    Preamble pre{"ovr", 0, {}, {kUnitsNote,
                                "F_q: focal population against the haplotypes pooled from the rest of "
                                "its region, two groups at weights (1/2, 1/2)"}};
    for (auto& n : ci_notes(g)) pre.notes.push_back(std::move(n));
    emit(ctx, opt, a, table, pre, loci ? &*loci : nullptr);
    return 0;
}

// ── loo ─────────────────────────────────────────────────────────────────────

int cmd_loo(Context& ctx, const AnalysisOptions& opt) {
    Analysis a = prepare(ctx, opt, "loo");
    const auto& g = ctx.global;
    for (const auto& [name, pops] : a.regions.regions) {
        if (pops.size() < 2) {
            throw ConfigError("region '" + name + "' has " + std::to_string(pops.size()) +
                              " population; leave-one-out needs at least two");
        }
    }

    Table table{{"region", "population", "q", "delta_F_q", "ci_low", "ci_high", "n_loci_used",
                 "n_loci_skipped"},
                {}};
    for (const auto& [name, pops] : a.regions.regions) {
        const CountTable counts = CountTable::from_panel(a.panel, pops, g.threads);
        const auto idx = iota_region(pops.size());
        std::optional<std::vector<BootstrapSummary>> boot;
        if (a.boot) {
            std::vector<SpectrumRequest> reqs;
            for (const auto& p : pops) reqs.push_back({SpectrumMode::loo, pops, p});
            boot = bootstrap_requests(a.panel, pops, reqs, a.grid, *a.boot, g.threads);
            warn_unreliable(ctx, *boot, "region " + name);
        }
        std::vector<MicroAverage> whole;
        StatOptions so;
        so.threads = g.threads;
        for (double q : a.grid) whole.push_back(regional_fq(counts, idx, QOrder(q), so));
        a.manifest.add_skipped(whole.front().loci_skipped);
        for (std::size_t k = 0; k < pops.size(); ++k) {
            for (std::size_t i = 0; i < a.grid.size(); ++i) {
                const double d = loo_influence(counts, idx, k, QOrder(a.grid[i]), g.threads);
                const Ci ci = ci_cells(boot, k * a.grid.size() + i);
                table.add({name, pops[k], a.grid[i], d, ci.low, ci.high, integer(whole[i].loci_used),
                           integer(whole[i].loci_skipped)});
            }
        }
    }

    Preamble pre{"loo", 0, {}, {kUnitsNote,
                                "sign: delta_F_q = F_q(region) - F_q(region without the population); "
                                "positive when the population drives regional structure, negative "
                                "when it homogenizes the region",
                                "n_loci_*: tallies of the full region"}};
    for (auto& n : ci_notes(g)) pre.notes.push_back(std::move(n));
    emit(ctx, opt, a, table, pre, nullptr);
    return 0;
}

// ── simulate ────────────────────────────────────────────────────────────────

int cmd_simulate(Context& ctx, const SimulateOptions& opt) {
    if (opt.output_dir.empty()) throw ConfigError("simulate needs an output directory (-o)");
    const auto& g = ctx.global;
    sim::SimConfig cfg = sim::load_sim_config(opt.config);
    if (g.seed_given) cfg.seed = g.seed;
    if (g.q_given) cfg.q_values = g.q_grid;
    if (opt.panels) cfg.output.panels = *opt.panels;
    if (opt.pedigree) cfg.output.pedigree = *opt.pedigree;
    cfg.validate();

    Manifest manifest("simulate", ctx.argv);
    manifest.set_seed(cfg.seed);
    manifest.add_input(opt.config);
    if (!cfg.genome.map_path.empty()) manifest.add_input(cfg.genome.map_path);
    if (!cfg.founder_panel.empty()) manifest.add_input(cfg.founder_panel);
    auto resolved = nlohmann::json::parse(cfg.resolved_json());
    resolved["threads"] = g.threads;
    resolved["format"] = format_name(g.format);
    manifest.set_config(std::move(resolved));

    const fs::path& dir = opt.output_dir;
    fs::create_directories(dir);
    const fs::path panel_dir = dir / "panels";

    sim::RunOptions run_opt;
    run_opt.threads = g.threads;
    std::vector<fs::path> panel_files;
    if (cfg.output.panels) {
        fs::create_directories(panel_dir);
        run_opt.on_panel = [&](std::uint32_t gen, const HaplotypePanel& p) {
            char name[32];
            std::snprintf(name, sizeof name, "generation_%02u.fql", gen);
            panel_files.push_back(panel_dir / name);
            io::write_native(p, panel_files.back());
            ctx.log->debug("wrote {}", panel_files.back().string());
        };
    }

    ctx.log->info("simulating {} generations, {} demes, seed {}", cfg.n_generations, cfg.demes.size(),
                  cfg.seed);
    const sim::RunResult res = sim::run_experiment(cfg, run_opt);
    const bool extinct = res.status == sim::RunStatus::extinct;

    Preamble pre{"simulate", cfg.seed, "manifest.json", {}};
    const auto fmt = g.format;

    Table ts{{"generation", "deme", "statistic", "q", "value"}, {}};
    for (const auto& s : res.stats) {
        ts.add({integer(s.generation), s.deme, s.statistic, s.q, number(s.value)});
    }
    pre.notes = {"statistic: ovr = one-vs-rest F_q of the deme against the other demes; "
                 "loo = F_q(all demes) - F_q(all demes but this one)",
                 "value: empty when every locus is monomorphic in the pool",
                 kUnitsNote};
    const fs::path ts_path = dir / (std::string("timeseries") + extension(fmt));
    write_table_file(ts_path, ts, pre, fmt);
    manifest.add_output(ts_path, ts.columns);

    Table census{{"generation", "deme", "individuals", "females", "males"}, {}};
    for (const auto& c : res.census) {
        census.add({integer(c.generation), c.deme, integer(c.individuals), integer(c.females),
                    integer(c.males)});
    }
    pre.notes.clear();
    const fs::path census_path = dir / (std::string("census") + extension(fmt));
    write_table_file(census_path, census, pre, fmt);
    manifest.add_output(census_path, census.columns);

    Table steps{{"generation", "couples", "cross_deme", "unmatched", "refusals", "children",
                 "crossovers"},
                {}};
    for (const auto& s : res.steps) {
        steps.add({integer(s.parents_generation), integer(s.pairing.couples),
                   integer(s.pairing.cross_deme), integer(s.pairing.unmatched),
                   integer(s.pairing.refusals), integer(s.children), integer(s.crossovers)});
    }
    pre.notes = {"generation: parents' generation; children belong to the next one"};
    const fs::path steps_path = dir / (std::string("matings") + extension(fmt));
    write_table_file(steps_path, steps, pre, fmt);
    manifest.add_output(steps_path, steps.columns);

    if (cfg.output.pedigree) {
        const fs::path ped_path = dir / "pedigree.tsv";
        sim::write_pedigree_tsv(res.pedigree, ped_path);
        manifest.add_output(ped_path, {"id", "sex", "deme", "generation", "mother", "father"});

        const fs::path unions_path = dir / "unions.tsv";
        std::ofstream u(unions_path, std::ios::trunc);
        if (!u) throw ConfigError("cannot write " + unions_path.string());
        u << "generation\tmother\tfather\n";
        for (std::size_t gen = 0; gen < res.unions.size(); ++gen) {
            for (const auto& c : res.unions[gen]) u << gen << '\t' << c.mother << '\t' << c.father << '\n';
        }
        manifest.add_output(unions_path, {"generation", "mother", "father"});
    }
    for (const auto& p : panel_files) manifest.add_output(p, {});

    manifest.set("status", extinct ? "extinct" : "completed");
    manifest.set("last_generation", res.last_generation);
    manifest.set("individuals", res.pedigree.size());
    manifest.set("undefined_statistics", res.undefined_statistics);

    std::size_t audit_violations = 0;
    if (opt.audit) {
        const auto rep = sim::audit_run(res.pedigree, res.unions, cfg.kinship_window);
        manifest.set("audit", {{"individuals", rep.individuals},
                               {"unions", rep.unions},
                               {"violations", rep.violations.size()}});
        for (const auto& v : rep.violations) ctx.log->error("audit: {}", v);
        ctx.log->info("audit: {} unions, {} violations", rep.unions, rep.violations.size());
        audit_violations = rep.violations.size();
    }
    manifest.write(dir / "manifest.json");

    if (extinct) {
        ctx.log->error("population extinct after generation {}; partial outputs written to {}",
                       res.last_generation, dir.string());
        return 5;
    }
    if (audit_violations) return 1;
    ctx.log->info("completed generation {}; outputs in {}", res.last_generation, dir.string());
    return 0;
}

}  // namespace fqlens::cli
