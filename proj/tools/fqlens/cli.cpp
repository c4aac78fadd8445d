#include "cli.hpp"

#include "commands.hpp"
#include "fqlens/error.hpp"
#include "fqlens/version.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <map>
#include <ostream>

namespace fqlens::cli {

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto log = std::make_shared<spdlog::logger>("fqlens", sink);
    log->set_pattern("fqlens: %l: %v");
    log->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FQLENS_LOG"); env && *env) {
        const std::string v = env;
        const auto level = spdlog::level::from_str(v);
        // from_str maps unknown names to "off"; only accept an explicit "off".
        if (level != spdlog::level::off || v == "off") {
            log->set_level(level);
        } else {
            log->warn("ignoring unknown FQLENS_LOG level '{}'", v);
        }
    }
    return log;
}

void add_analysis_args(CLI::App* sub, AnalysisOptions& o) {
    sub->add_option("panel", o.panel, "Native panel (FQL1) or phased variant text file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--sample-map", o.sample_map, "Sample to population TSV (variant text input)")
        ->check(CLI::ExistingFile);
    sub->add_option("--regions", o.regions, "Region spec (TOML or JSON); default: one region of all populations")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", o.output, "Output table; writes <output>.manifest.json beside it");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);

    CLI::App app{"fqlens: Tsallis-order F-statistics over haplotype panels", "fqlens"};
    app.set_version_flag("--version", std::string("fqlens ") + kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::vector<double> q_grid;
    std::string format = "csv";
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (bootstrap; overrides a simulation config)");
    app.add_option("--threads", g.threads, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
    auto* q_opt = app.add_option("--q-grid", q_grid, "Comma-separated entropy orders")->delimiter(',');
    app.add_flag("--bootstrap", g.bootstrap, "Attach percentile confidence intervals");
    app.add_option("--replicates", g.replicates, "Bootstrap replicates")->capture_default_str();
    app.add_option("--cap", g.cap, "Bootstrap haplotypes per population")->capture_default_str();
    app.add_option("--ci", g.ci, "Confidence level")->capture_default_str();
    app.add_option("--min-maf", g.min_maf, "Drop loci with pooled minor-allele frequency below this")
        ->capture_default_str();
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    ConvertOptions conv;
    auto* convert = app.add_subcommand("convert", "Convert phased variant text to a native panel");
    convert->add_option("input", conv.input, "Variant text file (or native panel)")
        ->required()
        ->check(CLI::ExistingFile);
    convert->add_option("--sample-map", conv.sample_map, "Sample to population TSV")->check(CLI::ExistingFile);
    convert->add_option("-o,--output", conv.output, "Native panel to write")->required();

    AnalysisOptions compute_opt;
    auto* compute = app.add_subcommand("compute", "Regional F_q per region over the q grid");
    add_analysis_args(compute, compute_opt);
    compute->add_option("--per-locus", compute_opt.per_locus, "Also write per-locus terms to this file");

    AnalysisOptions ovr_opt;
    auto* ovr = app.add_subcommand("ovr", "One-vs-rest F_q spectra per focal population");
    add_analysis_args(ovr, ovr_opt);
    ovr->add_option("--focal", ovr_opt.focal, "Focal population (repeatable)");
    ovr->add_flag("--all", ovr_opt.all, "Every population of every region (default)");
    ovr->add_option("--per-locus", ovr_opt.per_locus, "Also write per-locus terms to this file");

    AnalysisOptions loo_opt;
    auto* loo = app.add_subcommand("loo", "Leave-one-out influence of each population on its region");
    add_analysis_args(loo, loo_opt);

    SimulateOptions sim_opt;
    bool panels = false;
    bool pedigree = true;
    auto* simulate = app.add_subcommand("simulate", "Run a forward simulation from a TOML/JSON config");
    simulate->add_option("config", sim_opt.config, "Simulation config")->required()->check(CLI::ExistingFile);
    simulate->add_option("-o,--output", sim_opt.output_dir, "Output directory")->required();
    auto* panels_opt = simulate->add_flag("--panels,!--no-panels", panels, "Write per-generation panels");
    auto* pedigree_opt = simulate->add_flag("--pedigree,!--no-pedigree", pedigree, "Write pedigree.tsv");
    simulate->add_flag("--audit", sim_opt.audit, "Re-check every union against the eligibility rules");

    try {
        std::vector<const char*> argv{"fqlens"};
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    g.seed_given = seed_opt->count() > 0;
    g.q_given = q_opt->count() > 0;
    g.q_grid = q_grid;
    g.format = format == "json" ? Format::json : Format::csv;
    if (panels_opt->count()) sim_opt.panels = panels;
    if (pedigree_opt->count()) sim_opt.pedigree = pedigree;

    Context ctx{g, args, out, log};
    try {
        if (*convert) return cmd_convert(ctx, conv);
        if (*compute) return cmd_compute(ctx, compute_opt);
        if (*ovr) return cmd_ovr(ctx, ovr_opt);
        if (*loo) return cmd_loo(ctx, loo_opt);
        if (*simulate) return cmd_simulate(ctx, sim_opt);
    } catch (const UndefinedStatistic& e) {
        log->error("undefined statistic: {}", e.what());
        return kExitUndefined;
    } catch (const ParseError& e) {
        log->error("parse error: {}", e.what());
        return kExitParse;
    } catch (const FormatError& e) {
        log->error("format error: {}", e.what());
        return kExitParse;
    } catch (const ConfigError& e) {
        log->error("configuration error: {}", e.what());
        return kExitConfig;
    } catch (const DomainError& e) {
        log->error("configuration error: {}", e.what());
        return kExitConfig;
    } catch (const LookupError& e) {
        log->error("configuration error: {}", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace fqlens::cli
