// =============================================================================
// commands.hpp - Subcommand bodies of the fqlens tool.
//
// Each command reads its inputs, writes its tables (to a file plus a
// `<file>.manifest.json`, or to the supplied stream) and returns a process
// exit code. Library exceptions propagate; `run` in cli.hpp maps them.
// =============================================================================
#pragma once

#include "output.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spdlog {
class logger;
}

namespace fqlens::cli {

struct GlobalOptions {
    std::uint64_t seed = 1;
    bool seed_given = false;
    unsigned threads = 1;
    std::vector<double> q_grid;
    bool q_given = false;
    bool bootstrap = false;
    std::size_t replicates = 100;
    std::size_t cap = 40;
    double ci = 0.95;
    double min_maf = 0.0;
    Format format = Format::csv;
};

struct AnalysisOptions {
    std::filesystem::path panel;
    std::filesystem::path sample_map;
    std::filesystem::path regions;
    std::filesystem::path output;
    std::filesystem::path per_locus;
    std::vector<std::string> focal;
    bool all = false;
};

struct ConvertOptions {
    std::filesystem::path input;
    std::filesystem::path sample_map;
    std::filesystem::path output;
};

struct SimulateOptions {
    std::filesystem::path config;
    std::filesystem::path output_dir;
    std::optional<bool> panels;
    std::optional<bool> pedigree;
    bool audit = false;
};

struct Context {
    GlobalOptions global;
    std::vector<std::string> argv;
    std::ostream& out;
    std::shared_ptr<spdlog::logger> log;
};

int cmd_convert(Context& ctx, const ConvertOptions& opt);
int cmd_compute(Context& ctx, const AnalysisOptions& opt);
int cmd_ovr(Context& ctx, const AnalysisOptions& opt);
int cmd_loo(Context& ctx, const AnalysisOptions& opt);
int cmd_simulate(Context& ctx, const SimulateOptions& opt);

}  // namespace fqlens::cli
