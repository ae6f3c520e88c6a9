#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eklab::experiments {

enum class ExperimentKind {
    ek_single,
    ek_joint,
    moments,
    quantitative,
    kubilius,
    adversary,
    relations,
    coprimality,
};

ExperimentKind experiment_from_name(std::string_view name);
std::string_view experiment_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::coprimality;
    std::uint64_t N = 16;
    std::vector<std::string> alphas; // slope spec strings
    std::vector<std::string> betas;  // shifts, parallel to alphas; missing entries read as 0
    // schedule-style overrides; meaning is per experiment (see the CLI help):
    // R = model prime cutoff, J = relation height bound, L = moment cap /
    // adversary level count, eps = relation tolerance
    std::optional<std::uint64_t> R;
    std::optional<std::uint64_t> J;
    std::optional<std::uint64_t> L;
    std::optional<std::string> epsilon; // exact rational text, e.g. "1/8"
    unsigned degree = 2;                // adversary polynomial degree
    std::uint64_t seed = 0;
    std::string out;       // export base path; empty = caller prints tables itself
    std::string format = "csv"; // csv | json
    std::string cache_dir; // sieve cache directory; empty = no cache
};

// One value of a typed column.  Reals export with 12 significant digits in
// CSV and bit-exactly in JSON; text carries exact rationals and big integers.
struct Cell {
    enum class Kind { real, integer, text };
    Kind kind = Kind::real;
    double real = 0;
    long long integer = 0;
    std::string text;

    static Cell of(double v) { return {Kind::real, v, 0, {}}; }
    static Cell of_int(long long v) { return {Kind::integer, 0, v, {}}; }
    static Cell of_text(std::string v) { return {Kind::text, 0, 0, std::move(v)}; }
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, std::string>> diagnostics;
    double wall_seconds = 0; // stderr material; never part of the export
};

// Deterministic under (config, seed), including under any EKLAB_THREADS.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV writes one file per table at <out>_<table>.csv; JSON writes a single
// <out>.json holding config, tables, and diagnostics.  Returns written paths.
std::vector<std::filesystem::path> export_results(const ExperimentResult& result);

// Parse a JSON export back; reals reproduce bit-exactly.
ExperimentResult import_results(const std::filesystem::path& file);

// CSV text of one table: header row, then rows, '\n' line ends.
std::string table_csv(const Table& table);

} // namespace eklab::experiments
