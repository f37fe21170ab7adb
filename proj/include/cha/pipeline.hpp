#pragma once

// Sweeps over (state, r_c) cells, the solution cache, output emission and
// comparison against the golden tables in data/golden_tables.csv.

#include <array>
#include <atomic>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cha/complexity.hpp"
#include "cha/measures.hpp"
#include "cha/momentum.hpp"
#include "cha/radial.hpp"

namespace cha {

enum class OutputFormat { csv, json, plot };

OutputFormat parse_format(std::string_view text);

/// The eight supported levels, 1s..5g.
const std::vector<QuantumState>& supported_states();

struct SweepConfig {
    std::vector<QuantumState> states;
    std::vector<double> rc_values;
    double alpha = 0.6;
    double beta = 3.0;
    std::vector<double> b_values = kDefaultB;
    SolverOptions solver;
    MomentumOptions momentum;
    OutputFormat format = OutputFormat::csv;
    std::string output_path;  // empty or "-" writes to stdout
    unsigned threads = 0;     // 0 picks hardware concurrency

    // Series selected by plot-data output.
    Family plot_family = Family::ES;
    Space plot_space = Space::r;
    double plot_b = 1.0;

    /// Throws ConfigError on unsupported states, bad radii or orders.
    void validate() const;
};

struct CacheKey {
    QuantumState state;
    double r_c = 0.0;
    std::string signature;  // solver and momentum options

    std::string text() const;
    friend bool operator==(const CacheKey&, const CacheKey&) = default;
    friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

CacheKey make_key(const QuantumState& state, double r_c, const SolverOptions& solver,
                  const MomentumOptions& momentum);

struct CellSolutions {
    RadialSolution radial;
    MomentumSolution momentum;
};

/// Write-once store of solved cells, optionally persisted as JSON files.
class SolutionCache {
public:
    explicit SolutionCache(std::filesystem::path directory = {});

    std::shared_ptr<const CellSolutions> get_or_compute(const CacheKey& key,
                                                        const SolverOptions& solver,
                                                        const MomentumOptions& momentum);

    /// Number of radial+momentum solves performed (cache misses).
    long solver_invocations() const { return invocations_.load(); }
    const std::filesystem::path& directory() const { return directory_; }

private:
    using Payload = std::shared_ptr<const CellSolutions>;

    Payload load(const CacheKey& key) const;
    void store(const CacheKey& key, const CellSolutions& cell) const;
    std::filesystem::path file_for(const CacheKey& key) const;

    std::filesystem::path directory_;
    std::mutex mutex_;
    std::map<CacheKey, std::shared_future<Payload>> entries_;
    std::atomic<long> invocations_{0};
};

std::string serialize_cell(const CacheKey& key, const CellSolutions& cell);
/// Throws IoError if `text` is not a well-formed payload for `key`.
CellSolutions deserialize_cell(const CacheKey& key, const std::string& text);

struct CellRecord {
    QuantumState state;
    double r_c = 0.0;
    std::optional<MeasureSet> measures;
    std::optional<ComplexityReport> report;
    std::string error;

    bool ok() const { return error.empty(); }
};

/// One record per (state, r_c) in configuration order. Cell failures are
/// recorded in CellRecord::error and leave other cells untouched.
std::vector<CellRecord> run_sweep(const SweepConfig& cfg, SolutionCache& cache);

struct OutputRow {
    std::string state;
    double r_c = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double b = 0.0;
    std::string family;
    std::string space;
    double value = 0.0;

    friend bool operator==(const OutputRow&, const OutputRow&) = default;
};

inline constexpr const char* kCsvHeader = "state,r_c,alpha,beta,b,family,space,value";

/// Successful records flattened to rows, values rounded to 9 significant digits.
std::vector<OutputRow> flatten(const std::vector<CellRecord>& records);

std::string format_csv(const std::vector<OutputRow>& rows);
std::string format_json(const std::vector<OutputRow>& rows);
std::vector<OutputRow> parse_json(const std::string& text);
/// gnuplot blocks, one per state: "# <state>" then "r_c value" lines.
std::string format_plot_data(const std::vector<CellRecord>& records, Family family, Space space,
                             double b);

/// Render records in `format` and write them to `path` (stdout for "" or "-").
void emit_output(const std::vector<CellRecord>& records, const SweepConfig& cfg);

// ---- golden tables -------------------------------------------------------

struct GoldenRow {
    std::string table;
    QuantumState state;
    double r_c = 0.0;
    std::array<double, 3> values{};
};

std::filesystem::path default_golden_path();
std::vector<GoldenRow> load_golden(const std::filesystem::path& path);

struct TableSpec {
    Family family;
    double b;
    double tolerance;  // relative
};

/// "I", "II", "III", "IV" and the footnoted reference rows "III_ref".
TableSpec table_spec(std::string_view which);

struct TableRowResult {
    QuantumState state;
    double r_c = 0.0;
    std::array<double, 3> expected{};
    std::array<double, 3> computed{};
    std::array<double, 3> deviation{};  // relative
    std::string error;

    bool passed(double tolerance) const;
};

struct TableComparison {
    std::string table;
    double tolerance = 0.0;
    std::vector<TableRowResult> rows;

    bool passed() const;
    double worst_deviation() const;
    std::string format() const;
};

TableComparison reproduce_table(std::string_view which, const std::vector<GoldenRow>& golden,
                                SolutionCache& cache, unsigned threads = 0,
                                const SolverOptions& solver = {},
                                const MomentumOptions& momentum = {});

}  // namespace cha
