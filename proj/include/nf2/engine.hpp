#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nf2/histogram.hpp"
#include "nf2/queries.hpp"

namespace nf2 {

struct RunConfig {
    QueryId query = QueryId::Q1;
    std::string dataset_path;
    int threads = 1;
    std::optional<HistogramSpec> spec_override;            // primary sink
    std::optional<HistogramSpec> secondary_spec_override;  // q6's other sink
    bool full_projection = false;  // read every column instead of the query's minimal set
};

struct RowGroupPartial {
    std::int64_t index = 0;
    std::int64_t events = 0;
    std::uint64_t bytes_read = 0;
    QueryOutput output;
};

struct QueryResult {
    Histogram primary;
    std::optional<Histogram> secondary;
    std::int64_t selected_events = 0;
    std::int64_t total_ops = 0;
    std::int64_t total_formula_ops = 0;
    std::vector<RowGroupPartial> partials;  // ascending row-group index
};

struct RunMetrics {
    double wall_s = 0.0;
    double cpu_s = 0.0;  // sum of per-worker thread CPU time
    std::uint64_t bytes_scanned = 0;
    std::int64_t events = 0;
    double events_per_s = 0.0;
    double bytes_per_s_per_worker = 0.0;
    int threads_used = 0;
};

/// Scans the dataset's row groups with min(threads, row groups) workers
/// pulling from a shared queue, runs the query per group, and merges the
/// per-group partials in ascending index order. The histogram result is
/// independent of thread count and scheduling.
std::pair<QueryResult, RunMetrics> run_parallel(const RunConfig& cfg);

struct BenchConfig {
    std::vector<QueryId> queries;
    std::string dataset_path;
    std::string scratch_dir;  // scaled dataset copies are staged here
    int threads = 1;
    int sf_min = 0;  // scale exponents: sf = 2^i, i in [sf_min, sf_max]
    int sf_max = 0;
    int repeats = 3;
};

struct BenchRow {
    QueryId query = QueryId::Q1;
    int sf_exponent = 0;
    int threads = 1;
    int repeat = 1;
    double wall_s = 0.0;
    double cpu_s = 0.0;
    std::uint64_t bytes_scanned = 0;
    std::int64_t events = 0;
    double events_per_s = 0.0;
};

/// Sweeps sf = 2^i over [sf_min, sf_max] for every configured query,
/// repeating each run. One row per repeat, queries in config order,
/// exponents ascending.
std::vector<BenchRow> bench(const BenchConfig& cfg);

std::string bench_report_csv(const std::vector<BenchRow>& rows);

/// Per (query, sf) medians over repeats, one line each.
std::string bench_median_summary(const std::vector<BenchRow>& rows);

}  // namespace nf2
