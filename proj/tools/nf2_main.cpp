#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "nf2/datagen.hpp"
#include "nf2/dataset_file.hpp"
#include "nf2/engine.hpp"
#include "nf2/errors.hpp"
#include "nf2/histogram.hpp"
#include "nf2/oracle.hpp"
#include "nf2/queries.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitOracleMismatch = 3;

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw nf2::FileFormatError("cannot write '" + path + "'");
}

/// hist.csv -> hist.q6a.csv / hist.q6b.csv
std::string sink_path(const std::string& base, const char* tag) {
    const auto dot = base.find_last_of('.');
    const auto slash = base.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return base + "." + tag;
    return base.substr(0, dot) + "." + tag + base.substr(dot);
}

void print_metrics(const nf2::RunMetrics& m, const nf2::QueryResult& r, nf2::QueryId q) {
    std::cerr << "query=" << nf2::query_name(q) << " events=" << m.events
              << " selected=" << r.selected_events << " ops=" << r.total_ops
              << " wall_s=" << nf2::format_double(m.wall_s)
              << " cpu_s=" << nf2::format_double(m.cpu_s) << " bytes_scanned=" << m.bytes_scanned
              << " events_per_s=" << nf2::format_double(m.events_per_s)
              << " threads_used=" << m.threads_used << '\n';
}

int cmd_gen(const nf2::GenConfig& cfg, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw nf2::FileFormatError("cannot open '" + out_path + "' for writing");
    const std::int64_t n = nf2::generate_jsonl(cfg, out);
    out.flush();
    if (!out) throw nf2::FileFormatError("write to '" + out_path + "' failed");
    std::cout << n << " events\n";
    return kExitOk;
}

int cmd_ingest(const std::string& in, const std::string& out, std::int64_t row_group_size) {
    const std::int64_t groups = nf2::ingest_jsonl(in, out, row_group_size);
    std::cout << groups << " row groups\n";
    return kExitOk;
}

int cmd_run(const std::string& query_arg, const std::string& input, int threads,
            std::optional<double> lo, std::optional<double> hi, std::optional<int> bins,
            bool with_oracle, const std::string& out_path) {
    const auto query = nf2::parse_query_id(query_arg);
    if (!query) {
        std::cerr << "unknown query id '" << query_arg << "'\n";
        return kExitUsage;
    }
    const bool both_sinks = query_arg == "q6";

    nf2::RunConfig cfg;
    cfg.query = *query;
    cfg.dataset_path = input;
    cfg.threads = threads;
    if (lo || hi || bins) {
        nf2::HistogramSpec spec = nf2::default_spec(*query);
        if (lo) spec.lo = *lo;
        if (hi) spec.hi = *hi;
        if (bins) spec.nbins = *bins;
        if (!(spec.lo < spec.hi) || spec.nbins < 1) {
            std::cerr << "invalid histogram spec: need lo < hi and bins >= 1\n";
            return kExitUsage;
        }
        cfg.spec_override = spec;
    }

    auto [result, metrics] = nf2::run_parallel(cfg);

    if (with_oracle) {
        std::vector<nf2::Event> events;
        nf2::DatasetReader reader(input);
        for (std::int64_t g = 0; g < reader.num_row_groups(); ++g) {
            auto read = reader.read_row_group(g, nf2::Projection::all());
            for (auto& e : nf2::row_group_to_events(read.rg)) events.push_back(std::move(e));
        }
        const nf2::HistogramSpec primary_spec =
            cfg.spec_override.value_or(nf2::default_spec(*query));
        const auto expected = nf2::oracle_run(*query, events, primary_spec, std::nullopt);
        const bool primary_ok = expected.primary == result.primary;
        const bool secondary_ok =
            expected.secondary.has_value() == result.secondary.has_value() &&
            (!expected.secondary || *expected.secondary == *result.secondary);
        const bool selected_ok = expected.selected_events == result.selected_events;
        if (!primary_ok || !secondary_ok || !selected_ok) {
            std::cerr << "oracle mismatch for " << nf2::query_name(*query)
                      << (primary_ok ? "" : " [histogram]")
                      << (secondary_ok ? "" : " [secondary histogram]")
                      << (selected_ok ? "" : " [selected-event count]") << '\n';
            return kExitOracleMismatch;
        }
        std::cerr << "oracle match: " << nf2::query_name(*query)
                  << " selected=" << result.selected_events << '\n';
    }

    if (both_sinks) {
        if (out_path.empty()) {
            std::cout << "# q6a\n" << nf2::to_csv(result.primary) << "\n# q6b\n"
                      << nf2::to_csv(*result.secondary);
        } else {
            write_text_file(sink_path(out_path, "q6a"), nf2::to_csv(result.primary));
            write_text_file(sink_path(out_path, "q6b"), nf2::to_csv(*result.secondary));
        }
    } else if (out_path.empty()) {
        std::cout << nf2::to_csv(result.primary);
    } else {
        write_text_file(out_path, nf2::to_csv(result.primary));
    }

    print_metrics(metrics, result, *query);
    return kExitOk;
}

int cmd_bench(const std::string& queries_arg, const std::string& input, int threads, int sf_min,
              int sf_max, int repeats, const std::string& report_path) {
    nf2::BenchConfig cfg;
    if (queries_arg == "all") {
        cfg.queries.assign(nf2::all_queries().begin(), nf2::all_queries().end());
    } else {
        std::string rest = queries_arg;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string name = rest.substr(0, comma);
            rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
            const auto q = nf2::parse_query_id(name);
            if (!q) {
                std::cerr << "unknown query id '" << name << "'\n";
                return kExitUsage;
            }
            cfg.queries.push_back(*q);
        }
    }
    cfg.dataset_path = input;
    cfg.threads = threads;
    cfg.sf_min = sf_min;
    cfg.sf_max = sf_max;
    cfg.repeats = repeats;

    const fs::path scratch =
        fs::temp_directory_path() / ("nf2-bench-" + std::to_string(::getpid()));
    fs::create_directories(scratch);
    cfg.scratch_dir = scratch.string();

    std::vector<nf2::BenchRow> rows;
    try {
        rows = nf2::bench(cfg);
    } catch (...) {
        fs::remove_all(scratch);
        throw;
    }
    fs::remove_all(scratch);

    write_text_file(report_path, nf2::bench_report_csv(rows));
    std::cout << nf2::bench_median_summary(rows);
    return kExitOk;
}

int cmd_validate(const std::string& input) {
    if (const auto problem = nf2::validate_file(input)) {
        std::cerr << "invalid: " << *problem << '\n';
        return kExitData;
    }
    std::cout << "ok\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Columnar analytics engine for nested HEP event data"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate synthetic events as JSON lines");
    nf2::GenConfig gen_cfg;
    std::string gen_out;
    gen->add_option("--events", gen_cfg.num_events, "Number of events")
        ->required()
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", gen_cfg.seed, "RNG seed")->capture_default_str();
    gen->add_option("--lambda-jets", gen_cfg.lambda_jets, "Mean jet multiplicity")
        ->capture_default_str();
    gen->add_option("--lambda-muons", gen_cfg.lambda_muons, "Mean muon multiplicity")
        ->capture_default_str();
    gen->add_option("--lambda-electrons", gen_cfg.lambda_electrons, "Mean electron multiplicity")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "Output JSON-lines path")->required();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Convert JSON lines to a native dataset");
    std::string ingest_in, ingest_out;
    std::int64_t row_group_size = nf2::kDefaultRowGroupSize;
    ingest->add_option("--in", ingest_in, "Input JSON-lines path")->required();
    ingest->add_option("--out", ingest_out, "Output dataset path")->required();
    ingest->add_option("--row-group-size", row_group_size, "Events per row group")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // run
    auto* run = app.add_subcommand("run", "Run one benchmark query");
    std::string run_query, run_input, run_out;
    int run_threads = 1;
    std::optional<double> run_lo, run_hi;
    std::optional<int> run_bins;
    bool run_oracle = false;
    run->add_option("--query", run_query, "One of q1..q8, q6a, q6b (q6 writes both sinks)")
        ->required();
    run->add_option("--input", run_input, "Dataset path")->required();
    run->add_option("--threads", run_threads, "Worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_option("--lo", run_lo, "Histogram lower edge (default per query)");
    run->add_option("--hi", run_hi, "Histogram upper edge (default per query)");
    run->add_option("--bins", run_bins, "Histogram bin count (default 100)")
        ->check(CLI::PositiveNumber);
    run->add_flag("--oracle", run_oracle, "Also run the reference oracle and compare");
    run->add_option("--out", run_out, "Histogram CSV path (stdout if omitted)");

    // bench
    auto* bench = app.add_subcommand("bench", "Scale-factor sweep with a CSV report");
    std::string bench_queries = "all";
    std::string bench_input, bench_report;
    int bench_threads = 1, bench_sf_min = 0, bench_sf_max = 0, bench_repeats = 3;
    bench->add_option("--queries", bench_queries, "Comma list of query ids, or 'all'")
        ->capture_default_str();
    bench->add_option("--input", bench_input, "Dataset path (scale factor 1)")->required();
    bench->add_option("--threads", bench_threads, "Worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("--sf-min", bench_sf_min, "Smallest scale exponent (sf = 2^i)")
        ->capture_default_str()
        ->check(CLI::Range(-16, 7));
    bench->add_option("--sf-max", bench_sf_max, "Largest scale exponent")
        ->capture_default_str()
        ->check(CLI::Range(-16, 7));
    bench->add_option("--repeats", bench_repeats, "Runs per (query, sf)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("--report", bench_report, "Report CSV path")->required();

    // validate
    auto* validate = app.add_subcommand("validate", "Check a dataset file end to end");
    std::string validate_input;
    validate->add_option("--input", validate_input, "Dataset path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_cfg, gen_out);
        if (ingest->parsed()) return cmd_ingest(ingest_in, ingest_out, row_group_size);
        if (run->parsed())
            return cmd_run(run_query, run_input, run_threads, run_lo, run_hi, run_bins,
                           run_oracle, run_out);
        if (bench->parsed())
            return cmd_bench(bench_queries, bench_input, bench_threads, bench_sf_min,
                             bench_sf_max, bench_repeats, bench_report);
        if (validate->parsed()) return cmd_validate(validate_input);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
