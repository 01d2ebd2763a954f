#include "nf2/engine.hpp"

#include <atomic>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nf2/dataset_file.hpp"

namespace nf2 {

namespace {

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

std::string format_sf(int exponent) { return format_double(std::ldexp(1.0, exponent)); }

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::pair<QueryResult, RunMetrics> run_parallel(const RunConfig& cfg) {
    if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
    DatasetReader reader(cfg.dataset_path);
    const std::int64_t groups = reader.num_row_groups();

    const HistogramSpec primary_spec = cfg.spec_override.value_or(default_spec(cfg.query));
    const bool has_secondary = default_secondary_spec(cfg.query).has_value();
    std::optional<HistogramSpec> resolved_secondary;
    if (has_secondary)
        resolved_secondary =
            cfg.secondary_spec_override.value_or(*default_secondary_spec(cfg.query));
    const Projection projection =
        cfg.full_projection ? Projection::all() : projection_for(cfg.query);

    const auto wall_start = std::chrono::steady_clock::now();
    const int workers = static_cast<int>(std::min<std::int64_t>(cfg.threads, groups));

    std::vector<std::optional<RowGroupPartial>> slots(static_cast<std::size_t>(groups));
    std::vector<double> worker_cpu(static_cast<std::size_t>(std::max(workers, 0)), 0.0);
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&](int w) {
        const double cpu_start = thread_cpu_seconds();
        while (!failed.load(std::memory_order_relaxed)) {
            const std::int64_t g = next.fetch_add(1, std::memory_order_relaxed);
            if (g >= groups) break;
            try {
                auto read = reader.read_row_group(g, projection);
                RowGroupPartial partial{
                    g, read.rg.num_events, read.bytes_read,
                    run_query_on_row_group(cfg.query, read.rg, primary_spec,
                                           cfg.secondary_spec_override)};
                slots[static_cast<std::size_t>(g)] = std::move(partial);
            } catch (const std::exception& ex) {
                std::lock_guard lock(error_mutex);
                if (!first_error)
                    first_error = std::make_exception_ptr(
                        std::runtime_error("'" + cfg.dataset_path + "' row group " +
                                           std::to_string(g) + ": " + ex.what()));
                failed.store(true);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
        worker_cpu[static_cast<std::size_t>(w)] = thread_cpu_seconds() - cpu_start;
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(std::max(workers, 0)));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    QueryResult result{Histogram(primary_spec)};
    if (resolved_secondary) result.secondary.emplace(*resolved_secondary);
    result.partials.reserve(static_cast<std::size_t>(groups));

    RunMetrics metrics;
    for (std::int64_t g = 0; g < groups; ++g) {
        RowGroupPartial& partial = *slots[static_cast<std::size_t>(g)];
        result.primary.merge(partial.output.primary);
        if (result.secondary && partial.output.secondary)
            result.secondary->merge(*partial.output.secondary);
        result.selected_events += partial.output.selected_events;
        result.total_ops += partial.output.ops;
        result.total_formula_ops += partial.output.formula_ops;
        metrics.bytes_scanned += partial.bytes_read;
        result.partials.push_back(std::move(partial));
    }

    const auto wall_end = std::chrono::steady_clock::now();
    metrics.wall_s = std::chrono::duration<double>(wall_end - wall_start).count();
    for (double c : worker_cpu) metrics.cpu_s += c;
    metrics.events = reader.total_events();
    metrics.threads_used = workers;
    if (metrics.wall_s > 0.0) {
        metrics.events_per_s = static_cast<double>(metrics.events) / metrics.wall_s;
        if (workers > 0)
            metrics.bytes_per_s_per_worker =
                static_cast<double>(metrics.bytes_scanned) / metrics.wall_s / workers;
    }
    return {std::move(result), metrics};
}

std::vector<BenchRow> bench(const BenchConfig& cfg) {
    if (cfg.sf_min > cfg.sf_max) throw std::invalid_argument("sf_min must be <= sf_max");
    if (cfg.sf_min < -16 || cfg.sf_max > 7)
        throw std::invalid_argument("scale exponents must be in [-16, 7]");
    if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");

    std::vector<BenchRow> rows;
    for (int i = cfg.sf_min; i <= cfg.sf_max; ++i) {
        std::string path = cfg.dataset_path;
        std::string scaled;
        if (i != 0) {
            scaled = cfg.scratch_dir + "/bench_sf_" + std::to_string(i) + ".nf2";
            replicate_scale(cfg.dataset_path, scaled, i);
            path = scaled;
        }
        for (QueryId q : cfg.queries) {
            for (int r = 1; r <= cfg.repeats; ++r) {
                RunConfig run_cfg;
                run_cfg.query = q;
                run_cfg.dataset_path = path;
                run_cfg.threads = cfg.threads;
                const auto [result, metrics] = run_parallel(run_cfg);
                rows.push_back({q, i, cfg.threads, r, metrics.wall_s, metrics.cpu_s,
                                metrics.bytes_scanned, metrics.events, metrics.events_per_s});
            }
        }
        if (!scaled.empty()) std::remove(scaled.c_str());
    }
    return rows;
}

std::string bench_report_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "query,sf,threads,repeat,wall_s,cpu_s,bytes_scanned,events,events_per_s\n";
    for (const BenchRow& row : rows) {
        out << query_name(row.query) << ',' << format_sf(row.sf_exponent) << ',' << row.threads
            << ',' << row.repeat << ',' << format_double(row.wall_s) << ','
            << format_double(row.cpu_s) << ',' << row.bytes_scanned << ',' << row.events << ','
            << format_double(row.events_per_s) << '\n';
    }
    return out.str();
}

std::string bench_median_summary(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        std::vector<double> wall, cpu, eps;
        while (j < rows.size() && rows[j].query == rows[i].query &&
               rows[j].sf_exponent == rows[i].sf_exponent) {
            wall.push_back(rows[j].wall_s);
            cpu.push_back(rows[j].cpu_s);
            eps.push_back(rows[j].events_per_s);
            ++j;
        }
        out << query_name(rows[i].query) << " sf=" << format_sf(rows[i].sf_exponent)
            << " threads=" << rows[i].threads << " repeats=" << (j - i)
            << " median_wall_s=" << format_double(median(wall))
            << " median_cpu_s=" << format_double(median(cpu))
            << " bytes_scanned=" << rows[i].bytes_scanned << " events=" << rows[i].events
            << " median_events_per_s=" << format_double(median(eps)) << '\n';
        i = j;
    }
    return out.str();
}

}  // namespace nf2
