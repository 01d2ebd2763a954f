#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "nf2/columnar.hpp"
#include "nf2/histogram.hpp"

namespace nf2 {

/// Q6a and Q6b share one pipeline (trijet selection) with two sinks.
enum class QueryId { Q1, Q2, Q3, Q4, Q5, Q6a, Q6b, Q7, Q8 };

std::span<const QueryId> all_queries();
std::string_view query_name(QueryId q);

/// Accepts q1..q8, q6a, q6b; "q6" maps to Q6a (the shared pipeline).
std::optional<QueryId> parse_query_id(std::string_view name);

/// Default histogram ranges per query; CLI flags override.
HistogramSpec default_spec(QueryId q);

/// The other Q6 sink's spec (btag for Q6a, trijet pt for Q6b); nullopt for
/// queries with a single sink.
std::optional<HistogramSpec> default_secondary_spec(QueryId q);

/// Minimal set of columns the query reads.
Projection projection_for(QueryId q);

/// Per-event counts feeding the complexity formulas. sigma_jets counts jets
/// passing the Q7 jet cut (pt > 30).
struct OpCountInputs {
    std::int64_t electrons = 0;
    std::int64_t jets = 0;
    std::int64_t muons = 0;
    std::int64_t sigma_jets = 0;
};

std::int64_t complexity_formula(QueryId q, const OpCountInputs& c);

std::vector<OpCountInputs> op_count_inputs(const ColumnarRowGroup& rg);

std::int64_t binom2(std::int64_t n);
std::int64_t binom3(std::int64_t n);

/// One query's aggregates over a batch of events. ops counts the records or
/// record combinations the query actually explored; formula_ops is the
/// closed-form complexity summed over events (the two agree for Q1-Q7; Q8's
/// published formula does not describe pair enumeration, so it is reported
/// separately and never asserted equal).
struct QueryOutput {
    Histogram primary;
    std::optional<Histogram> secondary;
    std::int64_t selected_events = 0;
    std::int64_t ops = 0;
    std::int64_t formula_ops = 0;
};

/// Runs one query over one row group with the vectorized kernels. The row
/// group must contain at least projection_for(q).
QueryOutput run_query_on_row_group(QueryId q, const ColumnarRowGroup& rg,
                                   const HistogramSpec& primary_spec,
                                   const std::optional<HistogramSpec>& secondary_spec);

/// Q4's event selection at an arbitrary jet-pt threshold (the query proper
/// uses 40); used to probe cut monotonicity.
std::int64_t q4_selected_count(const ColumnarRowGroup& rg, double pt_threshold);

}  // namespace nf2
