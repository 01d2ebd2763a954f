#pragma once

#include <span>

#include "nf2/model.hpp"
#include "nf2/queries.hpp"

namespace nf2 {

/// Brute-force reference evaluation: plain per-event loops over Event
/// values, sharing only the physics helpers (and the histogram sink) with
/// the vectorized engine. Iteration and tie-break orders follow the query
/// contracts, so results must match the engine bin-for-bin.
QueryOutput oracle_run(QueryId q, std::span<const Event> events,
                       const HistogramSpec& primary_spec,
                       const std::optional<HistogramSpec>& secondary_spec = std::nullopt);

}  // namespace nf2
