#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "nf2/columnar.hpp"

namespace nf2 {

/// Per-element keep flags aligned to a NestedListColumn's flat arrays.
struct NestedMask {
    std::vector<std::int64_t> offsets;  // copied from the source column
    std::vector<std::uint8_t> keep;     // one flag per flat element
};

/// Per-event index tuples into that event's particle list, stored flat:
/// tuple t occupies indices[t*arity .. t*arity+arity). Indices are local to
/// the event (always < the event's particle count). offsets counts tuples
/// per event, same shape rules as column offsets.
struct CombinationIndices {
    int arity = 0;
    std::vector<std::int64_t> offsets;
    std::vector<std::int64_t> indices;

    std::int64_t num_tuples() const { return offsets.empty() ? 0 : offsets.back(); }
};

/// Filters the elements of a nested column. The predicate sees flat element
/// indices; callers capture whichever field arrays they test. Grouping is
/// preserved: output offsets count the kept elements per event.
template <class Pred>
std::pair<NestedListColumn, NestedMask> nested_filter(const NestedListColumn& col, Pred&& pred) {
    NestedMask mask;
    mask.offsets = col.offsets;
    const auto flat = static_cast<std::size_t>(col.flat_size());
    mask.keep.resize(flat);
    for (std::size_t i = 0; i < flat; ++i) mask.keep[i] = pred(i) ? 1 : 0;

    NestedListColumn out;
    if (!col.has_offsets()) return {std::move(out), std::move(mask)};
    out.offsets.reserve(col.offsets.size());
    out.offsets.push_back(0);
    std::int64_t kept = 0;
    for (std::size_t e = 0; e + 1 < col.offsets.size(); ++e) {
        for (std::int64_t i = col.offsets[e]; i < col.offsets[e + 1]; ++i)
            kept += mask.keep[static_cast<std::size_t>(i)];
        out.offsets.push_back(kept);
    }
    for (const auto& [name, values] : col.fields) {
        auto& dst = out.fields[name];
        dst.reserve(static_cast<std::size_t>(kept));
        for (std::size_t i = 0; i < flat; ++i)
            if (mask.keep[i]) dst.push_back(values[i]);
    }
    return {std::move(out), std::move(mask)};
}

/// Concatenation of all events' values, event order then particle order.
std::vector<double> unnest(const NestedListColumn& col, std::string_view field);

std::vector<std::int64_t> count_per_event(const NestedListColumn& col);

/// All k-subsets of each event's particle indices, lexicographic, k in {2,3}.
CombinationIndices combinations(const std::vector<std::int64_t>& offsets, int k);

/// Cartesian product of two collections per event, row-major (a outer).
CombinationIndices cross_pairs(const std::vector<std::int64_t>& a_offsets,
                               const std::vector<std::int64_t>& b_offsets);

/// Per-event index of the minimal key (local to the group), ties broken by
/// the smallest index; -1 for empty groups.
std::vector<std::int64_t> argmin_per_event(const std::vector<double>& keys,
                                           const std::vector<std::int64_t>& offsets);

/// Per-event sum in ascending particle order; empty groups sum to 0.
std::vector<double> sum_per_event(const std::vector<double>& values,
                                  const std::vector<std::int64_t>& offsets);

std::vector<std::optional<double>> max_per_group(const std::vector<double>& values,
                                                 const std::vector<std::int64_t>& offsets);

/// Keeps the events with a true mask entry; every present column is filtered
/// consistently and nested offsets are rebased.
ColumnarRowGroup select_events(const ColumnarRowGroup& rg, const std::vector<std::uint8_t>& mask);

/// Per-event concatenation (a's particles then b's) of the fields the two
/// collections share, plus a constant tag field distinguishing the source.
NestedListColumn concat_nested(const NestedListColumn& a, const NestedListColumn& b,
                               std::string_view tag_field, double tag_a, double tag_b);

}  // namespace nf2
