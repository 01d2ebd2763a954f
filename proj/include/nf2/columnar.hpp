#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nf2/errors.hpp"
#include "nf2/model.hpp"

namespace nf2 {

/// One variable-length particle collection, decomposed into a shared offsets
/// array plus one flat value array per field. Event i's particles occupy flat
/// indices [offsets[i], offsets[i+1]).
///
/// offsets is empty when the collection was not projected; a present offsets
/// array has num_events + 1 entries with offsets[0] == 0.
struct NestedListColumn {
    std::vector<std::int64_t> offsets;
    std::map<std::string, std::vector<double>, std::less<>> fields;

    bool has_offsets() const { return !offsets.empty(); }
    bool has_field(std::string_view name) const { return fields.find(name) != fields.end(); }

    std::int64_t num_events() const {
        return has_offsets() ? static_cast<std::int64_t>(offsets.size()) - 1 : 0;
    }
    std::int64_t flat_size() const { return has_offsets() ? offsets.back() : 0; }

    const std::vector<double>& field(std::string_view name) const {
        auto it = fields.find(name);
        if (it == fields.end())
            throw UnknownColumnError("column field '" + std::string(name) + "' not present");
        return it->second;
    }
};

/// A horizontal partition of the dataset in columnar form. Scalar columns and
/// collections are present only if projected; absent optionals throw on access.
struct ColumnarRowGroup {
    std::int64_t num_events = 0;
    std::optional<std::vector<std::int64_t>> event_id;
    std::optional<std::vector<std::int64_t>> run;
    std::optional<std::vector<double>> met_pt;
    std::optional<std::vector<double>> met_phi;
    std::optional<std::vector<double>> met_sumet;
    NestedListColumn jets;
    NestedListColumn muons;
    NestedListColumn electrons;

    const std::vector<double>& met_pt_col() const { return require(met_pt, "met.pt"); }
    const std::vector<double>& met_phi_col() const { return require(met_phi, "met.phi"); }
    const std::vector<double>& met_sumet_col() const { return require(met_sumet, "met.sumet"); }
    const std::vector<std::int64_t>& event_id_col() const { return require(event_id, "event_id"); }
    const std::vector<std::int64_t>& run_col() const { return require(run, "run"); }

private:
    template <class T>
    static const T& require(const std::optional<T>& opt, const char* path) {
        if (!opt) throw UnknownColumnError(std::string("column '") + path + "' not projected");
        return *opt;
    }
};

/// Set of column paths to decode. Particle fields use dotted paths
/// ("jets.pt"); "jets.*" expands to every field of the collection; projecting
/// any field of a collection implies its offsets array.
class Projection {
public:
    static Projection all();
    static Projection of(std::initializer_list<std::string_view> paths);

    void add(std::string_view path);  // throws UnknownColumnError on bad path
    bool contains(std::string_view path) const { return paths_.find(path) != paths_.end(); }
    const std::set<std::string, std::less<>>& paths() const { return paths_; }
    bool is_subset_of(const Projection& other) const;

private:
    std::set<std::string, std::less<>> paths_;
};

/// All 23 storable column paths in on-disk order.
std::span<const std::string_view> column_catalog();

ColumnarRowGroup events_to_row_group(std::span<const Event> events);

/// Inverse of events_to_row_group; requires a full projection.
std::vector<Event> row_group_to_events(const ColumnarRowGroup& rg);

/// Prefix of the first n events, nested offsets rebased. n <= num_events.
ColumnarRowGroup slice_row_group_prefix(const ColumnarRowGroup& rg, std::int64_t n);

/// Checks the structural invariants every row group must satisfy: offsets
/// start at 0 and are non-decreasing, flat arrays agree with offsets.back(),
/// scalar columns have num_events entries. Returns a description of the first
/// violation, or nullopt.
std::optional<std::string> check_row_group(const ColumnarRowGroup& rg);

}  // namespace nf2
