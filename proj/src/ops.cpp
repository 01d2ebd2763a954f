#include "nf2/ops.hpp"

#include <stdexcept>
#include <string>

namespace nf2 {

namespace {

std::int64_t events_of(const std::vector<std::int64_t>& offsets) {
    return offsets.empty() ? 0 : static_cast<std::int64_t>(offsets.size()) - 1;
}

}  // namespace

std::vector<double> unnest(const NestedListColumn& col, std::string_view field) {
    return col.field(field);
}

std::vector<std::int64_t> count_per_event(const NestedListColumn& col) {
    std::vector<std::int64_t> counts;
    counts.reserve(static_cast<std::size_t>(col.num_events()));
    for (std::int64_t e = 0; e < col.num_events(); ++e)
        counts.push_back(col.offsets[e + 1] - col.offsets[e]);
    return counts;
}

CombinationIndices combinations(const std::vector<std::int64_t>& offsets, int k) {
    if (k != 2 && k != 3) throw std::invalid_argument("combinations: k must be 2 or 3");
    CombinationIndices out;
    out.arity = k;
    out.offsets.reserve(offsets.empty() ? 1 : offsets.size());
    out.offsets.push_back(0);
    std::int64_t tuples = 0;
    for (std::int64_t e = 0; e < events_of(offsets); ++e) {
        const std::int64_t n = offsets[e + 1] - offsets[e];
        if (k == 2) {
            for (std::int64_t i = 0; i < n; ++i)
                for (std::int64_t j = i + 1; j < n; ++j) {
                    out.indices.push_back(i);
                    out.indices.push_back(j);
                    ++tuples;
                }
        } else {
            for (std::int64_t i = 0; i < n; ++i)
                for (std::int64_t j = i + 1; j < n; ++j)
                    for (std::int64_t l = j + 1; l < n; ++l) {
                        out.indices.push_back(i);
                        out.indices.push_back(j);
                        out.indices.push_back(l);
                        ++tuples;
                    }
        }
        out.offsets.push_back(tuples);
    }
    return out;
}

CombinationIndices cross_pairs(const std::vector<std::int64_t>& a_offsets,
                               const std::vector<std::int64_t>& b_offsets) {
    if (events_of(a_offsets) != events_of(b_offsets))
        throw std::invalid_argument("cross_pairs: event dimensions disagree");
    CombinationIndices out;
    out.arity = 2;
    out.offsets.reserve(a_offsets.empty() ? 1 : a_offsets.size());
    out.offsets.push_back(0);
    std::int64_t tuples = 0;
    for (std::int64_t e = 0; e < events_of(a_offsets); ++e) {
        const std::int64_t na = a_offsets[e + 1] - a_offsets[e];
        const std::int64_t nb = b_offsets[e + 1] - b_offsets[e];
        for (std::int64_t i = 0; i < na; ++i)
            for (std::int64_t j = 0; j < nb; ++j) {
                out.indices.push_back(i);
                out.indices.push_back(j);
                ++tuples;
            }
        out.offsets.push_back(tuples);
    }
    return out;
}

std::vector<std::int64_t> argmin_per_event(const std::vector<double>& keys,
                                           const std::vector<std::int64_t>& offsets) {
    std::vector<std::int64_t> best;
    best.reserve(static_cast<std::size_t>(events_of(offsets)));
    for (std::int64_t e = 0; e < events_of(offsets); ++e) {
        std::int64_t arg = -1;
        double min_key = 0;
        for (std::int64_t i = offsets[e]; i < offsets[e + 1]; ++i) {
            const double key = keys[static_cast<std::size_t>(i)];
            if (arg < 0 || key < min_key) {
                arg = i - offsets[e];
                min_key = key;
            }
        }
        best.push_back(arg);
    }
    return best;
}

std::vector<double> sum_per_event(const std::vector<double>& values,
                                  const std::vector<std::int64_t>& offsets) {
    std::vector<double> sums;
    sums.reserve(static_cast<std::size_t>(events_of(offsets)));
    for (std::int64_t e = 0; e < events_of(offsets); ++e) {
        double sum = 0.0;
        for (std::int64_t i = offsets[e]; i < offsets[e + 1]; ++i)
            sum += values[static_cast<std::size_t>(i)];
        sums.push_back(sum);
    }
    return sums;
}

std::vector<std::optional<double>> max_per_group(const std::vector<double>& values,
                                                 const std::vector<std::int64_t>& offsets) {
    std::vector<std::optional<double>> maxima;
    maxima.reserve(static_cast<std::size_t>(events_of(offsets)));
    for (std::int64_t e = 0; e < events_of(offsets); ++e) {
        std::optional<double> max;
        for (std::int64_t i = offsets[e]; i < offsets[e + 1]; ++i) {
            const double v = values[static_cast<std::size_t>(i)];
            if (!max || v > *max) max = v;
        }
        maxima.push_back(max);
    }
    return maxima;
}

ColumnarRowGroup select_events(const ColumnarRowGroup& rg, const std::vector<std::uint8_t>& mask) {
    if (static_cast<std::int64_t>(mask.size()) != rg.num_events)
        throw std::invalid_argument("select_events: mask length != num_events");
    ColumnarRowGroup out;
    for (std::uint8_t m : mask) out.num_events += m ? 1 : 0;

    const auto select_scalar = [&](const auto& src, auto& dst) {
        if (!src) return;
        dst.emplace();
        dst->reserve(static_cast<std::size_t>(out.num_events));
        for (std::size_t e = 0; e < mask.size(); ++e)
            if (mask[e]) dst->push_back((*src)[e]);
    };
    select_scalar(rg.event_id, out.event_id);
    select_scalar(rg.run, out.run);
    select_scalar(rg.met_pt, out.met_pt);
    select_scalar(rg.met_phi, out.met_phi);
    select_scalar(rg.met_sumet, out.met_sumet);

    const auto select_nested = [&](const NestedListColumn& src, NestedListColumn& dst) {
        if (!src.has_offsets()) return;
        dst.offsets.reserve(static_cast<std::size_t>(out.num_events) + 1);
        dst.offsets.push_back(0);
        std::int64_t kept = 0;
        for (std::size_t e = 0; e < mask.size(); ++e) {
            if (!mask[e]) continue;
            kept += src.offsets[e + 1] - src.offsets[e];
            dst.offsets.push_back(kept);
        }
        for (const auto& [name, values] : src.fields) {
            auto& field = dst.fields[name];
            field.reserve(static_cast<std::size_t>(kept));
            for (std::size_t e = 0; e < mask.size(); ++e) {
                if (!mask[e]) continue;
                for (std::int64_t i = src.offsets[e]; i < src.offsets[e + 1]; ++i)
                    field.push_back(values[static_cast<std::size_t>(i)]);
            }
        }
    };
    select_nested(rg.jets, out.jets);
    select_nested(rg.muons, out.muons);
    select_nested(rg.electrons, out.electrons);
    return out;
}

NestedListColumn concat_nested(const NestedListColumn& a, const NestedListColumn& b,
                               std::string_view tag_field, double tag_a, double tag_b) {
    if (a.num_events() != b.num_events())
        throw std::invalid_argument("concat_nested: event dimensions disagree");
    NestedListColumn out;
    const std::int64_t num_events = a.num_events();
    out.offsets.reserve(static_cast<std::size_t>(num_events) + 1);
    out.offsets.push_back(0);
    for (std::int64_t e = 0; e < num_events; ++e) {
        const std::int64_t na = a.offsets[e + 1] - a.offsets[e];
        const std::int64_t nb = b.offsets[e + 1] - b.offsets[e];
        out.offsets.push_back(out.offsets.back() + na + nb);
    }

    const auto total = static_cast<std::size_t>(out.offsets.back());
    for (const auto& [name, a_values] : a.fields) {
        if (!b.has_field(name)) continue;
        const auto& b_values = b.field(name);
        auto& dst = out.fields[name];
        dst.reserve(total);
        for (std::int64_t e = 0; e < num_events; ++e) {
            for (std::int64_t i = a.offsets[e]; i < a.offsets[e + 1]; ++i)
                dst.push_back(a_values[static_cast<std::size_t>(i)]);
            for (std::int64_t i = b.offsets[e]; i < b.offsets[e + 1]; ++i)
                dst.push_back(b_values[static_cast<std::size_t>(i)]);
        }
    }

    auto& tags = out.fields[std::string(tag_field)];
    tags.reserve(total);
    for (std::int64_t e = 0; e < num_events; ++e) {
        for (std::int64_t i = a.offsets[e]; i < a.offsets[e + 1]; ++i) tags.push_back(tag_a);
        for (std::int64_t i = b.offsets[e]; i < b.offsets[e + 1]; ++i) tags.push_back(tag_b);
    }
    return out;
}

}  // namespace nf2
