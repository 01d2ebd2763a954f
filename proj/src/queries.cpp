#include "nf2/queries.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "nf2/ops.hpp"
#include "nf2/physics.hpp"

namespace nf2 {

namespace {

constexpr double kTopMass = 172.5;
constexpr double kZMass = 91.2;
constexpr double kQ7JetPtCut = 30.0;
constexpr double kQ7LeptonPtCut = 10.0;
constexpr double kQ7IsolationDeltaR = 0.4;

constexpr std::array<QueryId, 9> kAllQueries = {QueryId::Q1,  QueryId::Q2,  QueryId::Q3,
                                                QueryId::Q4,  QueryId::Q5,  QueryId::Q6a,
                                                QueryId::Q6b, QueryId::Q7,  QueryId::Q8};

FourVector particle_at(const NestedListColumn& col, std::int64_t flat) {
    const auto i = static_cast<std::size_t>(flat);
    return {col.field("pt")[i], col.field("eta")[i], col.field("phi")[i], col.field("mass")[i]};
}

void fill_all(Histogram& h, const std::vector<double>& values) {
    for (double v : values) h.fill(v);
}

/// Maps each flat element index of a nested column to its event index.
std::vector<std::int64_t> event_of_flat(const std::vector<std::int64_t>& offsets) {
    std::vector<std::int64_t> event;
    if (offsets.empty()) return event;
    event.resize(static_cast<std::size_t>(offsets.back()));
    for (std::size_t e = 0; e + 1 < offsets.size(); ++e)
        for (std::int64_t i = offsets[e]; i < offsets[e + 1]; ++i)
            event[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(e);
    return event;
}

QueryOutput q1(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    fill_all(out.primary, rg.met_pt_col());
    out.selected_events = rg.num_events;
    out.ops = rg.num_events;
    out.formula_ops = rg.num_events;
    return out;
}

QueryOutput q2(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    fill_all(out.primary, unnest(rg.jets, "pt"));
    for (std::int64_t n : count_per_event(rg.jets))
        if (n > 0) ++out.selected_events;
    out.ops = rg.jets.flat_size();
    out.formula_ops = out.ops;
    return out;
}

QueryOutput q3(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    const auto& eta = rg.jets.field("eta");
    auto [kept, mask] = nested_filter(
        rg.jets, [&](std::size_t i) { return std::fabs(eta[i]) < 1.0; });
    fill_all(out.primary, unnest(kept, "pt"));
    for (std::int64_t n : count_per_event(kept))
        if (n > 0) ++out.selected_events;
    out.ops = rg.jets.flat_size();
    out.formula_ops = out.ops;
    return out;
}

QueryOutput q4(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    const auto& pt = rg.jets.field("pt");
    auto [kept, mask] = nested_filter(rg.jets, [&](std::size_t i) { return pt[i] > 40.0; });
    const auto counts = count_per_event(kept);
    std::vector<std::uint8_t> event_mask(counts.size());
    for (std::size_t e = 0; e < counts.size(); ++e) event_mask[e] = counts[e] >= 2 ? 1 : 0;
    const auto selected = select_events(rg, event_mask);
    fill_all(out.primary, selected.met_pt_col());
    out.selected_events = selected.num_events;
    out.ops = rg.num_events + rg.jets.flat_size();
    out.formula_ops = out.ops;
    return out;
}

QueryOutput q5(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    const auto pairs = combinations(rg.muons.offsets, 2);
    const auto& charge = rg.muons.field("charge");

    std::vector<std::uint8_t> event_mask(static_cast<std::size_t>(rg.num_events), 0);
    for (std::int64_t e = 0; e < rg.num_events; ++e) {
        const std::int64_t base = rg.muons.offsets[e];
        for (std::int64_t t = pairs.offsets[e]; t < pairs.offsets[e + 1]; ++t) {
            const std::int64_t i = base + pairs.indices[static_cast<std::size_t>(2 * t)];
            const std::int64_t j = base + pairs.indices[static_cast<std::size_t>(2 * t + 1)];
            if (charge[static_cast<std::size_t>(i)] * charge[static_cast<std::size_t>(j)] != -1.0)
                continue;
            const double m = invariant_mass(particle_at(rg.muons, i), particle_at(rg.muons, j));
            if (m > 60.0 && m < 120.0) {
                event_mask[static_cast<std::size_t>(e)] = 1;
                break;
            }
        }
    }
    const auto selected = select_events(rg, event_mask);
    fill_all(out.primary, selected.met_pt_col());
    out.selected_events = selected.num_events;
    out.ops = rg.num_events + pairs.num_tuples();
    out.formula_ops = out.ops;
    return out;
}

QueryOutput q6(QueryId q, const ColumnarRowGroup& rg, const HistogramSpec& primary_spec,
               const std::optional<HistogramSpec>& secondary_spec) {
    const HistogramSpec pt_spec = q == QueryId::Q6a
                                      ? primary_spec
                                      : secondary_spec.value_or(default_spec(QueryId::Q6a));
    const HistogramSpec btag_spec = q == QueryId::Q6b
                                        ? primary_spec
                                        : secondary_spec.value_or(default_spec(QueryId::Q6b));
    Histogram pt_hist(pt_spec);
    Histogram btag_hist(btag_spec);

    const auto triples = combinations(rg.jets.offsets, 3);
    const auto& btag = rg.jets.field("btag");

    // per-triple summed four-vector pt, closeness key, and btag maximum
    std::vector<double> trijet_pt(static_cast<std::size_t>(triples.num_tuples()));
    std::vector<double> key(trijet_pt.size());
    std::vector<double> btag_max(trijet_pt.size());
    for (std::int64_t e = 0; e < rg.num_events; ++e) {
        const std::int64_t base = rg.jets.offsets[e];
        for (std::int64_t t = triples.offsets[e]; t < triples.offsets[e + 1]; ++t) {
            const std::int64_t a = base + triples.indices[static_cast<std::size_t>(3 * t)];
            const std::int64_t b = base + triples.indices[static_cast<std::size_t>(3 * t + 1)];
            const std::int64_t c = base + triples.indices[static_cast<std::size_t>(3 * t + 2)];
            const std::array<FourVector, 3> lorentz = {particle_at(rg.jets, a),
                                                       particle_at(rg.jets, b),
                                                       particle_at(rg.jets, c)};
            const FourVector sum = sum_four_vectors(lorentz);
            const auto u = static_cast<std::size_t>(t);
            trijet_pt[u] = sum.pt;
            key[u] = std::fabs(sum.mass - kTopMass);
            double best_btag = btag[static_cast<std::size_t>(a)];
            if (btag[static_cast<std::size_t>(b)] > best_btag)
                best_btag = btag[static_cast<std::size_t>(b)];
            if (btag[static_cast<std::size_t>(c)] > best_btag)
                best_btag = btag[static_cast<std::size_t>(c)];
            btag_max[u] = best_btag;
        }
    }

    std::int64_t selected = 0;
    const auto best = argmin_per_event(key, triples.offsets);
    for (std::int64_t e = 0; e < rg.num_events; ++e) {
        if (best[static_cast<std::size_t>(e)] < 0) continue;
        const auto t = static_cast<std::size_t>(triples.offsets[e] + best[static_cast<std::size_t>(e)]);
        pt_hist.fill(trijet_pt[t]);
        btag_hist.fill(btag_max[t]);
        ++selected;
    }

    QueryOutput out{q == QueryId::Q6a ? std::move(pt_hist) : std::move(btag_hist)};
    out.secondary = q == QueryId::Q6a ? std::move(btag_hist) : std::move(pt_hist);
    out.selected_events = selected;
    out.ops = rg.num_events + triples.num_tuples();
    out.formula_ops = out.ops;
    return out;
}

QueryOutput q7(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    const auto& jet_pt = rg.jets.field("pt");
    auto [jets30, jmask] =
        nested_filter(rg.jets, [&](std::size_t i) { return jet_pt[i] > kQ7JetPtCut; });

    const auto leptons = concat_nested(rg.electrons, rg.muons, "flavor", 0.0, 1.0);
    const auto& lep_pt = leptons.field("pt");
    auto [leptons10, lmask] =
        nested_filter(leptons, [&](std::size_t i) { return lep_pt[i] > kQ7LeptonPtCut; });

    const auto& jeta = jets30.field("eta");
    const auto& jphi = jets30.field("phi");
    const auto& leta = leptons10.field("eta");
    const auto& lphi = leptons10.field("phi");
    const auto jet_event = event_of_flat(jets30.offsets);
    auto [isolated, imask] = nested_filter(jets30, [&](std::size_t i) {
        const std::int64_t e = jet_event[i];
        for (std::int64_t l = leptons10.offsets[e]; l < leptons10.offsets[e + 1]; ++l) {
            const auto u = static_cast<std::size_t>(l);
            if (delta_r(jeta[i], jphi[i], leta[u], lphi[u]) < kQ7IsolationDeltaR) return false;
        }
        return true;
    });

    for (double sum : sum_per_event(isolated.field("pt"), isolated.offsets))
        out.primary.fill(sum);
    for (std::int64_t n : count_per_event(isolated))
        if (n > 0) ++out.selected_events;

    const auto lepton_counts = count_per_event(leptons);
    const auto sigma_counts = count_per_event(jets30);
    for (std::int64_t e = 0; e < rg.num_events; ++e)
        out.ops += lepton_counts[static_cast<std::size_t>(e)] * sigma_counts[static_cast<std::size_t>(e)];
    out.formula_ops = out.ops;
    return out;
}

QueryOutput q8(const ColumnarRowGroup& rg, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    const auto leptons = concat_nested(rg.electrons, rg.muons, "flavor", 0.0, 1.0);
    const auto& pt = leptons.field("pt");
    const auto& phi = leptons.field("phi");
    const auto& charge = leptons.field("charge");
    const auto& flavor = leptons.field("flavor");
    const auto& met_pt = rg.met_pt_col();
    const auto& met_phi = rg.met_phi_col();

    const auto pairs = combinations(leptons.offsets, 2);
    for (std::int64_t e = 0; e < rg.num_events; ++e) {
        const std::int64_t base = leptons.offsets[e];
        const std::int64_t count = leptons.offsets[e + 1] - base;
        ++out.ops;
        if (count < 3) continue;
        out.ops += pairs.offsets[e + 1] - pairs.offsets[e];

        std::int64_t best_i = -1;
        std::int64_t best_j = -1;
        double best_key = 0;
        for (std::int64_t t = pairs.offsets[e]; t < pairs.offsets[e + 1]; ++t) {
            const std::int64_t i = base + pairs.indices[static_cast<std::size_t>(2 * t)];
            const std::int64_t j = base + pairs.indices[static_cast<std::size_t>(2 * t + 1)];
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            if (flavor[ui] != flavor[uj] || charge[ui] * charge[uj] != -1.0) continue;
            const double m = invariant_mass(particle_at(leptons, i), particle_at(leptons, j));
            const double k = std::fabs(m - kZMass);
            if (best_i < 0 || k < best_key) {
                best_i = i;
                best_j = j;
                best_key = k;
            }
        }
        if (best_i < 0) continue;

        std::int64_t lead = -1;
        for (std::int64_t l = base; l < base + count; ++l) {
            if (l == best_i || l == best_j) continue;
            if (lead < 0 || pt[static_cast<std::size_t>(l)] > pt[static_cast<std::size_t>(lead)])
                lead = l;
        }
        const auto ue = static_cast<std::size_t>(e);
        const auto ul = static_cast<std::size_t>(lead);
        out.primary.fill(transverse_mass(met_pt[ue], met_phi[ue], pt[ul], phi[ul]));
        ++out.selected_events;
    }

    const auto muon_counts = count_per_event(rg.muons);
    const auto electron_counts = count_per_event(rg.electrons);
    for (std::int64_t e = 0; e < rg.num_events; ++e) {
        const auto ue = static_cast<std::size_t>(e);
        out.formula_ops +=
            electron_counts[ue] * muon_counts[ue] + electron_counts[ue] + muon_counts[ue] + 1;
    }
    return out;
}

}  // namespace

std::span<const QueryId> all_queries() { return kAllQueries; }

std::string_view query_name(QueryId q) {
    switch (q) {
        case QueryId::Q1: return "q1";
        case QueryId::Q2: return "q2";
        case QueryId::Q3: return "q3";
        case QueryId::Q4: return "q4";
        case QueryId::Q5: return "q5";
        case QueryId::Q6a: return "q6a";
        case QueryId::Q6b: return "q6b";
        case QueryId::Q7: return "q7";
        case QueryId::Q8: return "q8";
    }
    return "?";
}

std::optional<QueryId> parse_query_id(std::string_view name) {
    if (name == "q1") return QueryId::Q1;
    if (name == "q2") return QueryId::Q2;
    if (name == "q3") return QueryId::Q3;
    if (name == "q4") return QueryId::Q4;
    if (name == "q5") return QueryId::Q5;
    if (name == "q6" || name == "q6a") return QueryId::Q6a;
    if (name == "q6b") return QueryId::Q6b;
    if (name == "q7") return QueryId::Q7;
    if (name == "q8") return QueryId::Q8;
    return std::nullopt;
}

HistogramSpec default_spec(QueryId q) {
    switch (q) {
        case QueryId::Q1:
        case QueryId::Q4:
        case QueryId::Q5: return {0.0, 2000.0, 100};
        case QueryId::Q6b: return {0.0, 1.0, 100};
        default: return {15.0, 250.0, 100};
    }
}

std::optional<HistogramSpec> default_secondary_spec(QueryId q) {
    if (q == QueryId::Q6a) return default_spec(QueryId::Q6b);
    if (q == QueryId::Q6b) return default_spec(QueryId::Q6a);
    return std::nullopt;
}

Projection projection_for(QueryId q) {
    switch (q) {
        case QueryId::Q1: return Projection::of({"met.pt"});
        case QueryId::Q2: return Projection::of({"jets.pt"});
        case QueryId::Q3: return Projection::of({"jets.pt", "jets.eta"});
        case QueryId::Q4: return Projection::of({"met.pt", "jets.pt"});
        case QueryId::Q5: return Projection::of({"met.pt", "muons.*"});
        case QueryId::Q6a:
        case QueryId::Q6b: return Projection::of({"jets.*"});
        case QueryId::Q7: return Projection::of({"jets.*", "muons.*", "electrons.*"});
        case QueryId::Q8: return Projection::of({"met.pt", "met.phi", "muons.*", "electrons.*"});
    }
    throw std::logic_error("unreachable");
}

std::int64_t binom2(std::int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::int64_t binom3(std::int64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

std::int64_t complexity_formula(QueryId q, const OpCountInputs& c) {
    switch (q) {
        case QueryId::Q1: return 1;
        case QueryId::Q2:
        case QueryId::Q3: return c.jets;
        case QueryId::Q4: return 1 + c.jets;
        case QueryId::Q5: return 1 + binom2(c.muons);
        case QueryId::Q6a:
        case QueryId::Q6b: return 1 + binom3(c.jets);
        case QueryId::Q7: return (c.electrons + c.muons) * c.sigma_jets;
        case QueryId::Q8: return c.electrons * c.muons + c.electrons + c.muons + 1;
    }
    throw std::logic_error("unreachable");
}

std::vector<OpCountInputs> op_count_inputs(const ColumnarRowGroup& rg) {
    std::vector<OpCountInputs> inputs(static_cast<std::size_t>(rg.num_events));
    const auto count_into = [&](const NestedListColumn& col, std::int64_t OpCountInputs::* member) {
        if (!col.has_offsets()) return;
        for (std::int64_t e = 0; e < rg.num_events; ++e)
            inputs[static_cast<std::size_t>(e)].*member = col.offsets[e + 1] - col.offsets[e];
    };
    count_into(rg.electrons, &OpCountInputs::electrons);
    count_into(rg.jets, &OpCountInputs::jets);
    count_into(rg.muons, &OpCountInputs::muons);
    if (rg.jets.has_offsets() && rg.jets.has_field("pt")) {
        const auto& pt = rg.jets.field("pt");
        for (std::int64_t e = 0; e < rg.num_events; ++e) {
            std::int64_t sigma = 0;
            for (std::int64_t i = rg.jets.offsets[e]; i < rg.jets.offsets[e + 1]; ++i)
                if (pt[static_cast<std::size_t>(i)] > kQ7JetPtCut) ++sigma;
            inputs[static_cast<std::size_t>(e)].sigma_jets = sigma;
        }
    }
    return inputs;
}

QueryOutput run_query_on_row_group(QueryId q, const ColumnarRowGroup& rg,
                                   const HistogramSpec& primary_spec,
                                   const std::optional<HistogramSpec>& secondary_spec) {
    switch (q) {
        case QueryId::Q1: return q1(rg, primary_spec);
        case QueryId::Q2: return q2(rg, primary_spec);
        case QueryId::Q3: return q3(rg, primary_spec);
        case QueryId::Q4: return q4(rg, primary_spec);
        case QueryId::Q5: return q5(rg, primary_spec);
        case QueryId::Q6a:
        case QueryId::Q6b: return q6(q, rg, primary_spec, secondary_spec);
        case QueryId::Q7: return q7(rg, primary_spec);
        case QueryId::Q8: return q8(rg, primary_spec);
    }
    throw std::logic_error("unreachable");
}

std::int64_t q4_selected_count(const ColumnarRowGroup& rg, double pt_threshold) {
    const auto& pt = rg.jets.field("pt");
    auto [kept, mask] = nested_filter(rg.jets, [&](std::size_t i) { return pt[i] > pt_threshold; });
    std::int64_t selected = 0;
    for (std::int64_t n : count_per_event(kept))
        if (n >= 2) ++selected;
    return selected;
}

}  // namespace nf2
