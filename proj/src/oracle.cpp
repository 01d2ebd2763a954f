#include "nf2/oracle.hpp"

#include <array>
#include <cmath>
#include <cstddef>

#include "nf2/physics.hpp"

namespace nf2 {

namespace {

QueryOutput oracle_q1(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        out.primary.fill(e.met.pt);
        ++out.selected_events;
        ++out.ops;
        ++out.formula_ops;
    }
    return out;
}

QueryOutput oracle_q2(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        for (const Jet& j : e.jets) {
            out.primary.fill(j.pt);
            ++out.ops;
        }
        if (!e.jets.empty()) ++out.selected_events;
        out.formula_ops += static_cast<std::int64_t>(e.jets.size());
    }
    return out;
}

QueryOutput oracle_q3(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        bool any = false;
        for (const Jet& j : e.jets) {
            ++out.ops;
            if (std::fabs(j.eta) < 1.0) {
                out.primary.fill(j.pt);
                any = true;
            }
        }
        if (any) ++out.selected_events;
        out.formula_ops += static_cast<std::int64_t>(e.jets.size());
    }
    return out;
}

QueryOutput oracle_q4(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        ++out.ops;
        int big_jets = 0;
        for (const Jet& j : e.jets) {
            ++out.ops;
            if (j.pt > 40.0) ++big_jets;
        }
        if (big_jets >= 2) {
            out.primary.fill(e.met.pt);
            ++out.selected_events;
        }
        out.formula_ops += 1 + static_cast<std::int64_t>(e.jets.size());
    }
    return out;
}

QueryOutput oracle_q5(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        ++out.ops;
        bool pass = false;
        for (std::size_t i = 0; i < e.muons.size(); ++i) {
            for (std::size_t j = i + 1; j < e.muons.size(); ++j) {
                ++out.ops;
                if (pass) continue;
                if (e.muons[i].charge * e.muons[j].charge != -1) continue;
                const double m =
                    invariant_mass(four_vector(e.muons[i]), four_vector(e.muons[j]));
                if (m > 60.0 && m < 120.0) pass = true;
            }
        }
        if (pass) {
            out.primary.fill(e.met.pt);
            ++out.selected_events;
        }
        const auto m = static_cast<std::int64_t>(e.muons.size());
        out.formula_ops += 1 + m * (m - 1) / 2;
    }
    return out;
}

QueryOutput oracle_q6(QueryId q, std::span<const Event> events, const HistogramSpec& primary_spec,
                      const std::optional<HistogramSpec>& secondary_spec) {
    const HistogramSpec pt_spec = q == QueryId::Q6a
                                      ? primary_spec
                                      : secondary_spec.value_or(default_spec(QueryId::Q6a));
    const HistogramSpec btag_spec = q == QueryId::Q6b
                                        ? primary_spec
                                        : secondary_spec.value_or(default_spec(QueryId::Q6b));
    Histogram pt_hist(pt_spec);
    Histogram btag_hist(btag_spec);
    std::int64_t selected = 0;
    std::int64_t ops = 0;
    std::int64_t formula_ops = 0;

    for (const Event& e : events) {
        ++ops;
        bool have_best = false;
        double best_key = 0.0;
        double best_pt = 0.0;
        double best_btag = 0.0;
        const std::size_t n = e.jets.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t l = j + 1; l < n; ++l) {
                    ++ops;
                    const std::array<FourVector, 3> trio = {four_vector(e.jets[i]),
                                                            four_vector(e.jets[j]),
                                                            four_vector(e.jets[l])};
                    const FourVector sum = sum_four_vectors(trio);
                    const double key = std::fabs(sum.mass - 172.5);
                    if (have_best && key >= best_key) continue;
                    have_best = true;
                    best_key = key;
                    best_pt = sum.pt;
                    best_btag = e.jets[i].btag;
                    if (e.jets[j].btag > best_btag) best_btag = e.jets[j].btag;
                    if (e.jets[l].btag > best_btag) best_btag = e.jets[l].btag;
                }
        if (have_best) {
            pt_hist.fill(best_pt);
            btag_hist.fill(best_btag);
            ++selected;
        }
        const auto jn = static_cast<std::int64_t>(n);
        formula_ops += 1 + (jn < 3 ? 0 : jn * (jn - 1) * (jn - 2) / 6);
    }

    QueryOutput out{q == QueryId::Q6a ? std::move(pt_hist) : std::move(btag_hist)};
    out.secondary = q == QueryId::Q6a ? std::move(btag_hist) : std::move(pt_hist);
    out.selected_events = selected;
    out.ops = ops;
    out.formula_ops = formula_ops;
    return out;
}

QueryOutput oracle_q7(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        const auto all_leptons = concat_leptons(e);
        std::vector<LightLepton> leptons;
        for (const LightLepton& l : all_leptons)
            if (l.pt > 10.0) leptons.push_back(l);

        double sum = 0.0;
        bool any = false;
        std::int64_t sigma = 0;
        for (const Jet& j : e.jets) {
            if (!(j.pt > 30.0)) continue;
            ++sigma;
            bool keep = true;
            for (const LightLepton& l : leptons) {
                if (delta_r(j.eta, j.phi, l.eta, l.phi) < 0.4) {
                    keep = false;
                    break;
                }
            }
            if (keep) {
                sum += j.pt;
                any = true;
            }
        }
        out.primary.fill(sum);
        if (any) ++out.selected_events;
        out.ops += static_cast<std::int64_t>(all_leptons.size()) * sigma;
    }
    out.formula_ops = out.ops;
    return out;
}

QueryOutput oracle_q8(std::span<const Event> events, const HistogramSpec& spec) {
    QueryOutput out{Histogram(spec)};
    for (const Event& e : events) {
        ++out.ops;
        const auto em = static_cast<std::int64_t>(e.electrons.size());
        const auto mm = static_cast<std::int64_t>(e.muons.size());
        out.formula_ops += em * mm + em + mm + 1;

        const auto leptons = concat_leptons(e);
        if (leptons.size() < 3) continue;

        std::size_t best_i = 0;
        std::size_t best_j = 0;
        bool have_pair = false;
        double best_key = 0.0;
        for (std::size_t i = 0; i < leptons.size(); ++i) {
            for (std::size_t j = i + 1; j < leptons.size(); ++j) {
                ++out.ops;
                if (leptons[i].flavor != leptons[j].flavor) continue;
                if (leptons[i].charge * leptons[j].charge != -1) continue;
                const double m =
                    invariant_mass(four_vector(leptons[i]), four_vector(leptons[j]));
                const double key = std::fabs(m - 91.2);
                if (!have_pair || key < best_key) {
                    have_pair = true;
                    best_key = key;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (!have_pair) continue;

        bool have_lead = false;
        std::size_t lead = 0;
        for (std::size_t l = 0; l < leptons.size(); ++l) {
            if (l == best_i || l == best_j) continue;
            if (!have_lead || leptons[l].pt > leptons[lead].pt) {
                have_lead = true;
                lead = l;
            }
        }
        out.primary.fill(
            transverse_mass(e.met.pt, e.met.phi, leptons[lead].pt, leptons[lead].phi));
        ++out.selected_events;
    }
    return out;
}

}  // namespace

QueryOutput oracle_run(QueryId q, std::span<const Event> events,
                       const HistogramSpec& primary_spec,
                       const std::optional<HistogramSpec>& secondary_spec) {
    switch (q) {
        case QueryId::Q1: return oracle_q1(events, primary_spec);
        case QueryId::Q2: return oracle_q2(events, primary_spec);
        case QueryId::Q3: return oracle_q3(events, primary_spec);
        case QueryId::Q4: return oracle_q4(events, primary_spec);
        case QueryId::Q5: return oracle_q5(events, primary_spec);
        case QueryId::Q6a:
        case QueryId::Q6b: return oracle_q6(q, events, primary_spec, secondary_spec);
        case QueryId::Q7: return oracle_q7(events, primary_spec);
        case QueryId::Q8: return oracle_q8(events, primary_spec);
    }
    throw std::logic_error("unreachable");
}

}  // namespace nf2
