#include "nf2/columnar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace nf2 {

namespace {

constexpr std::array<std::string_view, 23> kCatalog = {
    "event_id",       "run",           "met.pt",          "met.phi",        "met.sumet",
    "jets.offsets",   "jets.pt",       "jets.eta",        "jets.phi",       "jets.mass",
    "jets.btag",      "muons.offsets", "muons.pt",        "muons.eta",      "muons.phi",
    "muons.mass",     "muons.charge",  "electrons.offsets", "electrons.pt", "electrons.eta",
    "electrons.phi",  "electrons.mass", "electrons.charge",
};

constexpr std::array<std::string_view, 5> kJetFields = {"pt", "eta", "phi", "mass", "btag"};
constexpr std::array<std::string_view, 5> kLeptonFields = {"pt", "eta", "phi", "mass", "charge"};

bool is_known_path(std::string_view path) {
    return std::find(kCatalog.begin(), kCatalog.end(), path) != kCatalog.end();
}

std::span<const std::string_view> fields_of(std::string_view collection) {
    return collection == "jets" ? std::span<const std::string_view>(kJetFields)
                                : std::span<const std::string_view>(kLeptonFields);
}

}  // namespace

std::span<const std::string_view> column_catalog() { return kCatalog; }

Projection Projection::all() {
    Projection p;
    for (std::string_view path : kCatalog) p.paths_.insert(std::string(path));
    return p;
}

Projection Projection::of(std::initializer_list<std::string_view> paths) {
    Projection p;
    for (std::string_view path : paths) p.add(path);
    return p;
}

void Projection::add(std::string_view path) {
    if (path.ends_with(".*")) {
        const std::string_view collection = path.substr(0, path.size() - 2);
        if (collection != "jets" && collection != "muons" && collection != "electrons")
            throw UnknownColumnError("unknown collection '" + std::string(collection) + "'");
        for (std::string_view f : fields_of(collection))
            paths_.insert(std::string(collection) + "." + std::string(f));
        paths_.insert(std::string(collection) + ".offsets");
        return;
    }
    if (!is_known_path(path)) throw UnknownColumnError("unknown column path '" + std::string(path) + "'");
    paths_.insert(std::string(path));
    // A projected particle field needs its offsets to be usable.
    const auto dot = path.find('.');
    if (dot != std::string_view::npos) {
        const std::string_view collection = path.substr(0, dot);
        if (collection != "met") paths_.insert(std::string(collection) + ".offsets");
    }
}

bool Projection::is_subset_of(const Projection& other) const {
    return std::includes(other.paths_.begin(), other.paths_.end(), paths_.begin(), paths_.end());
}

ColumnarRowGroup events_to_row_group(std::span<const Event> events) {
    ColumnarRowGroup rg;
    rg.num_events = static_cast<std::int64_t>(events.size());
    rg.event_id.emplace();
    rg.run.emplace();
    rg.met_pt.emplace();
    rg.met_phi.emplace();
    rg.met_sumet.emplace();

    auto& jets = rg.jets;
    auto& muons = rg.muons;
    auto& electrons = rg.electrons;
    jets.offsets.push_back(0);
    muons.offsets.push_back(0);
    electrons.offsets.push_back(0);
    for (std::string_view f : kJetFields) jets.fields[std::string(f)];
    for (std::string_view f : kLeptonFields) {
        muons.fields[std::string(f)];
        electrons.fields[std::string(f)];
    }

    const auto push_lepton = [](NestedListColumn& col, const ChargedLepton& l) {
        col.fields["pt"].push_back(l.pt);
        col.fields["eta"].push_back(l.eta);
        col.fields["phi"].push_back(l.phi);
        col.fields["mass"].push_back(l.mass);
        col.fields["charge"].push_back(static_cast<double>(l.charge));
    };

    for (const Event& e : events) {
        rg.event_id->push_back(e.event_id);
        rg.run->push_back(e.run);
        rg.met_pt->push_back(e.met.pt);
        rg.met_phi->push_back(e.met.phi);
        rg.met_sumet->push_back(e.met.sumet);
        for (const Jet& j : e.jets) {
            jets.fields["pt"].push_back(j.pt);
            jets.fields["eta"].push_back(j.eta);
            jets.fields["phi"].push_back(j.phi);
            jets.fields["mass"].push_back(j.mass);
            jets.fields["btag"].push_back(j.btag);
        }
        for (const ChargedLepton& m : e.muons) push_lepton(muons, m);
        for (const ChargedLepton& el : e.electrons) push_lepton(electrons, el);
        jets.offsets.push_back(static_cast<std::int64_t>(jets.fields["pt"].size()));
        muons.offsets.push_back(static_cast<std::int64_t>(muons.fields["pt"].size()));
        electrons.offsets.push_back(static_cast<std::int64_t>(electrons.fields["pt"].size()));
    }
    return rg;
}

std::vector<Event> row_group_to_events(const ColumnarRowGroup& rg) {
    std::vector<Event> events;
    events.resize(static_cast<std::size_t>(rg.num_events));
    const auto& ids = rg.event_id_col();
    const auto& runs = rg.run_col();
    const auto& met_pt = rg.met_pt_col();
    const auto& met_phi = rg.met_phi_col();
    const auto& met_sumet = rg.met_sumet_col();

    for (std::int64_t i = 0; i < rg.num_events; ++i) {
        Event& e = events[static_cast<std::size_t>(i)];
        e.event_id = ids[static_cast<std::size_t>(i)];
        e.run = runs[static_cast<std::size_t>(i)];
        e.met = {met_pt[static_cast<std::size_t>(i)], met_phi[static_cast<std::size_t>(i)],
                 met_sumet[static_cast<std::size_t>(i)]};
    }

    const auto& jp = rg.jets.field("pt");
    const auto& je = rg.jets.field("eta");
    const auto& jf = rg.jets.field("phi");
    const auto& jm = rg.jets.field("mass");
    const auto& jb = rg.jets.field("btag");
    for (std::int64_t i = 0; i < rg.num_events; ++i) {
        for (std::int64_t k = rg.jets.offsets[i]; k < rg.jets.offsets[i + 1]; ++k) {
            const auto u = static_cast<std::size_t>(k);
            events[static_cast<std::size_t>(i)].jets.push_back({jp[u], je[u], jf[u], jm[u], jb[u]});
        }
    }

    const auto fill_leptons = [&](const NestedListColumn& col,
                                  std::vector<ChargedLepton> Event::* member) {
        const auto& pt = col.field("pt");
        const auto& eta = col.field("eta");
        const auto& phi = col.field("phi");
        const auto& mass = col.field("mass");
        const auto& charge = col.field("charge");
        for (std::int64_t i = 0; i < rg.num_events; ++i) {
            for (std::int64_t k = col.offsets[i]; k < col.offsets[i + 1]; ++k) {
                const auto u = static_cast<std::size_t>(k);
                (events[static_cast<std::size_t>(i)].*member)
                    .push_back({pt[u], eta[u], phi[u], mass[u],
                                static_cast<int>(std::llround(charge[u]))});
            }
        }
    };
    fill_leptons(rg.muons, &Event::muons);
    fill_leptons(rg.electrons, &Event::electrons);
    return events;
}

ColumnarRowGroup slice_row_group_prefix(const ColumnarRowGroup& rg, std::int64_t n) {
    if (n < 0 || n > rg.num_events)
        throw std::invalid_argument("slice_row_group_prefix: n out of range");
    if (n == rg.num_events) return rg;
    ColumnarRowGroup out;
    out.num_events = n;
    const auto nu = static_cast<std::size_t>(n);
    const auto slice_scalar = [&](const auto& src, auto& dst) {
        if (src) dst.emplace(src->begin(), src->begin() + static_cast<std::ptrdiff_t>(nu));
    };
    slice_scalar(rg.event_id, out.event_id);
    slice_scalar(rg.run, out.run);
    slice_scalar(rg.met_pt, out.met_pt);
    slice_scalar(rg.met_phi, out.met_phi);
    slice_scalar(rg.met_sumet, out.met_sumet);
    const auto slice_nested = [&](const NestedListColumn& src, NestedListColumn& dst) {
        if (!src.has_offsets()) return;
        dst.offsets.assign(src.offsets.begin(), src.offsets.begin() + static_cast<std::ptrdiff_t>(nu) + 1);
        const auto flat = static_cast<std::size_t>(dst.offsets.back());
        for (const auto& [name, values] : src.fields)
            dst.fields[name].assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(flat));
    };
    slice_nested(rg.jets, out.jets);
    slice_nested(rg.muons, out.muons);
    slice_nested(rg.electrons, out.electrons);
    return out;
}

std::optional<std::string> check_row_group(const ColumnarRowGroup& rg) {
    const auto check_scalar_len = [&](const auto& opt, const char* name) -> std::optional<std::string> {
        if (opt && static_cast<std::int64_t>(opt->size()) != rg.num_events)
            return std::string(name) + " length != num_events";
        return std::nullopt;
    };
    if (auto v = check_scalar_len(rg.event_id, "event_id")) return v;
    if (auto v = check_scalar_len(rg.run, "run")) return v;
    if (auto v = check_scalar_len(rg.met_pt, "met.pt")) return v;
    if (auto v = check_scalar_len(rg.met_phi, "met.phi")) return v;
    if (auto v = check_scalar_len(rg.met_sumet, "met.sumet")) return v;

    const auto check_nested = [&](const NestedListColumn& col,
                                  const char* name) -> std::optional<std::string> {
        if (!col.has_offsets()) {
            if (!col.fields.empty())
                return std::string(name) + " has fields but no offsets";
            return std::nullopt;
        }
        if (static_cast<std::int64_t>(col.offsets.size()) != rg.num_events + 1)
            return std::string(name) + ".offsets length != num_events + 1";
        if (col.offsets.front() != 0) return std::string(name) + ".offsets[0] != 0";
        for (std::size_t i = 1; i < col.offsets.size(); ++i)
            if (col.offsets[i] < col.offsets[i - 1])
                return std::string(name) + ".offsets not non-decreasing";
        for (const auto& [field, values] : col.fields)
            if (static_cast<std::int64_t>(values.size()) != col.offsets.back())
                return std::string(name) + "." + field + " flat length != offsets.back()";
        return std::nullopt;
    };
    if (auto v = check_nested(rg.jets, "jets")) return v;
    if (auto v = check_nested(rg.muons, "muons")) return v;
    if (auto v = check_nested(rg.electrons, "electrons")) return v;
    return std::nullopt;
}

}  // namespace nf2
