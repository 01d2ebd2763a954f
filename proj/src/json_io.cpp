#include "nf2/json_io.hpp"

#include <cmath>
#include <istream>

#include <json.hpp>

#include "nf2/errors.hpp"

namespace nf2 {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double get_number(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing key '") + key + "'");
    if (!it->is_number()) throw SchemaError(std::string("key '") + key + "' is not a number");
    return it->get<double>();
}

int get_charge(const json& obj) {
    const double c = get_number(obj, "charge");
    if (c != std::floor(c)) throw SchemaError("key 'charge' is not an integer");
    return static_cast<int>(c);
}

const json& get_array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing key '") + key + "'");
    if (!it->is_array()) throw SchemaError(std::string("key '") + key + "' is not an array");
    return *it;
}

std::int64_t get_integer(const json& obj, const char* key) {
    const double v = get_number(obj, key);
    if (v != std::floor(v)) throw SchemaError(std::string("key '") + key + "' is not an integer");
    return static_cast<std::int64_t>(v);
}

}  // namespace

Event parse_event_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("event line is not a JSON object");

    Event e;
    e.event_id = get_integer(j, "event_id");
    e.run = get_integer(j, "run");

    auto met_it = j.find("met");
    if (met_it == j.end() || !met_it->is_object()) throw SchemaError("missing object key 'met'");
    e.met.pt = get_number(*met_it, "pt");
    e.met.phi = get_number(*met_it, "phi");
    e.met.sumet = get_number(*met_it, "sumet");

    for (const json& item : get_array(j, "jets")) {
        Jet jet;
        jet.pt = get_number(item, "pt");
        jet.eta = get_number(item, "eta");
        jet.phi = get_number(item, "phi");
        jet.mass = get_number(item, "mass");
        jet.btag = get_number(item, "btag");
        e.jets.push_back(jet);
    }
    for (const char* key : {"muons", "electrons"}) {
        auto& dst = std::string_view(key) == "muons" ? e.muons : e.electrons;
        for (const json& item : get_array(j, key)) {
            ChargedLepton l;
            l.pt = get_number(item, "pt");
            l.eta = get_number(item, "eta");
            l.phi = get_number(item, "phi");
            l.mass = get_number(item, "mass");
            l.charge = get_charge(item);
            dst.push_back(l);
        }
    }
    return e;
}

std::string to_json_line(const Event& e) {
    ordered_json j;
    j["event_id"] = e.event_id;
    j["run"] = e.run;
    j["met"] = {{"pt", e.met.pt}, {"phi", e.met.phi}, {"sumet", e.met.sumet}};
    j["jets"] = ordered_json::array();
    for (const Jet& jet : e.jets)
        j["jets"].push_back({{"pt", jet.pt},
                             {"eta", jet.eta},
                             {"phi", jet.phi},
                             {"mass", jet.mass},
                             {"btag", jet.btag}});
    for (const char* key : {"muons", "electrons"}) {
        const auto& src = std::string_view(key) == "muons" ? e.muons : e.electrons;
        j[key] = ordered_json::array();
        for (const ChargedLepton& l : src)
            j[key].push_back({{"pt", l.pt},
                              {"eta", l.eta},
                              {"phi", l.phi},
                              {"mass", l.mass},
                              {"charge", l.charge}});
    }
    return j.dump();
}

void for_each_jsonl_event(std::istream& in, const std::function<void(Event&&)>& sink) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            sink(parse_event_line(line));
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace nf2
