#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "nf2/model.hpp"

namespace nf2 {

/// Generator knobs. Multiplicities are Poisson means; pt and jet mass are
/// exponential scales in GeV; eta is uniform on [-eta_range, eta_range].
struct GenConfig {
    std::uint64_t seed = 42;
    std::int64_t num_events = 0;
    double lambda_jets = 6.0;
    double lambda_muons = 2.0;
    double lambda_electrons = 1.0;
    double jet_pt_scale = 45.0;
    double lepton_pt_scale = 30.0;
    double met_scale = 25.0;
    double eta_range = 2.5;
    double jet_mass_scale = 10.0;
};

/// Streams cfg.num_events synthetic events to `sink`. Every value is rounded
/// through binary32 so the native file's 4-byte kinematics round-trip
/// bit-exactly. Deterministic in (seed, cfg).
void generate(const GenConfig& cfg, const std::function<void(Event&&)>& sink);

std::vector<Event> generate_events(const GenConfig& cfg);

/// Writes cfg.num_events events as JSON lines; returns the event count.
std::int64_t generate_jsonl(const GenConfig& cfg, std::ostream& out);

/// Fixture builder: exact particle counts, kinematics drawn as in generate.
Event make_event_with_counts(std::uint64_t seed, int num_jets, int num_muons, int num_electrons);

}  // namespace nf2
