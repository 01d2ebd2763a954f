#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nf2/physics.hpp"

namespace nf2 {

/// Missing transverse energy of one event.
struct Met {
    double pt = 0.0;     // magnitude, GeV
    double phi = 0.0;    // direction, (-pi, pi]
    double sumet = 0.0;  // scalar sum, GeV
};

/// Electron or muon. charge is -1 or +1.
struct ChargedLepton {
    double pt = 0.0;
    double eta = 0.0;
    double phi = 0.0;
    double mass = 0.0;
    int charge = 1;
};

struct Jet {
    double pt = 0.0;
    double eta = 0.0;
    double phi = 0.0;
    double mass = 0.0;
    double btag = 0.0;  // b-tagging discriminant in [0, 1]
};

/// One collision snapshot. Particle lists may be empty; list order is
/// meaningful and preserved end-to-end (indices identify particles).
struct Event {
    std::int64_t event_id = 0;
    std::int64_t run = 0;
    Met met;
    std::vector<Jet> jets;
    std::vector<ChargedLepton> muons;
    std::vector<ChargedLepton> electrons;
};

enum class Flavor : std::uint8_t { electron = 0, muon = 1 };

/// A lepton tagged with the collection it came from.
struct LightLepton {
    double pt = 0.0;
    double eta = 0.0;
    double phi = 0.0;
    double mass = 0.0;
    int charge = 1;
    Flavor flavor = Flavor::electron;
};

inline FourVector four_vector(const Jet& j) { return {j.pt, j.eta, j.phi, j.mass}; }
inline FourVector four_vector(const ChargedLepton& l) { return {l.pt, l.eta, l.phi, l.mass}; }
inline FourVector four_vector(const LightLepton& l) { return {l.pt, l.eta, l.phi, l.mass}; }

/// All electrons (in order) followed by all muons (in order).
std::vector<LightLepton> concat_leptons(const Event& e);

/// Returns the first violated invariant as a human-readable description,
/// or nullopt if the event is well formed. Never throws.
///
/// Angle checks admit one binary32 ulp of slack at pi so that values narrowed
/// by columnar storage still validate.
std::optional<std::string> validate_event(const Event& e);

}  // namespace nf2
