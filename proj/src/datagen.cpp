#include "nf2/datagen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "nf2/json_io.hpp"
#include "nf2/physics.hpp"

namespace nf2 {

namespace {

// Largest binary32 magnitude strictly below pi. Drawing phi inside
// [-kPhi32, kPhi32] keeps the value inside (-pi, pi] even after the
// binary32 round-trip the storage layer applies.
const double kPhi32 = static_cast<double>(std::nextafterf(static_cast<float>(kPi), 0.0f));

constexpr double kMuonMass = 0.106;
constexpr double kElectronMass = 0.000511;
constexpr std::int64_t kRunNumber = 1;

// The volatile blocks GCC's basic-block vectorizer from pairing adjacent
// member stores and dropping the narrowing, which would leak full-precision
// doubles into fields that must be exact binary32 values.
double r32(double v) {
    volatile float f = static_cast<float>(v);
    return static_cast<double>(f);
}

/// All draws are spelled out on top of raw mt19937_64 words so the stream is
/// pinned down by the engine alone, not by distribution internals.
struct Sampler {
    std::mt19937_64 rng;

    explicit Sampler(std::uint64_t seed) : rng(seed) {}

    double uniform01() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double scale) { return -scale * std::log1p(-uniform01()); }

    std::int64_t poisson(double lambda) {
        const double limit = std::exp(-lambda);
        std::int64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    int charge() { return (rng() & 1) ? 1 : -1; }
};

Jet draw_jet(Sampler& s, const GenConfig& cfg) {
    Jet j;
    j.pt = r32(0.1 + s.exponential(cfg.jet_pt_scale));
    j.eta = r32(s.uniform(-cfg.eta_range, cfg.eta_range));
    j.phi = r32(s.uniform(-kPhi32, kPhi32));
    j.mass = r32(s.exponential(cfg.jet_mass_scale));
    j.btag = r32(s.uniform01());
    return j;
}

ChargedLepton draw_lepton(Sampler& s, const GenConfig& cfg, double mass) {
    ChargedLepton l;
    l.pt = r32(0.1 + s.exponential(cfg.lepton_pt_scale));
    l.eta = r32(s.uniform(-cfg.eta_range, cfg.eta_range));
    l.phi = r32(s.uniform(-kPhi32, kPhi32));
    l.mass = r32(mass);
    l.charge = s.charge();
    return l;
}

Event draw_event(Sampler& s, const GenConfig& cfg, std::int64_t event_id, std::int64_t jets,
                 std::int64_t muons, std::int64_t electrons) {
    Event e;
    e.event_id = event_id;
    e.run = kRunNumber;
    e.met.pt = r32(s.exponential(cfg.met_scale));
    e.met.phi = r32(s.uniform(-kPhi32, kPhi32));
    e.met.sumet = r32(e.met.pt + s.exponential(2.0 * cfg.met_scale));
    e.jets.reserve(static_cast<std::size_t>(jets));
    e.muons.reserve(static_cast<std::size_t>(muons));
    e.electrons.reserve(static_cast<std::size_t>(electrons));
    for (std::int64_t i = 0; i < jets; ++i) e.jets.push_back(draw_jet(s, cfg));
    for (std::int64_t i = 0; i < muons; ++i) e.muons.push_back(draw_lepton(s, cfg, kMuonMass));
    for (std::int64_t i = 0; i < electrons; ++i)
        e.electrons.push_back(draw_lepton(s, cfg, kElectronMass));
    return e;
}

void check_config(const GenConfig& cfg) {
    if (cfg.num_events < 0) throw std::invalid_argument("num_events must be >= 0");
    if (cfg.lambda_jets <= 0 || cfg.lambda_muons <= 0 || cfg.lambda_electrons <= 0)
        throw std::invalid_argument("multiplicity lambdas must be positive");
    if (cfg.jet_pt_scale <= 0 || cfg.lepton_pt_scale <= 0 || cfg.met_scale <= 0 ||
        cfg.eta_range <= 0 || cfg.jet_mass_scale <= 0)
        throw std::invalid_argument("kinematic scales must be positive");
}

}  // namespace

void generate(const GenConfig& cfg, const std::function<void(Event&&)>& sink) {
    check_config(cfg);
    Sampler s(cfg.seed);
    for (std::int64_t i = 0; i < cfg.num_events; ++i) {
        const std::int64_t jets = s.poisson(cfg.lambda_jets);
        const std::int64_t muons = s.poisson(cfg.lambda_muons);
        const std::int64_t electrons = s.poisson(cfg.lambda_electrons);
        sink(draw_event(s, cfg, i, jets, muons, electrons));
    }
}

std::vector<Event> generate_events(const GenConfig& cfg) {
    check_config(cfg);
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(cfg.num_events));
    generate(cfg, [&](Event&& e) { events.push_back(std::move(e)); });
    return events;
}

std::int64_t generate_jsonl(const GenConfig& cfg, std::ostream& out) {
    std::int64_t count = 0;
    generate(cfg, [&](Event&& e) {
        out << to_json_line(e) << '\n';
        ++count;
    });
    return count;
}

Event make_event_with_counts(std::uint64_t seed, int num_jets, int num_muons, int num_electrons) {
    if (num_jets < 0 || num_muons < 0 || num_electrons < 0)
        throw std::invalid_argument("particle counts must be >= 0");
    const GenConfig cfg;
    Sampler s(seed);
    return draw_event(s, cfg, 0, num_jets, num_muons, num_electrons);
}

}  // namespace nf2
