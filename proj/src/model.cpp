#include "nf2/model.hpp"

#include <cmath>
#include <sstream>

namespace nf2 {

namespace {

// (double)(float)pi rounds up, so this bound admits every double that is in
// (-pi, pi] before or after narrowing to binary32.
const double kPhiBound = static_cast<double>(static_cast<float>(kPi));

std::optional<std::string> check_kinematics(const char* collection, std::size_t index, double pt,
                                            double phi, double mass) {
    std::ostringstream os;
    if (!(pt >= 0.0)) {
        os << collection << "[" << index << "].pt = " << pt << " violates pt >= 0";
        return os.str();
    }
    if (!(mass >= 0.0)) {
        os << collection << "[" << index << "].mass = " << mass << " violates mass >= 0";
        return os.str();
    }
    if (!(phi > -kPhiBound && phi <= kPhiBound)) {
        os << collection << "[" << index << "].phi = " << phi << " not normalized to (-pi, pi]";
        return os.str();
    }
    return std::nullopt;
}

std::optional<std::string> check_lepton(const char* collection, std::size_t index,
                                        const ChargedLepton& l) {
    if (auto v = check_kinematics(collection, index, l.pt, l.phi, l.mass)) return v;
    if (l.charge != -1 && l.charge != 1) {
        std::ostringstream os;
        os << collection << "[" << index << "].charge = " << l.charge
           << " violates charge domain {-1, +1}";
        return os.str();
    }
    return std::nullopt;
}

}  // namespace

std::vector<LightLepton> concat_leptons(const Event& e) {
    std::vector<LightLepton> out;
    out.reserve(e.electrons.size() + e.muons.size());
    for (const ChargedLepton& l : e.electrons)
        out.push_back({l.pt, l.eta, l.phi, l.mass, l.charge, Flavor::electron});
    for (const ChargedLepton& l : e.muons)
        out.push_back({l.pt, l.eta, l.phi, l.mass, l.charge, Flavor::muon});
    return out;
}

std::optional<std::string> validate_event(const Event& e) {
    if (!(e.met.pt >= 0.0)) return "met.pt violates pt >= 0";
    if (!(e.met.sumet >= 0.0)) return "met.sumet violates sumet >= 0";
    if (!(e.met.phi > -kPhiBound && e.met.phi <= kPhiBound))
        return "met.phi not normalized to (-pi, pi]";
    for (std::size_t i = 0; i < e.jets.size(); ++i) {
        const Jet& j = e.jets[i];
        if (auto v = check_kinematics("jets", i, j.pt, j.phi, j.mass)) return v;
        if (!(j.btag >= 0.0 && j.btag <= 1.0)) {
            std::ostringstream os;
            os << "jets[" << i << "].btag = " << j.btag << " outside [0, 1]";
            return os.str();
        }
    }
    for (std::size_t i = 0; i < e.muons.size(); ++i)
        if (auto v = check_lepton("muons", i, e.muons[i])) return v;
    for (std::size_t i = 0; i < e.electrons.size(); ++i)
        if (auto v = check_lepton("electrons", i, e.electrons[i])) return v;
    return std::nullopt;
}

}  // namespace nf2
