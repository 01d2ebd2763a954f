#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace nf2 {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Pseudorapidity substitute for vectors with pt == 0 (keeps eta finite and
/// far outside any physical eta cut).
inline constexpr double kEtaMax = 1e6;

/// Kinematic state in the (pt, eta, phi, mass) representation.
/// Invariants: pt >= 0, mass >= 0, phi in (-pi, pi].
struct FourVector {
    double pt = 0.0;
    double eta = 0.0;
    double phi = 0.0;
    double mass = 0.0;
};

/// Momentum-energy components. Intermediate representation for sums.
struct CartesianFourVector {
    double px = 0.0;
    double py = 0.0;
    double pz = 0.0;
    double e = 0.0;

    CartesianFourVector& operator+=(const CartesianFourVector& o) {
        px += o.px;
        py += o.py;
        pz += o.pz;
        e += o.e;
        return *this;
    }
    friend CartesianFourVector operator+(CartesianFourVector a, const CartesianFourVector& b) {
        a += b;
        return a;
    }
};

/// Normalizes an angle to (-pi, pi].
inline double wrap_phi(double phi) {
    double w = std::fmod(phi + kPi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    w -= kPi;
    return w == -kPi ? kPi : w;
}

inline CartesianFourVector to_cartesian(const FourVector& v) {
    const double px = v.pt * std::cos(v.phi);
    const double py = v.pt * std::sin(v.phi);
    const double pz = v.pt * std::sinh(v.eta);
    const double e = std::sqrt(px * px + py * py + pz * pz + v.mass * v.mass);
    return {px, py, pz, e};
}

inline FourVector from_cartesian(const CartesianFourVector& c) {
    const double pt = std::sqrt(c.px * c.px + c.py * c.py);
    double phi = std::atan2(c.py, c.px);
    if (phi == -kPi) phi = kPi;
    double eta;
    if (pt > 0.0) {
        eta = std::asinh(c.pz / pt);
    } else {
        eta = c.pz > 0.0 ? kEtaMax : (c.pz < 0.0 ? -kEtaMax : 0.0);
    }
    const double m2 = c.e * c.e - (c.px * c.px + c.py * c.py + c.pz * c.pz);
    const double mass = std::sqrt(std::max(0.0, m2));
    return {pt, eta, phi, mass};
}

inline FourVector add(const FourVector& a, const FourVector& b) {
    return from_cartesian(to_cartesian(a) + to_cartesian(b));
}

/// Component-wise Cartesian sum in ascending input order, converted back once.
/// Summing before the single conversion keeps list results independent of how
/// callers group the additions.
inline FourVector sum_four_vectors(std::span<const FourVector> parts) {
    if (parts.empty()) throw std::invalid_argument("sum_four_vectors: empty input");
    CartesianFourVector acc = to_cartesian(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) acc += to_cartesian(parts[i]);
    return from_cartesian(acc);
}

inline double invariant_mass(std::span<const FourVector> parts) {
    return sum_four_vectors(parts).mass;
}

inline double invariant_mass(const FourVector& a, const FourVector& b) {
    const FourVector pair[2] = {a, b};
    return invariant_mass(std::span<const FourVector>(pair, 2));
}

/// Signed azimuth difference wrapped into [-pi, pi).
inline double delta_phi(double phi_a, double phi_b) {
    double d = std::fmod(phi_a - phi_b + kPi, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    return d - kPi;
}

// |delta phi| computed in a form that is bit-exact under argument swap.
inline double abs_delta_phi(double phi_a, double phi_b) {
    double d = std::fabs(phi_a - phi_b);
    if (d > kPi) d = kTwoPi - d;
    return d;
}

inline double delta_r(double eta_a, double phi_a, double eta_b, double phi_b) {
    const double deta = eta_a - eta_b;
    const double dphi = abs_delta_phi(phi_a, phi_b);
    return std::sqrt(deta * deta + dphi * dphi);
}

inline double delta_r(const FourVector& a, const FourVector& b) {
    return delta_r(a.eta, a.phi, b.eta, b.phi);
}

inline double transverse_mass(double pt1, double phi1, double pt2, double phi2) {
    const double arg = 2.0 * pt1 * pt2 * (1.0 - std::cos(std::fabs(phi1 - phi2)));
    return std::sqrt(std::max(0.0, arg));
}

}  // namespace nf2
