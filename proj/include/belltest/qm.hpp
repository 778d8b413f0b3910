#pragma once

#include "belltest/core.hpp"

#include <optional>

namespace belltest::qm {

/// Detector geometry for J=1 -> J=0 cascade photons observed by back-to-back
/// detectors. Only the back-to-back case is modeled, because the aperture
/// functions g and F are available in closed form only there.
struct CascadeGeometry {
    double eta = 0.2;      // detector quantum efficiency, (0, 1]
    double phi_deg = 30.0; // detector half-aperture, (0, 90]
    // Replaces the depolarization factor when set; must lie in [0, 1].
    std::optional<double> F_override;

    void validate() const;

    // Depolarization factor in effect: the override or depolarization(phi_deg).
    double effective_F() const;
};

// Omega = 2 pi (1 - cos phi), for phi in (0, 180] degrees.
double solid_angle(double phi_deg);

// g(pi, phi) = 1 + cos^2(phi) (1 + cos phi)^2 / 8, for phi in (0, 90].
double angular_correlation(double phi_deg);

// F(pi, phi) = 1 - (2/3)(1 - cos phi)^2, for phi in (0, 90].
double depolarization(double phi_deg);

/// Ideal polarizers and detectors: p++ = p-- = cos^2(theta)/2,
/// p+- = p-+ = sin^2(theta)/2, nothing absorbed.
PairProbabilities ideal_pair_probabilities(double theta_diff_deg);

// cos 2 theta.
double ideal_expectation(double theta_diff_deg);

/// Singles eta * Omega / 8pi on each side; doubles
/// eta^2 (Omega / 8pi)^2 g [1 +/- F cos 2(a - b)].
DetectionRates detection_rates(AngleDeg a, AngleDeg b, const CascadeGeometry& geom);

// T0 = eta^2 (Omega / 4pi)^2 g.
double qm_T0(const CascadeGeometry& geom);
// t0 = eta Omega / 4pi.
double qm_t0(const CascadeGeometry& geom);

/// Per-emission probabilities of all nine joint outcomes.
struct EventDistribution {
    PairProbabilities cells;
};

/// Completes measured doubles and singles to a full sample space:
/// p(i,0) = D_i(1) - sum_j D_ij, p(0,j) = D_j(2) - sum_i D_ij, p(0,0) takes
/// the remainder. Throws InfeasibleModelError if any completed cell is negative.
EventDistribution complete_event_distribution(const DetectionRates& rates);

EventDistribution event_distribution(AngleDeg a, AngleDeg b, const CascadeGeometry& geom);

}  // namespace belltest::qm
