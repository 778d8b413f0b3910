#include "belltest/qm.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace belltest::qm {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * kPi / 180.0; }

void require_aperture(double phi_deg, double max_deg)
{
    if (!(phi_deg > 0.0 && phi_deg <= max_deg)) {
        std::ostringstream msg;
        msg << "half-aperture phi = " << phi_deg << " deg outside (0, " << max_deg << "]";
        throw ValidationError(msg.str());
    }
}

}  // namespace

void CascadeGeometry::validate() const
{
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw ValidationError("detector efficiency eta must be in (0, 1]");
    }
    require_aperture(phi_deg, 90.0);
    if (F_override && !(*F_override >= 0.0 && *F_override <= 1.0)) {
        throw ValidationError("F override must be in [0, 1]");
    }
}

double CascadeGeometry::effective_F() const
{
    return F_override ? *F_override : depolarization(phi_deg);
}

double solid_angle(double phi_deg)
{
    require_aperture(phi_deg, 180.0);
    return 2.0 * kPi * (1.0 - std::cos(deg2rad(phi_deg)));
}

double angular_correlation(double phi_deg)
{
    require_aperture(phi_deg, 90.0);
    const double c = std::cos(deg2rad(phi_deg));
    return 1.0 + 0.125 * c * c * (1.0 + c) * (1.0 + c);
}

double depolarization(double phi_deg)
{
    require_aperture(phi_deg, 90.0);
    const double one_minus_c = 1.0 - std::cos(deg2rad(phi_deg));
    return 1.0 - (2.0 / 3.0) * one_minus_c * one_minus_c;
}

double ideal_expectation(double theta_diff_deg)
{
    return std::cos(2.0 * AngleDeg(theta_diff_deg).radians());
}

PairProbabilities ideal_pair_probabilities(double theta_diff_deg)
{
    const double theta = AngleDeg(theta_diff_deg).radians();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double like = 0.5 * c * c;
    const double unlike = 0.5 * s * s;
    return PairProbabilities::detected(like, unlike, unlike, like);
}

DetectionRates detection_rates(AngleDeg a, AngleDeg b, const CascadeGeometry& geom)
{
    geom.validate();
    const double acceptance = solid_angle(geom.phi_deg) / (8.0 * kPi);
    const double single = geom.eta * acceptance;
    const double base = geom.eta * geom.eta * acceptance * acceptance *
                        angular_correlation(geom.phi_deg);
    const double fringe = geom.effective_F() * std::cos(2.0 * deg2rad(axis_separation(a, b)));

    DetectionRates r;
    r.pp = r.mm = base * (1.0 + fringe);
    r.pm = r.mp = base * (1.0 - fringe);
    r.plus1 = r.minus1 = r.plus2 = r.minus2 = single;
    r.validate();
    return r;
}

double qm_T0(const CascadeGeometry& geom)
{
    geom.validate();
    const double acceptance = solid_angle(geom.phi_deg) / (4.0 * kPi);
    return geom.eta * geom.eta * acceptance * acceptance * angular_correlation(geom.phi_deg);
}

double qm_t0(const CascadeGeometry& geom)
{
    geom.validate();
    return geom.eta * solid_angle(geom.phi_deg) / (4.0 * kPi);
}

EventDistribution complete_event_distribution(const DetectionRates& rates)
{
    using enum Outcome;
    EventDistribution ev;
    auto& p = ev.cells;
    p.at(plus, plus) = rates.pp;
    p.at(plus, minus) = rates.pm;
    p.at(minus, plus) = rates.mp;
    p.at(minus, minus) = rates.mm;
    p.at(plus, zero) = rates.plus1 - (rates.pp + rates.pm);
    p.at(minus, zero) = rates.minus1 - (rates.mp + rates.mm);
    p.at(zero, plus) = rates.plus2 - (rates.pp + rates.mp);
    p.at(zero, minus) = rates.minus2 - (rates.pm + rates.mm);
    p.at(zero, zero) = 1.0 - rates.plus1 - rates.minus1 - rates.plus2 - rates.minus2 +
                       coincidence_total(rates);

    for (const auto& row : p.cells) {
        for (double c : row) {
            if (!(c >= 0.0)) {
                throw InfeasibleModelError(
                    "detection rates cannot be completed to a nonnegative event distribution");
            }
        }
    }
    p.validate();
    return ev;
}

EventDistribution event_distribution(AngleDeg a, AngleDeg b, const CascadeGeometry& geom)
{
    return complete_event_distribution(detection_rates(a, b, geom));
}

}  // namespace belltest::qm
