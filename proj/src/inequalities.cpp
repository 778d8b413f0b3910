#include "belltest/inequalities.hpp"

#include <cmath>
#include <sstream>

namespace belltest {

namespace {

double checked_ratio(double num, double den, const char* what)
{
    if (!(den > 0.0)) {
        throw DivisionUndefinedError(std::string(what) + " is zero");
    }
    return num / den;
}

void check_correlation(double e, const char* what)
{
    if (!(e >= -1.0 - kProbabilityTolerance && e <= 1.0 + kProbabilityTolerance)) {
        std::ostringstream msg;
        msg << what << " = " << e << " outside [-1, 1]";
        throw ValidationError(msg.str());
    }
}

// Circular distance between two angles mod 180.
double mod180_distance(double x, double y)
{
    const double d = normalize_degrees(x - y);
    return std::min(d, 180.0 - d);
}

}  // namespace

const char* label(SettingPair pair) noexcept
{
    switch (pair) {
    case SettingPair::a_b: return "a_b";
    case SettingPair::bp_a: return "bp_a";
    case SettingPair::b_ap: return "b_ap";
    case SettingPair::ap_bp: return "ap_bp";
    }
    return "?";
}

std::pair<AngleDeg, AngleDeg> axes(const SettingsQuad& q, SettingPair pair)
{
    switch (pair) {
    case SettingPair::a_b: return {q.a, q.b};
    case SettingPair::bp_a: return {q.a, q.b_prime};
    case SettingPair::b_ap: return {q.a_prime, q.b};
    case SettingPair::ap_bp: return {q.a_prime, q.b_prime};
    }
    return {q.a, q.b};
}

std::array<double, 4> differences(const SettingsQuad& q)
{
    return {normalize_degrees(q.a.degrees() - q.b.degrees()),
            normalize_degrees(q.b_prime.degrees() - q.a.degrees()),
            normalize_degrees(q.b.degrees() - q.a_prime.degrees()),
            normalize_degrees(q.a_prime.degrees() - q.b_prime.degrees())};
}

SettingsQuad quad_from_differences(double d_ab, double d_bpa, double d_bap, double d_apbp)
{
    SettingsQuad q;
    q.a = AngleDeg(0.0);
    q.b = AngleDeg(-d_ab);
    q.b_prime = AngleDeg(d_bpa);
    q.a_prime = AngleDeg(-d_ab - d_bap);
    if (mod180_distance(q.a_prime.degrees() - q.b_prime.degrees(), d_apbp) > 1e-9) {
        std::ostringstream msg;
        msg << "differences " << d_ab << ", " << d_bpa << ", " << d_bap << ", " << d_apbp
            << " do not close mod 180; no coplanar axes realize them";
        throw ValidationError(msg.str());
    }
    return q;
}

InequalityReport make_report(std::string name, double lhs, double bound, BoundSense sense)
{
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.bound = bound;
    r.sense = sense;
    r.margin = sense == BoundSense::lower ? lhs - bound : bound - lhs;
    r.violated = r.margin < -kViolationTolerance;
    r.violation_factor = 1.0;
    if (bound != 0.0 && lhs / bound > 1.0) {
        r.violation_factor = lhs / bound;
    }
    return r;
}

InequalityReport ardehali_10(double e_ab, double e_bpa, double e_bap,
                             const PairProbabilities& pair_apbp,
                             const SinglesProbabilities& singles_ap,
                             const SinglesProbabilities& singles_bp)
{
    check_correlation(e_ab, "e(a,b)");
    check_correlation(e_bpa, "e(b',a)");
    check_correlation(e_bap, "e(b,a')");
    pair_apbp.validate();
    singles_ap.validate();
    singles_bp.validate();

    const double lhs = e_ab + e_bpa + e_bap - 2.0 * pair_apbp.at(Outcome::plus, Outcome::plus) -
                       2.0 * pair_apbp.at(Outcome::minus, Outcome::minus) + singles_ap.plus +
                       singles_ap.minus + singles_bp.plus + singles_bp.minus;
    return make_report("ardehali10", lhs, -1.0);
}

InequalityReport ardehali_14(double e_120, double p_pp_0, double p_mm_0,
                             const std::array<double, 4>& singles)
{
    check_correlation(e_120, "e(120)");
    for (double p : {p_pp_0, p_mm_0, singles[0], singles[1], singles[2], singles[3]}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError("ardehali14: probability outside [0, 1]");
        }
    }
    const double lhs = 3.0 * e_120 - 2.0 * p_pp_0 - 2.0 * p_mm_0 + singles[0] + singles[1] +
                       singles[2] + singles[3];
    return make_report("ardehali14", lhs, -1.0);
}

InequalityReport bell_65(double e_ab, double e_bpa, double e_apb)
{
    check_correlation(e_ab, "e(a,b)");
    check_correlation(e_bpa, "e(b',a)");
    check_correlation(e_apb, "e(a',b)");
    return make_report("bell65", e_ab + e_bpa + e_apb, -1.0);
}

const DetectionRates& QuadRates::operator[](SettingPair pair) const
{
    switch (pair) {
    case SettingPair::a_b: return a_b;
    case SettingPair::bp_a: return bp_a;
    case SettingPair::b_ap: return b_ap;
    case SettingPair::ap_bp: return ap_bp;
    }
    return a_b;
}

DetectionRates& QuadRates::operator[](SettingPair pair)
{
    return const_cast<DetectionRates&>(std::as_const(*this)[pair]);
}

InequalityReport ardehali_28(const QuadRates& rates, std::pair<double, double> singles_ap,
                             std::pair<double, double> singles_bp)
{
    for (SettingPair p : kSettingPairs) {
        rates[p].validate_proportions();
    }
    for (double d : {singles_ap.first, singles_ap.second, singles_bp.first, singles_bp.second}) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw ValidationError("ardehali28: singles must be finite and nonnegative");
        }
    }

    double lhs = 0.0;
    for (SettingPair p : {SettingPair::a_b, SettingPair::bp_a, SettingPair::b_ap}) {
        lhs += checked_ratio(detection_expectation(rates[p]), coincidence_total(rates[p]),
                             "T0 at a correlation pair");
    }
    const double t0_apbp = coincidence_total(rates.ap_bp);
    lhs -= 2.0 * checked_ratio(rates.ap_bp.pp, t0_apbp, "T0(a',b')");
    lhs -= 2.0 * checked_ratio(rates.ap_bp.mm, t0_apbp, "T0(a',b')");

    const double t0_ap = singles_total(singles_ap.first, singles_ap.second);
    const double t0_bp = singles_total(singles_bp.first, singles_bp.second);
    lhs += checked_ratio(singles_ap.first, t0_ap, "t0(a')");
    lhs += checked_ratio(singles_ap.second, t0_ap, "t0(a')");
    lhs += checked_ratio(singles_bp.first, t0_bp, "t0(b')");
    lhs += checked_ratio(singles_bp.second, t0_bp, "t0(b')");
    return make_report("ardehali28", lhs, -1.0);
}

InequalityReport ardehali_28(const QuadRates& rates)
{
    return ardehali_28(rates, {rates.ap_bp.plus1, rates.ap_bp.minus1},
                       {rates.ap_bp.plus2, rates.ap_bp.minus2});
}

InequalityReport ardehali_31(double E_120, double T0_120, double D_pp_0, double D_mm_0,
                             double T0_0, double D_plus_0, double D_minus_0, double t0_0)
{
    const double lhs = 3.0 * checked_ratio(E_120, T0_120, "T0(120)") -
                       2.0 * checked_ratio(D_pp_0, T0_0, "T0(0)") -
                       2.0 * checked_ratio(D_mm_0, T0_0, "T0(0)") +
                       2.0 * checked_ratio(D_plus_0, t0_0, "t0(0)") +
                       2.0 * checked_ratio(D_minus_0, t0_0, "t0(0)");
    return make_report("ardehali31", lhs, -1.0);
}

InequalityReport chsh(double e_ab, double e_abp, double e_apb, double e_apbp)
{
    for (double e : {e_ab, e_abp, e_apb, e_apbp}) {
        check_correlation(e, "chsh correlation");
    }
    return make_report("chsh", std::abs(e_ab + e_abp + e_apb - e_apbp), 2.0, BoundSense::upper);
}

double excess_violation_ratio(double factor_new, double factor_ref)
{
    if (!(factor_ref > 1.0)) {
        throw ValidationError("reference violation factor must exceed 1");
    }
    if (!(factor_new >= 1.0)) {
        throw ValidationError("violation factor must be at least 1");
    }
    return (factor_new - 1.0) / (factor_ref - 1.0);
}

}  // namespace belltest
