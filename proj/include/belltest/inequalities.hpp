#pragma once

#include "belltest/core.hpp"

#include <array>
#include <string>
#include <utility>

namespace belltest {

/// Polarizer settings: a and a' for the first photon, b and b' for the second.
struct SettingsQuad {
    AngleDeg a;
    AngleDeg b;
    AngleDeg a_prime;
    AngleDeg b_prime;

    friend bool operator==(const SettingsQuad&, const SettingsQuad&) = default;
};

/// The four setting pairs a measurement of the inequality needs, in the order
/// (a, b), (b', a), (b, a'), (a', b'). In every pair the first photon is
/// analysed at the a-side axis and the second at the b-side axis.
enum class SettingPair { a_b = 0, bp_a = 1, b_ap = 2, ap_bp = 3 };

inline constexpr std::array<SettingPair, 4> kSettingPairs{SettingPair::a_b, SettingPair::bp_a,
                                                          SettingPair::b_ap, SettingPair::ap_bp};

// "a_b", "bp_a", "b_ap", "ap_bp".
const char* label(SettingPair pair) noexcept;

// (first photon axis, second photon axis) for a pair.
std::pair<AngleDeg, AngleDeg> axes(const SettingsQuad& quad, SettingPair pair);

/// Signed differences (first listed - second listed) mod 180 for
/// (a, b), (b', a), (b, a'), (a', b'). The four always sum to 0 mod 180.
std::array<double, 4> differences(const SettingsQuad& quad);

/// Inverse of differences() with a pinned at 0. Throws ValidationError when
/// the four differences do not close (sum != 0 mod 180), since no set of
/// coplanar axes realizes them.
SettingsQuad quad_from_differences(double d_ab, double d_bpa, double d_bap, double d_apbp = 0.0);

enum class BoundSense {
    lower, // local theories satisfy lhs >= bound
    upper, // local theories satisfy lhs <= bound
};

struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double bound = 0.0;
    BoundSense sense = BoundSense::lower;
    // Signed so that negative always means violated: lhs - bound for lower
    // bounds, bound - lhs for upper bounds.
    double margin = 0.0;
    bool violated = false;
    double violation_factor = 1.0;
};

inline constexpr double kViolationTolerance = 1e-12;

InequalityReport make_report(std::string name, double lhs, double bound,
                             BoundSense sense = BoundSense::lower);

/// Four-axis inequality for ternary outcomes:
///   e(a,b) + e(b',a) + e(b,a') - 2p++(a',b') - 2p--(a',b')
///     + p+(a') + p-(a') + p+(b') + p-(b') >= -1.
InequalityReport ardehali_10(double e_ab, double e_bpa, double e_bap,
                             const PairProbabilities& pair_apbp,
                             const SinglesProbabilities& singles_ap,
                             const SinglesProbabilities& singles_bp);

/// Symmetric form at three 120 deg separations and a 0 deg (a', b') pair.
/// `singles` is p+(a'), p-(a'), p+(b'), p-(b').
InequalityReport ardehali_14(double e_120, double p_pp_0, double p_mm_0,
                             const std::array<double, 4>& singles);

// e(a,b) + e(b',a) + e(a',b) >= -1.
InequalityReport bell_65(double e_ab, double e_bpa, double e_apb);

struct QuadRates {
    DetectionRates a_b;
    DetectionRates bp_a;
    DetectionRates b_ap;
    DetectionRates ap_bp;

    const DetectionRates& operator[](SettingPair pair) const;
    DetectionRates& operator[](SettingPair pair);
};

/// Measurable form built from detection rates. Every term is a ratio, so any
/// common scale (the number of emissions) cancels. Singles are (D+, D-).
/// Throws DivisionUndefinedError on a zero T0 or t0.
InequalityReport ardehali_28(const QuadRates& rates, std::pair<double, double> singles_ap,
                             std::pair<double, double> singles_bp);

// Singles taken from the (a', b') pair: side 1 for a', side 2 for b'.
InequalityReport ardehali_28(const QuadRates& rates);

/// Measurable symmetric form:
///   3E(120)/T0(120) - 2D++(0)/T0(0) - 2D--(0)/T0(0) + 2D+(0)/t0(0) + 2D-(0)/t0(0) >= -1.
InequalityReport ardehali_31(double E_120, double T0_120, double D_pp_0, double D_mm_0,
                             double T0_0, double D_plus_0, double D_minus_0, double t0_0);

/// |e1 + e2 + e3 - e4| <= 2, reported with violation factor lhs / 2. The
/// subtracted correlation is the last argument.
InequalityReport chsh(double e_ab, double e_abp, double e_apb, double e_apbp);

/// (factor_new - 1) / (factor_ref - 1): how much larger one excess violation
/// is than another. Throws ValidationError unless factor_ref > 1.
double excess_violation_ratio(double factor_new, double factor_ref);

}  // namespace belltest
