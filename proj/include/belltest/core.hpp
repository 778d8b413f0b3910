#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace belltest {

// Error hierarchy shared by every module. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (bad distribution, out-of-range angle, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A ratio estimator hit a zero denominator.
class DivisionUndefinedError : public Error {
public:
    using Error::Error;
};

// Detection rates cannot be completed to a nonnegative event distribution.
class InfeasibleModelError : public Error {
public:
    using Error::Error;
};

// Absolute tolerance on probability sums.
inline constexpr double kProbabilityTolerance = 1e-9;
// Slack allowed when checking coincidences against singles.
inline constexpr double kRateTolerance = 1e-12;

/// Ternary measurement result: detected in the ordinary beam (+1), absorbed or
/// undetected (0), detected in the extraordinary beam (-1).
enum class Outcome : int { plus = 1, zero = 0, minus = -1 };

// Canonical order used everywhere: +, 0, -.
inline constexpr std::array<Outcome, 3> kOutcomes{Outcome::plus, Outcome::zero, Outcome::minus};

constexpr int value(Outcome o) noexcept { return static_cast<int>(o); }

// Position of an outcome in kOutcomes.
constexpr std::size_t index(Outcome o) noexcept
{
    switch (o) {
    case Outcome::plus: return 0;
    case Outcome::zero: return 1;
    case Outcome::minus: return 2;
    }
    return 1;
}

constexpr char symbol(Outcome o) noexcept
{
    switch (o) {
    case Outcome::plus: return '+';
    case Outcome::zero: return '0';
    case Outcome::minus: return '-';
    }
    return '?';
}

// Parses '+', '0' or '-'. Throws ValidationError otherwise.
Outcome outcome_from_symbol(char c);

/// Polarizer axis orientation in degrees. Axes are pi-periodic, so the stored
/// value is always in [0, 180).
class AngleDeg {
public:
    constexpr AngleDeg() = default;
    explicit AngleDeg(double degrees);

    double degrees() const noexcept { return degrees_; }
    double radians() const noexcept;

    friend bool operator==(const AngleDeg&, const AngleDeg&) = default;

private:
    double degrees_ = 0.0;
};

// Reduces any angle in degrees into [0, 180).
double normalize_degrees(double degrees);

// Unsigned angle between two polarizer axes, |a - b| folded into [0, 90].
double axis_separation(AngleDeg a, AngleDeg b);

/// Joint outcome distribution for one setting pair. Rows index the first
/// photon's outcome, columns the second's, both in kOutcomes order.
struct PairProbabilities {
    std::array<std::array<double, 3>, 3> cells{};

    double& at(Outcome first, Outcome second) { return cells[index(first)][index(second)]; }
    double at(Outcome first, Outcome second) const { return cells[index(first)][index(second)]; }

    double total() const noexcept;

    // Throws ValidationError unless every cell is in [0, 1] and the sum is 1.
    void validate() const;

    // Only the four detected cells are set; the zero row and column stay empty.
    static PairProbabilities detected(double pp, double pm, double mp, double mm);
};

struct SinglesProbabilities {
    double plus = 0.0;
    double zero = 0.0;
    double minus = 0.0;

    void validate() const;
};

/// Measurable per-emitted-pair probabilities of transmission plus detection.
/// Doubles are pp/pm/mp/mm (first photon outcome, second photon outcome);
/// singles are kept per side.
struct DetectionRates {
    double pp = 0.0;
    double pm = 0.0;
    double mp = 0.0;
    double mm = 0.0;
    double plus1 = 0.0;
    double minus1 = 0.0;
    double plus2 = 0.0;
    double minus2 = 0.0;

    // Nonnegative, finite, and coincidences never exceed singles. Holds for
    // raw counts as well as per-pair probabilities.
    void validate_proportions() const;

    // validate_proportions() plus every field in [0, 1].
    void validate() const;

    DetectionRates scaled(double factor) const;
};

// p++ - p+- - p-+ + p--.
double expectation(const PairProbabilities& pair);

// Row sums (first photon) and column sums (second photon).
std::pair<SinglesProbabilities, SinglesProbabilities> marginals(const PairProbabilities& pair);

// T0: sum of the four double-detection rates.
double coincidence_total(const DetectionRates& rates);

// t0 for one side.
double singles_total(double d_plus, double d_minus);

// E = D++ - D+- - D-+ + D--.
double detection_expectation(const DetectionRates& rates);

/// Conditional distribution given a double detection: p^ij = D^ij / T0 for
/// detected cells, zero elsewhere. Throws DivisionUndefinedError if T0 == 0.
PairProbabilities normalize_coincidences(const DetectionRates& rates);

}  // namespace belltest
