#include "belltest/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace belltest {

namespace {

void check_probability(double p, const char* what)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << what << " = " << p << " is not a probability";
        throw ValidationError(msg.str());
    }
}

void check_unit_sum(double sum, const char* what)
{
    if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " sums to " << sum << ", expected 1";
        throw ValidationError(msg.str());
    }
}

}  // namespace

Outcome outcome_from_symbol(char c)
{
    switch (c) {
    case '+': return Outcome::plus;
    case '0': return Outcome::zero;
    case '-': return Outcome::minus;
    default: break;
    }
    throw ValidationError(std::string("unknown outcome symbol '") + c + "'");
}

double normalize_degrees(double degrees)
{
    if (!std::isfinite(degrees)) {
        throw ValidationError("angle must be finite");
    }
    double r = std::fmod(degrees, 180.0);
    if (r < 0.0) {
        r += 180.0;
    }
    // fmod of a tiny negative number can round up to exactly 180
    if (r >= 180.0) {
        r = 0.0;
    }
    return r;
}

double axis_separation(AngleDeg a, AngleDeg b)
{
    const double d = normalize_degrees(a.degrees() - b.degrees());
    // 180 - d is exact for d in [90, 180)
    return d <= 90.0 ? d : 180.0 - d;
}

AngleDeg::AngleDeg(double degrees) : degrees_(normalize_degrees(degrees)) {}

double AngleDeg::radians() const noexcept { return degrees_ * std::numbers::pi / 180.0; }

double PairProbabilities::total() const noexcept
{
    double s = 0.0;
    for (const auto& row : cells) {
        for (double c : row) {
            s += c;
        }
    }
    return s;
}

void PairProbabilities::validate() const
{
    for (const auto& row : cells) {
        for (double c : row) {
            check_probability(c, "pair cell");
        }
    }
    check_unit_sum(total(), "pair distribution");
}

PairProbabilities PairProbabilities::detected(double pp, double pm, double mp, double mm)
{
    PairProbabilities out;
    out.at(Outcome::plus, Outcome::plus) = pp;
    out.at(Outcome::plus, Outcome::minus) = pm;
    out.at(Outcome::minus, Outcome::plus) = mp;
    out.at(Outcome::minus, Outcome::minus) = mm;
    return out;
}

void SinglesProbabilities::validate() const
{
    check_probability(plus, "p+");
    check_probability(zero, "p0");
    check_probability(minus, "p-");
    check_unit_sum(plus + zero + minus, "singles distribution");
}

void DetectionRates::validate_proportions() const
{
    const std::array<std::pair<double, const char*>, 8> fields{{{pp, "D++"},
                                                                {pm, "D+-"},
                                                                {mp, "D-+"},
                                                                {mm, "D--"},
                                                                {plus1, "D+(1)"},
                                                                {minus1, "D-(1)"},
                                                                {plus2, "D+(2)"},
                                                                {minus2, "D-(2)"}}};
    for (const auto& [v, name] : fields) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string(name) + " must be finite and nonnegative");
        }
    }

    auto require = [](double coincidences, double singles, const char* what) {
        if (coincidences > singles + kRateTolerance * std::max(1.0, singles)) {
            throw ValidationError(std::string("coincidences exceed singles for ") + what);
        }
    };
    require(pp + pm, plus1, "D+(1)");
    require(mp + mm, minus1, "D-(1)");
    require(pp + mp, plus2, "D+(2)");
    require(pm + mm, minus2, "D-(2)");
}

void DetectionRates::validate() const
{
    validate_proportions();
    for (double v : {pp, pm, mp, mm, plus1, minus1, plus2, minus2}) {
        check_probability(v, "detection rate");
    }
}

DetectionRates DetectionRates::scaled(double factor) const
{
    return {pp * factor,    pm * factor,     mp * factor,    mm * factor,
            plus1 * factor, minus1 * factor, plus2 * factor, minus2 * factor};
}

double expectation(const PairProbabilities& pair)
{
    pair.validate();
    return pair.at(Outcome::plus, Outcome::plus) - pair.at(Outcome::plus, Outcome::minus) -
           pair.at(Outcome::minus, Outcome::plus) + pair.at(Outcome::minus, Outcome::minus);
}

std::pair<SinglesProbabilities, SinglesProbabilities> marginals(const PairProbabilities& pair)
{
    pair.validate();
    const auto& c = pair.cells;
    SinglesProbabilities first{c[0][0] + c[0][1] + c[0][2], c[1][0] + c[1][1] + c[1][2],
                               c[2][0] + c[2][1] + c[2][2]};
    SinglesProbabilities second{c[0][0] + c[1][0] + c[2][0], c[0][1] + c[1][1] + c[2][1],
                                c[0][2] + c[1][2] + c[2][2]};
    return {first, second};
}

double coincidence_total(const DetectionRates& rates)
{
    return rates.pp + rates.pm + rates.mp + rates.mm;
}

double singles_total(double d_plus, double d_minus) { return d_plus + d_minus; }

double detection_expectation(const DetectionRates& rates)
{
    return rates.pp - rates.pm - rates.mp + rates.mm;
}

PairProbabilities normalize_coincidences(const DetectionRates& rates)
{
    const double t0 = coincidence_total(rates);
    if (!(t0 > 0.0)) {
        throw DivisionUndefinedError("coincidence total T0 is zero");
    }
    auto out = PairProbabilities::detected(rates.pp / t0, rates.pm / t0, rates.mp / t0,
                                           rates.mm / t0);
    out.validate();
    return out;
}

}  // namespace belltest
