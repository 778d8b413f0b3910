#include "belltest/evaluate.hpp"

#include <cmath>

namespace belltest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kSymmetryTolerance = 1e-9;

void require_symmetric(double x, double y, double z, const char* what)
{
    if (std::abs(x - y) > kSymmetryTolerance || std::abs(x - z) > kSymmetryTolerance) {
        throw ValidationError(std::string(what) +
                              " assumes equal correlations at (a,b), (b',a), (b,a')");
    }
}

SinglesProbabilities detected_singles(double d_plus, double d_minus)
{
    const double t0 = singles_total(d_plus, d_minus);
    if (!(t0 > 0.0)) {
        throw DivisionUndefinedError("singles total t0 is zero");
    }
    return {d_plus / t0, 0.0, d_minus / t0};
}

}  // namespace

const char* name(InequalityId id) noexcept
{
    switch (id) {
    case InequalityId::ardehali10: return "ardehali10";
    case InequalityId::ardehali14: return "ardehali14";
    case InequalityId::bell65: return "bell65";
    case InequalityId::ardehali28: return "ardehali28";
    case InequalityId::ardehali31: return "ardehali31";
    case InequalityId::chsh: return "chsh";
    }
    return "?";
}

InequalityId parse_inequality(std::string_view text)
{
    for (auto id : {InequalityId::ardehali10, InequalityId::ardehali14, InequalityId::bell65,
                    InequalityId::ardehali28, InequalityId::ardehali31, InequalityId::chsh}) {
        if (text == name(id)) {
            return id;
        }
    }
    throw ValidationError("unknown inequality '" + std::string(text) + "'");
}

const char* source_name(const Source& source) noexcept
{
    return std::visit(overloaded{[](const QmIdealSource&) { return "qm-ideal"; },
                                 [](const QmRealSource&) { return "qm-real"; },
                                 [](const LhvSource&) { return "lhv"; }},
                      source);
}

std::pair<lhv::FirstSetting, lhv::SecondSetting> lhv_sides(SettingPair pair) noexcept
{
    using lhv::FirstSetting;
    using lhv::SecondSetting;
    switch (pair) {
    case SettingPair::a_b: return {FirstSetting::a, SecondSetting::b};
    case SettingPair::bp_a: return {FirstSetting::a, SecondSetting::b_prime};
    case SettingPair::b_ap: return {FirstSetting::a_prime, SecondSetting::b};
    case SettingPair::ap_bp: return {FirstSetting::a_prime, SecondSetting::b_prime};
    }
    return {FirstSetting::a, SecondSetting::b};
}

PairProbabilities source_events(const Source& source, const SettingsQuad& quad, SettingPair pair)
{
    const auto [first, second] = axes(quad, pair);
    return std::visit(
        overloaded{
            [&](const QmIdealSource&) {
                return qm::ideal_pair_probabilities(axis_separation(first, second));
            },
            [&](const QmRealSource& s) {
                return qm::event_distribution(first, second, s.geometry).cells;
            },
            [&](const LhvSource& s) {
                const auto [side1, side2] = lhv_sides(pair);
                return lhv::pair_probabilities(s.model, side1, side2);
            }},
        source);
}

DetectionRates source_rates(const Source& source, const SettingsQuad& quad, SettingPair pair)
{
    if (const auto* real = std::get_if<QmRealSource>(&source)) {
        const auto [first, second] = axes(quad, pair);
        return qm::detection_rates(first, second, real->geometry);
    }
    const PairProbabilities p = source_events(source, quad, pair);
    const auto [s1, s2] = marginals(p);
    using enum Outcome;
    return {p.at(plus, plus), p.at(plus, minus), p.at(minus, plus), p.at(minus, minus),
            s1.plus,          s1.minus,          s2.plus,           s2.minus};
}

QuadRates quad_rates(const Source& source, const SettingsQuad& quad)
{
    QuadRates out;
    for (SettingPair p : kSettingPairs) {
        out[p] = source_rates(source, quad, p);
    }
    return out;
}

TransmissionStats transmission_stats(const Source& source, const SettingsQuad& quad)
{
    TransmissionStats st;
    if (std::holds_alternative<QmRealSource>(source)) {
        const QuadRates r = quad_rates(source, quad);
        st.e_ab = expectation(normalize_coincidences(r.a_b));
        st.e_bpa = expectation(normalize_coincidences(r.bp_a));
        st.e_bap = expectation(normalize_coincidences(r.b_ap));
        st.e_apbp = expectation(normalize_coincidences(r.ap_bp));
        st.pair_apbp = normalize_coincidences(r.ap_bp);
        st.singles_ap = detected_singles(r.ap_bp.plus1, r.ap_bp.minus1);
        st.singles_bp = detected_singles(r.ap_bp.plus2, r.ap_bp.minus2);
        return st;
    }
    st.e_ab = expectation(source_events(source, quad, SettingPair::a_b));
    st.e_bpa = expectation(source_events(source, quad, SettingPair::bp_a));
    st.e_bap = expectation(source_events(source, quad, SettingPair::b_ap));
    st.pair_apbp = source_events(source, quad, SettingPair::ap_bp);
    st.e_apbp = expectation(st.pair_apbp);
    std::tie(st.singles_ap, st.singles_bp) = marginals(st.pair_apbp);
    return st;
}

InequalityReport evaluate(InequalityId id, const Source& source, const SettingsQuad& quad)
{
    switch (id) {
    case InequalityId::ardehali10: {
        const auto st = transmission_stats(source, quad);
        return ardehali_10(st.e_ab, st.e_bpa, st.e_bap, st.pair_apbp, st.singles_ap,
                           st.singles_bp);
    }
    case InequalityId::ardehali14: {
        const auto st = transmission_stats(source, quad);
        require_symmetric(st.e_ab, st.e_bpa, st.e_bap, "ardehali14");
        using enum Outcome;
        return ardehali_14(st.e_ab, st.pair_apbp.at(plus, plus), st.pair_apbp.at(minus, minus),
                           {st.singles_ap.plus, st.singles_ap.minus, st.singles_bp.plus,
                            st.singles_bp.minus});
    }
    case InequalityId::bell65: {
        const auto st = transmission_stats(source, quad);
        return bell_65(st.e_ab, st.e_bpa, st.e_bap);
    }
    case InequalityId::ardehali28: return ardehali_28(quad_rates(source, quad));
    case InequalityId::ardehali31: {
        const QuadRates r = quad_rates(source, quad);
        auto ratio = [](const DetectionRates& d) {
            const double t0 = coincidence_total(d);
            if (!(t0 > 0.0)) {
                throw DivisionUndefinedError("coincidence total T0 is zero");
            }
            return detection_expectation(d) / t0;
        };
        require_symmetric(ratio(r.a_b), ratio(r.bp_a), ratio(r.b_ap), "ardehali31");
        // Under the symmetry assumption both sides' singles describe the same
        // quantity, so they are pooled.
        const double d_plus = 0.5 * (r.ap_bp.plus1 + r.ap_bp.plus2);
        const double d_minus = 0.5 * (r.ap_bp.minus1 + r.ap_bp.minus2);
        return ardehali_31(detection_expectation(r.a_b), coincidence_total(r.a_b), r.ap_bp.pp,
                           r.ap_bp.mm, coincidence_total(r.ap_bp), d_plus, d_minus,
                           singles_total(d_plus, d_minus));
    }
    case InequalityId::chsh: {
        const auto st = transmission_stats(source, quad);
        // Standard CHSH arrangement: E(a,b) - E(a,b') + E(a',b) + E(a',b').
        return chsh(st.e_ab, st.e_bap, st.e_apbp, st.e_bpa);
    }
    }
    throw ValidationError("unhandled inequality");
}

}  // namespace belltest
