#include "belltest/qm.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <random>

using namespace belltest;
using namespace belltest::qm;

namespace {

CascadeGeometry geometry(double eta, double phi, std::optional<double> F = std::nullopt)
{
    CascadeGeometry g;
    g.eta = eta;
    g.phi_deg = phi;
    g.F_override = F;
    return g;
}

bool rates_equal(const DetectionRates& x, const DetectionRates& y)
{
    return x.pp == y.pp && x.pm == y.pm && x.mp == y.mp && x.mm == y.mm && x.plus1 == y.plus1 &&
           x.minus1 == y.minus1 && x.plus2 == y.plus2 && x.minus2 == y.minus2;
}

}  // namespace

TEST_CASE("solid angle")
{
    CHECK(solid_angle(180.0) == doctest::Approx(4 * oracle::kPi).epsilon(1e-15));
    CHECK(solid_angle(90.0) == doctest::Approx(2 * oracle::kPi).epsilon(1e-15));
    CHECK(solid_angle(30.0) == doctest::Approx(double(oracle::kOmega30)).epsilon(1e-15));
    CHECK_THROWS_AS(solid_angle(0.0), ValidationError);
    CHECK_THROWS_AS(solid_angle(181.0), ValidationError);
}

TEST_CASE("angular correlation")
{
    CHECK(angular_correlation(1e-6) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(angular_correlation(90.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(angular_correlation(30.0) == doctest::Approx(double(oracle::kG30)).epsilon(1e-15));
    CHECK_THROWS_AS(angular_correlation(91.0), ValidationError);
}

TEST_CASE("depolarization")
{
    CHECK(depolarization(1e-6) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(depolarization(30.0) == doctest::Approx(double(oracle::kF30)).epsilon(1e-15));
    CHECK(depolarization(30.0) == doctest::Approx(0.99).epsilon(0.005));
    CHECK(depolarization(90.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(depolarization(-5.0), ValidationError);
}

TEST_CASE("ideal pair probabilities")
{
    const auto p0 = ideal_pair_probabilities(0.0);
    CHECK(p0.at(Outcome::plus, Outcome::plus) == doctest::Approx(0.5));
    CHECK(p0.at(Outcome::minus, Outcome::minus) == doctest::Approx(0.5));
    CHECK(p0.at(Outcome::plus, Outcome::minus) == doctest::Approx(0.0));

    const auto p120 = ideal_pair_probabilities(120.0);
    CHECK(p120.at(Outcome::plus, Outcome::plus) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(p120.at(Outcome::minus, Outcome::minus) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(p120.at(Outcome::plus, Outcome::minus) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(p120.at(Outcome::minus, Outcome::plus) == doctest::Approx(0.375).epsilon(1e-15));

    const auto p45 = ideal_pair_probabilities(45.0);
    for (auto i : {Outcome::plus, Outcome::minus}) {
        for (auto j : {Outcome::plus, Outcome::minus}) {
            CHECK(p45.at(i, j) == doctest::Approx(0.25).epsilon(1e-15));
        }
    }
    CHECK(std::abs(expectation(p45)) < 1e-15);

    for (double th = -200.0; th < 400.0; th += 7.3) {
        const auto p = ideal_pair_probabilities(th);
        CHECK(expectation(p) ==
              doctest::Approx(double(std::cos(2.0L * th * oracle::kPi / 180.0L))).epsilon(1e-14));
        CHECK(p.at(Outcome::zero, Outcome::zero) == 0.0);
        CHECK(ideal_expectation(th) == doctest::Approx(expectation(p)).epsilon(1e-14));
    }
}

TEST_CASE("detection rates at the reference geometry")
{
    const auto g1 = geometry(0.2, 30.0, 1.0);
    const auto r0 = detection_rates(AngleDeg(0), AngleDeg(0), g1);
    CHECK(r0.pp == doctest::Approx(double(oracle::kDpp0)).epsilon(1e-14));
    CHECK(r0.mm == doctest::Approx(double(oracle::kDpp0)).epsilon(1e-14));
    CHECK(std::abs(r0.pm) < 1e-20);
    CHECK(std::abs(r0.mp) < 1e-20);
    CHECK(r0.plus1 == doctest::Approx(double(oracle::kSingle)).epsilon(1e-15));

    const auto r120 = detection_rates(AngleDeg(0), AngleDeg(120), g1);
    CHECK(r120.pp == doctest::Approx(double(oracle::kDpp120)).epsilon(1e-13));

    const auto r45 = detection_rates(AngleDeg(20), AngleDeg(65), geometry(0.7, 50.0));
    CHECK(r45.pp == doctest::Approx(r45.pm).epsilon(1e-14));
    CHECK(r45.pp == doctest::Approx(r45.mp).epsilon(1e-14));
    CHECK(r45.pp == doctest::Approx(r45.mm).epsilon(1e-14));

    for (double sep : {0.0, 13.0, 60.0, 120.0, 171.5}) {
        const auto o = oracle::cascade(0.2L, 30.0L, oracle::kF30, sep);
        const auto r = detection_rates(AngleDeg(0), AngleDeg(sep), geometry(0.2, 30.0));
        CHECK(r.pp == doctest::Approx(double(o.like)).epsilon(1e-13));
        CHECK(r.pm == doctest::Approx(double(o.unlike)).epsilon(1e-13));
        CHECK(r.minus2 == doctest::Approx(double(o.single)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(detection_rates(AngleDeg(0), AngleDeg(0), geometry(0.0, 30.0)), ValidationError);
    CHECK_THROWS_AS(detection_rates(AngleDeg(0), AngleDeg(0), geometry(0.2, 30.0, 1.2)),
                    ValidationError);
}

TEST_CASE("T0 and t0 closed forms")
{
    const auto g = geometry(1.0, 90.0);
    CHECK(qm_t0(g) == doctest::Approx(0.5).epsilon(1e-15));
    const auto ref = geometry(0.2, 30.0);
    CHECK(qm_T0(ref) == doctest::Approx(double(oracle::kT0)).epsilon(1e-14));
    CHECK(qm_t0(ref) == doctest::Approx(double(oracle::kt0)).epsilon(1e-15));
    const auto tiny = geometry(1e-12, 30.0);
    CHECK(qm_T0(tiny) < 1e-24);
    CHECK(qm_t0(tiny) < 1e-12);
}

TEST_CASE("properties over random geometries and angles")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> eta(1e-3, 1.0);
    std::uniform_real_distribution<double> phi(0.5, 90.0);
    std::uniform_real_distribution<double> F(0.0, 1.0);
    std::uniform_real_distribution<double> ang(-360.0, 360.0);
    for (int i = 0; i < 500; ++i) {
        auto g = geometry(eta(rng), phi(rng));
        if (i % 2 == 0) {
            g.F_override = F(rng);
        }
        const AngleDeg a(ang(rng)), b(ang(rng));
        const auto r = detection_rates(a, b, g);
        CHECK(std::abs(coincidence_total(r) - qm_T0(g)) <= 1e-15 * qm_T0(g));
        CHECK(std::abs(singles_total(r.plus1, r.minus1) - qm_t0(g)) <= 1e-15 * qm_t0(g));
        CHECK(std::abs(singles_total(r.plus2, r.minus2) - qm_t0(g)) <= 1e-15 * qm_t0(g));

        const double sep = axis_separation(a, b);
        const double fringe = g.effective_F() * std::cos(2.0 * sep * std::numbers::pi / 180.0);
        CHECK(std::abs(detection_expectation(r) / coincidence_total(r) - fringe) <= 1e-12);

        auto g1 = g;
        g1.F_override = 1.0;
        const auto n = normalize_coincidences(detection_rates(a, b, g1));
        const auto ideal = ideal_pair_probabilities(sep);
        for (std::size_t x = 0; x < 3; ++x) {
            for (std::size_t y = 0; y < 3; ++y) {
                CHECK(std::abs(n.cells[x][y] - ideal.cells[x][y]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("rates depend only on the axis separation")
{
    // Dyadic angles keep the separation arithmetic exact, so rotated
    // copies must agree bit for bit.
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> sixty_fourths(0, 180 * 64 - 1);
    const auto g = geometry(0.2, 30.0);
    for (int i = 0; i < 100; ++i) {
        const double a = sixty_fourths(rng) / 64.0;
        const double b = sixty_fourths(rng) / 64.0;
        const double rot = sixty_fourths(rng) / 64.0;
        const auto base = detection_rates(AngleDeg(a), AngleDeg(b), g);
        const auto turned = detection_rates(AngleDeg(a + rot), AngleDeg(b + rot), g);
        CHECK(rates_equal(base, turned));
        CHECK(rates_equal(base, detection_rates(AngleDeg(b), AngleDeg(a), g)));
    }
}

TEST_CASE("event distribution")
{
    const auto g1 = geometry(0.2, 30.0, 1.0);
    const auto ev = event_distribution(AngleDeg(0), AngleDeg(120), g1);
    CHECK(ev.cells.at(Outcome::plus, Outcome::zero) ==
          doctest::Approx(double(oracle::kPplus0)).epsilon(1e-13));
    CHECK(ev.cells.total() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ev.cells.at(Outcome::zero, Outcome::zero) ==
          doctest::Approx(1.0 - 2 * qm_t0(g1) + qm_T0(g1)).epsilon(1e-15));

    const auto faint = event_distribution(AngleDeg(0), AngleDeg(33), geometry(1e-9, 30.0));
    CHECK(faint.cells.at(Outcome::zero, Outcome::zero) == doctest::Approx(1.0).epsilon(1e-9));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 180.0);
    for (int i = 0; i < 100; ++i) {
        const auto g = geometry(0.2 + 0.7 * (i % 5) / 4.0, 10.0 + i % 80);
        const AngleDeg a(u(rng)), b(u(rng));
        const auto r = detection_rates(a, b, g);
        const auto e = event_distribution(a, b, g).cells;
        const auto [s1, s2] = marginals(e);
        CHECK(s1.plus == doctest::Approx(r.plus1).epsilon(1e-12));
        CHECK(s1.minus == doctest::Approx(r.minus1).epsilon(1e-12));
        CHECK(s2.plus == doctest::Approx(r.plus2).epsilon(1e-12));
        CHECK(s2.minus == doctest::Approx(r.minus2).epsilon(1e-12));
    }
}

TEST_CASE("completion rejects rates it cannot complete")
{
    DetectionRates r{0.3, 0.0, 0.0, 0.3, 0.2, 0.3, 0.3, 0.3};
    CHECK_THROWS_AS(complete_event_distribution(r), InfeasibleModelError);
}
