#include "belltest/lhv.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace belltest;
using namespace belltest::lhv;

namespace {

DeterministicAssignment from(const char* key) { return assignment_from_key(key); }

// The inequality expression assembled from pair tables and marginals, a
// second route to the same number as mixture_functional.
double functional_from_tables(const FourAxisModel& m)
{
    const double e_ab = expectation(pair_probabilities(m, FirstSetting::a, SecondSetting::b));
    const double e_abp = expectation(pair_probabilities(m, FirstSetting::a, SecondSetting::b_prime));
    const double e_apb = expectation(pair_probabilities(m, FirstSetting::a_prime, SecondSetting::b));
    const auto last = pair_probabilities(m, FirstSetting::a_prime, SecondSetting::b_prime);
    const auto [sa, sb] = marginals(last);
    return e_ab + e_abp + e_apb - 2 * last.at(Outcome::plus, Outcome::plus) -
           2 * last.at(Outcome::minus, Outcome::minus) + sa.plus + sa.minus + sb.plus + sb.minus;
}

}  // namespace

TEST_CASE("enumeration order")
{
    const auto all = enumerate_assignments();
    REQUIRE(all.size() == 81);
    CHECK(assignment_key(all.front()) == "++++");
    CHECK(assignment_key(all.back()) == "----");
    std::set<std::string> keys;
    for (std::size_t i = 0; i < all.size(); ++i) {
        keys.insert(assignment_key(all[i]));
        CHECK(assignment_index(all[i]) == i);
        CHECK(assignment_at(i) == all[i]);
        CHECK(assignment_from_key(assignment_key(all[i])) == all[i]);
        if (i > 0) {
            CHECK(assignment_key(all[i - 1]) != assignment_key(all[i]));
        }
    }
    CHECK(keys.size() == 81);
    CHECK(assignment_key(all[1]) == "+++0");
    CHECK(assignment_key(all[27]) == "0+++");
    CHECK_THROWS_AS(assignment_from_key("+++"), ValidationError);
    CHECK_THROWS_AS(assignment_from_key("++x+"), ValidationError);
}

TEST_CASE("functional matches the brute-force oracle")
{
    for (const auto& s : enumerate_assignments()) {
        CHECK(bell_functional(s) ==
              oracle::functional(value(s.a), value(s.a_prime), value(s.b), value(s.b_prime)));
    }
    CHECK(bell_functional(from("0000")) == 0);
    CHECK(bell_functional(from("++-+")) == -1);
    CHECK(bell_functional(from("++--")) == -1);
}

TEST_CASE("theorem report")
{
    const auto r = verify_theorem();
    CHECK(r.min_functional_value == -1.0);
    CHECK(r.all_satisfied);
    CHECK(r.case_bounds_match);

    int oracle_min = 100;
    std::vector<std::string> oracle_argmin;
    for (int i : oracle::kValues) {
        for (int ip : oracle::kValues) {
            for (int j : oracle::kValues) {
                for (int jp : oracle::kValues) {
                    oracle_min = std::min(oracle_min, oracle::functional(i, ip, j, jp));
                }
            }
        }
    }
    CHECK(r.min_functional_value == oracle_min);
    for (const auto& s : r.argmin_assignments) {
        CHECK(bell_functional(s) == -1);
    }
    const auto count = std::count_if(r.values.begin(), r.values.end(),
                                     [](double v) { return v == -1.0; });
    CHECK(r.argmin_assignments.size() == static_cast<std::size_t>(count));

    const std::array<int, 9> stated{-1, -1, -3, -3, -2, -2, -2, -2, -1};
    const std::array<std::pair<Outcome, Outcome>, 9> order{{
        {Outcome::plus, Outcome::plus},   {Outcome::minus, Outcome::minus},
        {Outcome::plus, Outcome::minus},  {Outcome::minus, Outcome::plus},
        {Outcome::plus, Outcome::zero},   {Outcome::minus, Outcome::zero},
        {Outcome::zero, Outcome::plus},   {Outcome::zero, Outcome::minus},
        {Outcome::zero, Outcome::zero},
    }};
    for (std::size_t c = 0; c < 9; ++c) {
        CHECK(r.case_bounds[c].a_prime == order[c].first);
        CHECK(r.case_bounds[c].b_prime == order[c].second);
        CHECK(r.case_bounds[c].minimum == stated[c]);
        CHECK(r.case_bounds[c].expected_minimum == stated[c]);
    }
}

TEST_CASE("theorem report does not depend on worker count")
{
    const auto one = verify_theorem(1);
    for (unsigned w : {2u, 3u, 7u, 81u}) {
        const auto r = verify_theorem(w);
        CHECK(r.values == one.values);
        CHECK(r.argmin_assignments == one.argmin_assignments);
        CHECK(r.min_functional_value == one.min_functional_value);
    }
}

TEST_CASE("pair probabilities")
{
    const auto pm = FourAxisModel::point_mass(from("++--"));
    CHECK(pair_probabilities(pm, FirstSetting::a, SecondSetting::b).at(Outcome::plus, Outcome::minus) ==
          1.0);
    CHECK(pair_probabilities(pm, FirstSetting::a_prime, SecondSetting::b_prime)
              .at(Outcome::plus, Outcome::minus) == 1.0);
    const auto u = FourAxisModel::uniform();
    for (auto f : {FirstSetting::a, FirstSetting::a_prime}) {
        for (auto s : {SecondSetting::b, SecondSetting::b_prime}) {
            const auto p = pair_probabilities(u, f, s);
            for (const auto& row : p.cells) {
                for (double c : row) {
                    CHECK(c == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
                }
            }
        }
    }
    FourAxisModel bad = u;
    bad.weights[0] = -0.5;
    CHECK_THROWS_AS(pair_probabilities(bad, FirstSetting::a, SecondSetting::b), ValidationError);
}

TEST_CASE("mixture functional")
{
    const auto r = verify_theorem();
    for (const auto& s : r.argmin_assignments) {
        CHECK(mixture_functional(FourAxisModel::point_mass(s)) == -1.0);
    }
    CHECK(mixture_functional(FourAxisModel::point_mass(from("0000"))) == 0.0);
    double sum = 0.0;
    for (int i : oracle::kValues) {
        for (int ip : oracle::kValues) {
            for (int j : oracle::kValues) {
                for (int jp : oracle::kValues) {
                    sum += oracle::functional(i, ip, j, jp);
                }
            }
        }
    }
    CHECK(mixture_functional(FourAxisModel::uniform()) == doctest::Approx(sum / 81.0).epsilon(1e-14));
    CHECK(sum / 81.0 == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("random models: convexity and two-path consistency")
{
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto m = random_model(seed);
        double total = 0.0;
        for (double w : m.weights) {
            CHECK(w >= 0.0);
            total += w;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
        const double f = mixture_functional(m);
        CHECK(f >= -1.0 - 1e-12);
        CHECK(std::abs(f - functional_from_tables(m)) <= 1e-12);
    }
    CHECK(random_model(9).weights == random_model(9).weights);
    CHECK(random_model(9).weights != random_model(10).weights);
}

TEST_CASE("model file round trip")
{
    const auto m = random_model(123);
    std::stringstream ss;
    save_model(ss, m);
    const auto back = load_model(ss);
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        CHECK(back.weights[i] == doctest::Approx(m.weights[i]).epsilon(1e-15));
    }
}

TEST_CASE("model file rejects malformed input")
{
    auto text_for = [](const FourAxisModel& m) {
        std::stringstream ss;
        save_model(ss, m);
        return ss.str();
    };
    const std::string good = text_for(FourAxisModel::uniform());
    {
        std::istringstream in(good);
        CHECK_NOTHROW(load_model(in));
    }
    {
        // Drop the last line: one key missing.
        std::string t = good.substr(0, good.rfind('\n', good.size() - 2) + 1);
        std::istringstream in(t);
        CHECK_THROWS_AS(load_model(in), ValidationError);
    }
    {
        std::istringstream in(good + "++++ 0\n");
        CHECK_THROWS_AS(load_model(in), ValidationError);
    }
    {
        std::istringstream in(good + "+x++ 0\n");
        CHECK_THROWS_AS(load_model(in), ValidationError);
    }
    {
        auto m = FourAxisModel::uniform();
        m.weights[5] *= 1.01;
        std::istringstream in(text_for(m));
        CHECK_THROWS_AS(load_model(in), ValidationError);
    }
    {
        std::istringstream in("# comment only\n");
        CHECK_THROWS_AS(load_model(in), ValidationError);
    }
}
