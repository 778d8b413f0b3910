#pragma once

#include "belltest/core.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace belltest::lhv {

inline constexpr std::size_t kAssignmentCount = 81;

/// Predetermined outcomes of one emitted pair: first photon at a and a',
/// second photon at b and b'.
struct DeterministicAssignment {
    Outcome a = Outcome::zero;
    Outcome a_prime = Outcome::zero;
    Outcome b = Outcome::zero;
    Outcome b_prime = Outcome::zero;

    friend bool operator==(const DeterministicAssignment&, const DeterministicAssignment&) = default;
};

enum class FirstSetting { a, a_prime };
enum class SecondSetting { b, b_prime };

// Position in the canonical order: lexicographic over (a, a', b, b') with + < 0 < -.
std::size_t assignment_index(const DeterministicAssignment& assignment) noexcept;
DeterministicAssignment assignment_at(std::size_t index);

// Four-character key such as "+0-+" in (a, a', b, b') order.
std::string assignment_key(const DeterministicAssignment& assignment);
DeterministicAssignment assignment_from_key(const std::string& key);

std::vector<DeterministicAssignment> enumerate_assignments();

Outcome first_outcome(const DeterministicAssignment& assignment, FirstSetting side) noexcept;
Outcome second_outcome(const DeterministicAssignment& assignment, SecondSetting side) noexcept;

/// Joint distribution over all 81 deterministic assignments. Its existence is
/// the locality condition: every setting pair's statistics are marginals of it.
struct FourAxisModel {
    std::array<double, kAssignmentCount> weights{};

    void validate() const;

    static FourAxisModel point_mass(const DeterministicAssignment& assignment);
    static FourAxisModel uniform();
};

PairProbabilities pair_probabilities(const FourAxisModel& model, FirstSetting first,
                                     SecondSetting second);

// A(a)B(b) + A(a)B(b') + A(a')B(b), the quantity bounded case by case.
int three_term_sum(const DeterministicAssignment& assignment) noexcept;

/// Per-assignment value of the locality functional: the three correlation
/// terms, minus twice the (a', b') ++ and -- indicators, plus the a' and b'
/// detection indicators. Its expectation under any model is the left-hand
/// side of the four-axis inequality, whose local bound is -1.
int bell_functional(const DeterministicAssignment& assignment) noexcept;

double mixture_functional(const FourAxisModel& model);

struct CaseBound {
    Outcome a_prime = Outcome::zero;
    Outcome b_prime = Outcome::zero;
    int minimum = 0;          // min over A(a), B(b) of three_term_sum
    int expected_minimum = 0; // the bound stated for this case
};

struct TheoremReport {
    std::array<double, kAssignmentCount> values{};
    double min_functional_value = 0.0;
    std::vector<DeterministicAssignment> argmin_assignments;
    // Cases (i) through (ix), in that order.
    std::array<CaseBound, 9> case_bounds{};
    bool all_satisfied = false;
    bool case_bounds_match = false;
};

// The (A(a'), B(b')) combination and stated minimum for each case (i)-(ix).
const std::array<CaseBound, 9>& stated_case_bounds();

/// Exhaustive check over the 81 extreme points. `workers` splits the
/// enumeration; the report does not depend on it.
TheoremReport verify_theorem(unsigned workers = 1);

/// Weights drawn from a flat Dirichlet: 81 independent unit exponentials built
/// from a seeded mt19937_64, scaled to sum to one.
FourAxisModel random_model(std::uint64_t seed);

/// Model file: one "KEY WEIGHT" line per assignment, '#' starts a comment.
/// Loading rejects unknown, missing, or duplicate keys, negative weights, and
/// totals outside 1 +/- 1e-6.
FourAxisModel load_model(std::istream& in);
FourAxisModel load_model_file(const std::filesystem::path& path);
void save_model(std::ostream& out, const FourAxisModel& model);

inline constexpr double kModelFileTolerance = 1e-6;

}  // namespace belltest::lhv
