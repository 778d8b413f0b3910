#include "belltest/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace belltest::lhv {

std::size_t assignment_index(const DeterministicAssignment& s) noexcept
{
    return 27 * index(s.a) + 9 * index(s.a_prime) + 3 * index(s.b) + index(s.b_prime);
}

DeterministicAssignment assignment_at(std::size_t i)
{
    if (i >= kAssignmentCount) {
        throw ValidationError("assignment index out of range");
    }
    return {kOutcomes[i / 27], kOutcomes[(i / 9) % 3], kOutcomes[(i / 3) % 3], kOutcomes[i % 3]};
}

std::string assignment_key(const DeterministicAssignment& s)
{
    return {symbol(s.a), symbol(s.a_prime), symbol(s.b), symbol(s.b_prime)};
}

DeterministicAssignment assignment_from_key(const std::string& key)
{
    if (key.size() != 4) {
        throw ValidationError("assignment key '" + key + "' must have four characters");
    }
    return {outcome_from_symbol(key[0]), outcome_from_symbol(key[1]),
            outcome_from_symbol(key[2]), outcome_from_symbol(key[3])};
}

std::vector<DeterministicAssignment> enumerate_assignments()
{
    std::vector<DeterministicAssignment> out;
    out.reserve(kAssignmentCount);
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        out.push_back(assignment_at(i));
    }
    return out;
}

Outcome first_outcome(const DeterministicAssignment& s, FirstSetting side) noexcept
{
    return side == FirstSetting::a ? s.a : s.a_prime;
}

Outcome second_outcome(const DeterministicAssignment& s, SecondSetting side) noexcept
{
    return side == SecondSetting::b ? s.b : s.b_prime;
}

void FourAxisModel::validate() const
{
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw ValidationError("four-axis model has a negative or NaN weight");
        }
        sum += w;
    }
    if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
        throw ValidationError("four-axis model weights do not sum to 1");
    }
}

FourAxisModel FourAxisModel::point_mass(const DeterministicAssignment& assignment)
{
    FourAxisModel m;
    m.weights[assignment_index(assignment)] = 1.0;
    return m;
}

FourAxisModel FourAxisModel::uniform()
{
    FourAxisModel m;
    m.weights.fill(1.0 / static_cast<double>(kAssignmentCount));
    return m;
}

PairProbabilities pair_probabilities(const FourAxisModel& model, FirstSetting first,
                                     SecondSetting second)
{
    model.validate();
    PairProbabilities out;
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        const auto s = assignment_at(i);
        out.at(first_outcome(s, first), second_outcome(s, second)) += model.weights[i];
    }
    return out;
}

int three_term_sum(const DeterministicAssignment& s) noexcept
{
    return value(s.a) * value(s.b) + value(s.a) * value(s.b_prime) +
           value(s.a_prime) * value(s.b);
}

int bell_functional(const DeterministicAssignment& s) noexcept
{
    int v = three_term_sum(s);
    if (s.a_prime == Outcome::plus && s.b_prime == Outcome::plus) {
        v -= 2;
    }
    if (s.a_prime == Outcome::minus && s.b_prime == Outcome::minus) {
        v -= 2;
    }
    if (s.a_prime != Outcome::zero) {
        v += 1;
    }
    if (s.b_prime != Outcome::zero) {
        v += 1;
    }
    return v;
}

double mixture_functional(const FourAxisModel& model)
{
    model.validate();
    double total = 0.0;
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        total += model.weights[i] * bell_functional(assignment_at(i));
    }
    return total;
}

const std::array<CaseBound, 9>& stated_case_bounds()
{
    using enum Outcome;
    static const std::array<CaseBound, 9> bounds{{
        {plus, plus, 0, -1},    // (i)
        {minus, minus, 0, -1},  // (ii)
        {plus, minus, 0, -3},   // (iii)
        {minus, plus, 0, -3},   // (iv)
        {plus, zero, 0, -2},    // (v)
        {minus, zero, 0, -2},   // (vi)
        {zero, plus, 0, -2},    // (vii)
        {zero, minus, 0, -2},   // (viii)
        {zero, zero, 0, -1},    // (ix)
    }};
    return bounds;
}

TheoremReport verify_theorem(unsigned workers)
{
    workers = std::clamp(workers, 1u, static_cast<unsigned>(kAssignmentCount));

    TheoremReport report;
    // Each worker owns a disjoint slice of `values`; the minimum is taken afterwards.
    std::vector<std::thread> pool;
    const std::size_t per = (kAssignmentCount + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * per;
        const std::size_t end = std::min(kAssignmentCount, begin + per);
        pool.emplace_back([&report, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                report.values[i] = bell_functional(assignment_at(i));
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }

    report.min_functional_value = *std::min_element(report.values.begin(), report.values.end());
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        if (report.values[i] == report.min_functional_value) {
            report.argmin_assignments.push_back(assignment_at(i));
        }
    }

    report.case_bounds_match = true;
    report.case_bounds = stated_case_bounds();
    for (auto& cb : report.case_bounds) {
        int best = std::numeric_limits<int>::max();
        for (Outcome a : kOutcomes) {
            for (Outcome b : kOutcomes) {
                best = std::min(best, three_term_sum({a, cb.a_prime, b, cb.b_prime}));
            }
        }
        cb.minimum = best;
        report.case_bounds_match = report.case_bounds_match && best == cb.expected_minimum;
    }

    report.all_satisfied = report.min_functional_value >= -1.0 - 1e-12;
    return report;
}

FourAxisModel random_model(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    FourAxisModel m;
    double sum = 0.0;
    for (double& w : m.weights) {
        // 53-bit uniform in [0, 1); 1 - u is in (0, 1] so the log is finite.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        w = -std::log1p(-u);
        sum += w;
    }
    for (double& w : m.weights) {
        w /= sum;
    }
    return m;
}

FourAxisModel load_model(std::istream& in)
{
    FourAxisModel m;
    std::array<bool, kAssignmentCount> seen{};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) {
            continue;
        }
        double weight = 0.0;
        std::string extra;
        if (!(fields >> weight) || (fields >> extra)) {
            throw ValidationError("model file line " + std::to_string(line_no) +
                                  ": expected 'KEY WEIGHT'");
        }
        const auto idx = assignment_index(assignment_from_key(key));
        if (seen[idx]) {
            throw ValidationError("model file: duplicate key '" + key + "'");
        }
        if (!(weight >= 0.0) || !std::isfinite(weight)) {
            throw ValidationError("model file: negative weight for '" + key + "'");
        }
        seen[idx] = true;
        m.weights[idx] = weight;
    }
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        if (!seen[i]) {
            throw ValidationError("model file: missing key '" + assignment_key(assignment_at(i)) +
                                  "'");
        }
    }
    double sum = 0.0;
    for (double w : m.weights) {
        sum += w;
    }
    if (std::abs(sum - 1.0) > kModelFileTolerance) {
        throw ValidationError("model file: weights sum to " + std::to_string(sum));
    }
    // Absorb the permitted slack so downstream validation sees an exact distribution.
    for (double& w : m.weights) {
        w /= sum;
    }
    return m;
}

FourAxisModel load_model_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open model file " + path.string());
    }
    return load_model(in);
}

void save_model(std::ostream& out, const FourAxisModel& model)
{
    std::ostringstream buf;
    buf.precision(17);
    buf << "# a a' b b' weight\n";
    for (std::size_t i = 0; i < kAssignmentCount; ++i) {
        buf << assignment_key(assignment_at(i)) << ' ' << model.weights[i] << '\n';
    }
    out << buf.str();
}

}  // namespace belltest::lhv
