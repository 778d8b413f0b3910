#pragma once

#include "belltest/core.hpp"
#include "belltest/evaluate.hpp"
#include "belltest/inequalities.hpp"
#include "belltest/lhv.hpp"
#include "belltest/qm.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>

namespace belltest::mc {

class InsufficientStatisticsError : public Error {
public:
    using Error::Error;
};

/// Emission counts for one setting pair. n[i][j] is indexed like
/// PairProbabilities (first photon row, second photon column).
struct CoincidenceCounters {
    std::int64_t n_emitted = 0;
    std::array<std::array<std::int64_t, 3>, 3> n{};

    std::int64_t& at(Outcome first, Outcome second) { return n[index(first)][index(second)]; }
    std::int64_t at(Outcome first, Outcome second) const { return n[index(first)][index(second)]; }

    CoincidenceCounters& operator+=(const CoincidenceCounters& other);
    friend CoincidenceCounters operator+(CoincidenceCounters lhs, const CoincidenceCounters& rhs)
    {
        lhs += rhs;
        return lhs;
    }
    friend bool operator==(const CoincidenceCounters&, const CoincidenceCounters&) = default;

    // Throws ValidationError unless the cells are nonnegative and sum to n_emitted.
    void validate() const;
};

// Emissions handled by one random stream. Fixed so results never depend on
// how chunks are spread over threads.
inline constexpr std::int64_t kChunkSize = std::int64_t{1} << 20;

/// SplitMix64-style mixing of (seed, stream) into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

std::int64_t chunk_count(std::int64_t n) noexcept;

/// Multinomial counts of `n` emissions over `dist`. Chunk c draws from
/// mt19937_64(derive_seed(seed, c)) through conditional binomials, so the
/// counters are identical for every worker count.
CoincidenceCounters sample_pair_events(const qm::EventDistribution& dist, std::int64_t n,
                                       std::uint64_t seed, unsigned workers = 1);

// Chunks [chunk_begin, chunk_end) of the run above; summing disjoint ranges
// reproduces the whole run.
CoincidenceCounters sample_chunks(const qm::EventDistribution& dist, std::int64_t n,
                                  std::uint64_t seed, std::int64_t chunk_begin,
                                  std::int64_t chunk_end);

/// Local-model emissions: every emission draws one deterministic assignment
/// from the model and the setting pair reads its two outcomes.
CoincidenceCounters sample_lhv_events(const lhv::FourAxisModel& model, SettingPair pair,
                                      std::int64_t n, std::uint64_t seed, unsigned workers = 1);

struct RateEstimate {
    DetectionRates rates;
    // Binomial sqrt(p (1 - p) / N) for each field.
    DetectionRates std_errors;
};

RateEstimate estimate_rates(const CoincidenceCounters& counters);

struct RunPlan {
    SettingsQuad quad;
    std::int64_t pairs_per_setting = 0;
    std::uint64_t seed = 0;
    Source source;

    void validate() const;
};

using RunCounters = std::map<SettingPair, CoincidenceCounters>;

/// Independent sub-experiment per setting pair, seeded with
/// derive_seed(plan.seed, pair index).
RunCounters run_experiment(const RunPlan& plan, unsigned workers = 1);

struct EstimatedReport {
    InequalityReport report;
    double std_error = 0.0;
    // margin / std_error, absent when std_error is zero.
    std::optional<double> sigma_distance;
};

/// Symmetric measurable inequality from counts at a 120 deg pair and a 0 deg
/// pair. Singles at 0 deg pool both sides. The standard error is first-order
/// (delta-method) propagation treating each counter as multinomial.
EstimatedReport evaluate_31_from_counts(const CoincidenceCounters& at_120,
                                        const CoincidenceCounters& at_0);

// The full four-pair measurable inequality, singles from the (a', b') counter.
EstimatedReport evaluate_28_from_counts(const RunCounters& counters);

/// Parametric bootstrap of the evaluate_31_from_counts standard error:
/// resample both counters from their empirical cell frequencies.
double bootstrap_std_error_31(const CoincidenceCounters& at_120, const CoincidenceCounters& at_0,
                              int resamples, std::uint64_t seed);

inline constexpr int kBootstrapResamples = 1000;

// "pp,pm,mp,mm,p0,0p,m0,0m,00" order used by the CSV dump.
struct CellName {
    const char* name;
    Outcome first;
    Outcome second;
};
const std::array<CellName, 9>& dump_cells();

/// `pair,cell,count` rows, one per setting pair and cell.
void write_counters_csv(std::ostream& out, const RunCounters& counters);

/// Plain-text echo of the plan plus per-pair totals.
void write_manifest(std::ostream& out, const RunPlan& plan, const RunCounters& counters);

}  // namespace belltest::mc
