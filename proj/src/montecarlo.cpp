#include "belltest/montecarlo.hpp"

#include "belltest/format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <thread>
#include <vector>

namespace belltest::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Conditional-binomial multinomial draw. `probs` must sum to one; the last
/// category takes whatever is left.
void draw_multinomial(std::mt19937_64& rng, std::int64_t n, std::span<const double> probs,
                      std::span<std::int64_t> counts)
{
    std::vector<double> tail(probs.size() + 1, 0.0);
    for (std::size_t k = probs.size(); k-- > 0;) {
        tail[k] = tail[k + 1] + probs[k];
    }
    std::int64_t remaining = n;
    for (std::size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
        const double p = tail[k] > 0.0 ? probs[k] / tail[k] : 0.0;
        std::int64_t drawn = 0;
        if (p >= 1.0) {
            drawn = remaining;
        } else if (p > 0.0) {
            drawn = std::binomial_distribution<std::int64_t>(remaining, p)(rng);
        }
        counts[k] += drawn;
        remaining -= drawn;
    }
    counts[probs.size() - 1] += remaining;
}

std::int64_t chunk_length(std::int64_t n, std::int64_t chunk)
{
    return std::min(kChunkSize, n - chunk * kChunkSize);
}

/// Runs `body(chunk)` for every chunk on `workers` threads and sums the
/// per-chunk counters. Integer addition makes the total independent of the
/// assignment of chunks to threads.
template <class ChunkFn>
CoincidenceCounters run_chunks(std::int64_t chunk_begin, std::int64_t chunk_end,
                               unsigned workers, ChunkFn body)
{
    const std::int64_t chunks = std::max<std::int64_t>(0, chunk_end - chunk_begin);
    workers = static_cast<unsigned>(
        std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(1, chunks)));

    std::vector<CoincidenceCounters> partial(workers);
    auto work = [&](unsigned w) {
        for (std::int64_t c = chunk_begin + w; c < chunk_end; c += workers) {
            partial[w] += body(c);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    CoincidenceCounters total;
    for (const auto& p : partial) {
        total += p;
    }
    return total;
}

CoincidenceCounters event_chunk(const std::array<double, 9>& probs, std::int64_t n,
                                std::uint64_t seed, std::int64_t chunk)
{
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(chunk)));
    std::array<std::int64_t, 9> counts{};
    const auto len = chunk_length(n, chunk);
    draw_multinomial(rng, len, probs, counts);
    CoincidenceCounters out;
    out.n_emitted = len;
    for (std::size_t k = 0; k < 9; ++k) {
        out.n[k / 3][k % 3] = counts[k];
    }
    return out;
}

void require_emissions(std::int64_t n)
{
    if (n < 1) {
        throw ValidationError("number of emissions must be at least 1");
    }
}

std::array<double, 9> flatten(const PairProbabilities& p)
{
    std::array<double, 9> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            out[3 * i + j] = p.cells[i][j];
        }
    }
    return out;
}

constexpr std::size_t cell(Outcome first, Outcome second)
{
    return 3 * index(first) + index(second);
}

// A ratio of two linear functions of the nine cell frequencies, with a weight.
struct LinearRatio {
    std::array<double, 9> num{};
    std::array<double, 9> den{};
    double coeff = 1.0;
};

LinearRatio expectation_over_total(double coeff)
{
    using enum Outcome;
    LinearRatio r;
    r.coeff = coeff;
    r.num[cell(plus, plus)] = 1.0;
    r.num[cell(minus, minus)] = 1.0;
    r.num[cell(plus, minus)] = -1.0;
    r.num[cell(minus, plus)] = -1.0;
    for (auto c : {cell(plus, plus), cell(plus, minus), cell(minus, plus), cell(minus, minus)}) {
        r.den[c] = 1.0;
    }
    return r;
}

LinearRatio double_over_total(Outcome o, double coeff)
{
    LinearRatio r = expectation_over_total(coeff);
    r.num.fill(0.0);
    r.num[cell(o, o)] = 1.0;
    return r;
}

// Single-side detections of `o` over all detections on the chosen sides.
// Weights select side 1 (rows), side 2 (columns) or an average of both.
LinearRatio single_over_total(Outcome o, double w1, double w2, double coeff)
{
    using enum Outcome;
    LinearRatio r;
    r.coeff = coeff;
    for (Outcome other : kOutcomes) {
        r.num[cell(o, other)] += w1;
        r.num[cell(other, o)] += w2;
        for (Outcome detected : {plus, minus}) {
            r.den[cell(detected, other)] += w1;
            r.den[cell(other, detected)] += w2;
        }
    }
    return r;
}

/// Delta-method variance of sum(coeff * ratio) for one multinomial counter:
/// (1/N) [sum g_k^2 p_k - (sum g_k p_k)^2] with g the gradient in p.
double delta_variance(const CoincidenceCounters& c, std::span<const LinearRatio> terms)
{
    std::array<double, 9> p{};
    for (std::size_t k = 0; k < 9; ++k) {
        p[k] = static_cast<double>(c.n[k / 3][k % 3]) / static_cast<double>(c.n_emitted);
    }
    std::array<double, 9> g{};
    for (const auto& t : terms) {
        const double num = std::inner_product(t.num.begin(), t.num.end(), p.begin(), 0.0);
        const double den = std::inner_product(t.den.begin(), t.den.end(), p.begin(), 0.0);
        const double ratio = num / den;
        for (std::size_t k = 0; k < 9; ++k) {
            g[k] += t.coeff * (t.num[k] - ratio * t.den[k]) / den;
        }
    }
    double second = 0.0;
    double first = 0.0;
    for (std::size_t k = 0; k < 9; ++k) {
        second += g[k] * g[k] * p[k];
        first += g[k] * p[k];
    }
    return std::max(0.0, second - first * first) / static_cast<double>(c.n_emitted);
}

EstimatedReport finish(InequalityReport report, double variance)
{
    EstimatedReport out;
    out.report = std::move(report);
    out.std_error = std::sqrt(variance);
    if (out.std_error > 0.0) {
        out.sigma_distance = out.report.margin / out.std_error;
    }
    return out;
}

void require_coincidences(const CoincidenceCounters& c, const char* where)
{
    using enum Outcome;
    if (c.n_emitted < 1) {
        throw InsufficientStatisticsError(std::string("no emissions at ") + where);
    }
    const auto doubles = c.at(plus, plus) + c.at(plus, minus) + c.at(minus, plus) +
                         c.at(minus, minus);
    if (doubles == 0) {
        throw InsufficientStatisticsError(std::string("no coincidences at ") + where);
    }
}

}  // namespace

CoincidenceCounters& CoincidenceCounters::operator+=(const CoincidenceCounters& other)
{
    n_emitted += other.n_emitted;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            n[i][j] += other.n[i][j];
        }
    }
    return *this;
}

void CoincidenceCounters::validate() const
{
    std::int64_t sum = 0;
    for (const auto& row : n) {
        for (auto v : row) {
            if (v < 0) {
                throw ValidationError("negative coincidence count");
            }
            sum += v;
        }
    }
    if (sum != n_emitted || n_emitted < 0) {
        throw ValidationError("counts do not add up to the number of emissions");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::int64_t chunk_count(std::int64_t n) noexcept
{
    return n <= 0 ? 0 : (n + kChunkSize - 1) / kChunkSize;
}

CoincidenceCounters sample_chunks(const qm::EventDistribution& dist, std::int64_t n,
                                  std::uint64_t seed, std::int64_t chunk_begin,
                                  std::int64_t chunk_end)
{
    require_emissions(n);
    dist.cells.validate();
    const auto probs = flatten(dist.cells);
    chunk_end = std::min(chunk_end, chunk_count(n));
    return run_chunks(chunk_begin, chunk_end, 1, [&](std::int64_t c) { return event_chunk(probs, n, seed, c); });
}

CoincidenceCounters sample_pair_events(const qm::EventDistribution& dist, std::int64_t n,
                                       std::uint64_t seed, unsigned workers)
{
    require_emissions(n);
    dist.cells.validate();
    const auto probs = flatten(dist.cells);
    return run_chunks(0, chunk_count(n), workers, [&](std::int64_t c) { return event_chunk(probs, n, seed, c); });
}

CoincidenceCounters sample_lhv_events(const lhv::FourAxisModel& model, SettingPair pair,
                                      std::int64_t n, std::uint64_t seed, unsigned workers)
{
    require_emissions(n);
    model.validate();
    const auto [side1, side2] = lhv_sides(pair);
    return run_chunks(0, chunk_count(n), workers, [&](std::int64_t c) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        std::array<std::int64_t, lhv::kAssignmentCount> drawn{};
        const auto len = chunk_length(n, c);
        draw_multinomial(rng, len, model.weights, drawn);
        CoincidenceCounters out;
        out.n_emitted = len;
        for (std::size_t i = 0; i < lhv::kAssignmentCount; ++i) {
            const auto s = lhv::assignment_at(i);
            out.at(lhv::first_outcome(s, side1), lhv::second_outcome(s, side2)) += drawn[i];
        }
        return out;
    });
}

RateEstimate estimate_rates(const CoincidenceCounters& c)
{
    if (c.n_emitted < 1) {
        throw ValidationError("estimate_rates needs at least one emission");
    }
    c.validate();
    using enum Outcome;
    const double N = static_cast<double>(c.n_emitted);
    auto row = [&](Outcome o) { return c.at(o, plus) + c.at(o, zero) + c.at(o, minus); };
    auto col = [&](Outcome o) { return c.at(plus, o) + c.at(zero, o) + c.at(minus, o); };
    auto freq = [&](std::int64_t k) { return static_cast<double>(k) / N; };
    auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / N); };

    RateEstimate out;
    auto& r = out.rates;
    r.pp = freq(c.at(plus, plus));
    r.pm = freq(c.at(plus, minus));
    r.mp = freq(c.at(minus, plus));
    r.mm = freq(c.at(minus, minus));
    r.plus1 = freq(row(plus));
    r.minus1 = freq(row(minus));
    r.plus2 = freq(col(plus));
    r.minus2 = freq(col(minus));
    out.std_errors = {se(r.pp),    se(r.pm),     se(r.mp),    se(r.mm),
                      se(r.plus1), se(r.minus1), se(r.plus2), se(r.minus2)};
    return out;
}

void RunPlan::validate() const
{
    if (pairs_per_setting < 1) {
        throw ValidationError("pairs per setting must be at least 1");
    }
    if (const auto* real = std::get_if<QmRealSource>(&source)) {
        real->geometry.validate();
    } else if (const auto* local = std::get_if<LhvSource>(&source)) {
        local->model.validate();
    }
}

RunCounters run_experiment(const RunPlan& plan, unsigned workers)
{
    plan.validate();
    RunCounters out;
    for (SettingPair pair : kSettingPairs) {
        const auto seed = derive_seed(plan.seed, static_cast<std::uint64_t>(pair));
        if (const auto* local = std::get_if<LhvSource>(&plan.source)) {
            out[pair] = sample_lhv_events(local->model, pair, plan.pairs_per_setting, seed, workers);
        } else {
            const qm::EventDistribution dist{source_events(plan.source, plan.quad, pair)};
            out[pair] = sample_pair_events(dist, plan.pairs_per_setting, seed, workers);
        }
    }
    return out;
}

EstimatedReport evaluate_31_from_counts(const CoincidenceCounters& at_120,
                                        const CoincidenceCounters& at_0)
{
    require_coincidences(at_120, "the 120 degree pair");
    require_coincidences(at_0, "the 0 degree pair");
    const auto r120 = estimate_rates(at_120).rates;
    const auto r0 = estimate_rates(at_0).rates;

    const double d_plus = 0.5 * (r0.plus1 + r0.plus2);
    const double d_minus = 0.5 * (r0.minus1 + r0.minus2);
    const double t0 = singles_total(d_plus, d_minus);
    if (!(t0 > 0.0)) {
        throw InsufficientStatisticsError("no single detections at the 0 degree pair");
    }
    auto report = ardehali_31(detection_expectation(r120), coincidence_total(r120), r0.pp, r0.mm,
                              coincidence_total(r0), d_plus, d_minus, t0);

    const std::array<LinearRatio, 1> terms_120{expectation_over_total(3.0)};
    const std::array<LinearRatio, 4> terms_0{
        double_over_total(Outcome::plus, -2.0), double_over_total(Outcome::minus, -2.0),
        single_over_total(Outcome::plus, 0.5, 0.5, 2.0),
        single_over_total(Outcome::minus, 0.5, 0.5, 2.0)};
    const double variance = delta_variance(at_120, terms_120) + delta_variance(at_0, terms_0);
    return finish(std::move(report), variance);
}

EstimatedReport evaluate_28_from_counts(const RunCounters& counters)
{
    QuadRates rates;
    double variance = 0.0;
    for (SettingPair pair : kSettingPairs) {
        const auto it = counters.find(pair);
        if (it == counters.end()) {
            throw ValidationError(std::string("missing counters for pair ") + label(pair));
        }
        require_coincidences(it->second, label(pair));
        rates[pair] = estimate_rates(it->second).rates;
        if (pair != SettingPair::ap_bp) {
            const std::array<LinearRatio, 1> terms{expectation_over_total(1.0)};
            variance += delta_variance(it->second, terms);
        }
    }
    const auto& ap_bp = counters.at(SettingPair::ap_bp);
    if (!(rates.ap_bp.plus1 + rates.ap_bp.minus1 > 0.0) ||
        !(rates.ap_bp.plus2 + rates.ap_bp.minus2 > 0.0)) {
        throw InsufficientStatisticsError("no single detections at the (a', b') pair");
    }
    const std::array<LinearRatio, 6> terms{
        double_over_total(Outcome::plus, -2.0),        double_over_total(Outcome::minus, -2.0),
        single_over_total(Outcome::plus, 1.0, 0.0, 1.0), single_over_total(Outcome::minus, 1.0, 0.0, 1.0),
        single_over_total(Outcome::plus, 0.0, 1.0, 1.0), single_over_total(Outcome::minus, 0.0, 1.0, 1.0)};
    variance += delta_variance(ap_bp, terms);
    return finish(ardehali_28(rates), variance);
}

double bootstrap_std_error_31(const CoincidenceCounters& at_120, const CoincidenceCounters& at_0,
                              int resamples, std::uint64_t seed)
{
    if (resamples < 2) {
        throw ValidationError("bootstrap needs at least two resamples");
    }
    require_coincidences(at_120, "the 120 degree pair");
    require_coincidences(at_0, "the 0 degree pair");
    auto empirical = [](const CoincidenceCounters& c) {
        qm::EventDistribution d;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                d.cells.cells[i][j] =
                    static_cast<double>(c.n[i][j]) / static_cast<double>(c.n_emitted);
            }
        }
        return d;
    };
    const auto d120 = empirical(at_120);
    const auto d0 = empirical(at_0);

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        const auto s = derive_seed(seed, static_cast<std::uint64_t>(r));
        const auto c120 = sample_pair_events(d120, at_120.n_emitted, derive_seed(s, 0));
        const auto c0 = sample_pair_events(d0, at_0.n_emitted, derive_seed(s, 1));
        try {
            values.push_back(evaluate_31_from_counts(c120, c0).report.lhs);
        } catch (const InsufficientStatisticsError&) {
            // resample without coincidences: skipped
        }
    }
    if (values.size() < 2) {
        throw InsufficientStatisticsError("too few usable bootstrap resamples");
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

const std::array<CellName, 9>& dump_cells()
{
    using enum Outcome;
    static const std::array<CellName, 9> cells{{{"pp", plus, plus},
                                                {"pm", plus, minus},
                                                {"mp", minus, plus},
                                                {"mm", minus, minus},
                                                {"p0", plus, zero},
                                                {"0p", zero, plus},
                                                {"m0", minus, zero},
                                                {"0m", zero, minus},
                                                {"00", zero, zero}}};
    return cells;
}

void write_counters_csv(std::ostream& out, const RunCounters& counters)
{
    std::ostringstream buf;
    buf << "pair,cell,count\n";
    for (const auto& [pair, c] : counters) {
        for (const auto& cellname : dump_cells()) {
            buf << label(pair) << ',' << cellname.name << ',' << c.at(cellname.first, cellname.second)
                << '\n';
        }
    }
    out << buf.str();
}

void write_manifest(std::ostream& out, const RunPlan& plan, const RunCounters& counters)
{
    std::ostringstream buf;
    buf << "source=" << source_name(plan.source) << '\n';
    if (const auto* real = std::get_if<QmRealSource>(&plan.source)) {
        buf << "eta=" << format_double(real->geometry.eta) << '\n';
        buf << "phi_deg=" << format_double(real->geometry.phi_deg) << '\n';
        buf << "F=" << format_double(real->geometry.effective_F())
            << (real->geometry.F_override ? " (override)" : " (depolarization)") << '\n';
    }
    buf << "quad=" << format_double(plan.quad.a.degrees()) << ','
        << format_double(plan.quad.b.degrees()) << ',' << format_double(plan.quad.a_prime.degrees())
        << ',' << format_double(plan.quad.b_prime.degrees()) << '\n';
    const auto d = differences(plan.quad);
    buf << "differences=" << format_double(d[0]) << ',' << format_double(d[1]) << ','
        << format_double(d[2]) << ',' << format_double(d[3]) << '\n';
    buf << "pairs_per_setting=" << plan.pairs_per_setting << '\n';
    buf << "seed=" << plan.seed << '\n';
    buf << "chunk_size=" << kChunkSize << '\n';
    using enum Outcome;
    for (const auto& [pair, c] : counters) {
        const auto coincidences =
            c.at(plus, plus) + c.at(plus, minus) + c.at(minus, plus) + c.at(minus, minus);
        buf << "pair." << label(pair) << ".n_emitted=" << c.n_emitted << '\n';
        buf << "pair." << label(pair) << ".coincidences=" << coincidences << '\n';
    }
    out << buf.str();
}

}  // namespace belltest::mc
