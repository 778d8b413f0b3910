#include "belltest/optimizer.hpp"

#include "belltest/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace belltest::opt {

namespace {

constexpr double kTieTolerance = 1e-12;

auto key(const SettingsQuad& q)
{
    return std::make_tuple(q.a.degrees(), q.b.degrees(), q.a_prime.degrees(), q.b_prime.degrees());
}

bool better(double lhs, const SettingsQuad& quad, double best_lhs, const SettingsQuad& best_quad)
{
    if (lhs < best_lhs - kTieTolerance) {
        return true;
    }
    return lhs <= best_lhs + kTieTolerance && key(quad) < key(best_quad);
}

SettingsQuad make_quad(double b, double a_prime, double b_prime)
{
    return {AngleDeg(0.0), AngleDeg(b), AngleDeg(a_prime), AngleDeg(b_prime)};
}

/// Evaluates every candidate (in parallel when asked) and then reduces in
/// candidate order, so the outcome never depends on the worker count.
void scan_candidates(const std::vector<SettingsQuad>& candidates, InequalityId id,
                     const Source& source, unsigned workers, ScanResult& result, bool& have_best,
                     bool keep_surface)
{
    std::vector<double> values(candidates.size());
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(candidates.size())));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < candidates.size(); i += workers) {
            values[i] = objective(candidates[i], id, source);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!have_best || better(values[i], candidates[i], result.best_lhs, result.best_quad)) {
            result.best_lhs = values[i];
            result.best_quad = candidates[i];
            have_best = true;
        }
        if (keep_surface) {
            result.surface.push_back({candidates[i], values[i]});
        }
    }
}

std::vector<double> grid_axis(double step)
{
    std::vector<double> out;
    for (long k = 0;; ++k) {
        const double v = static_cast<double>(k) * step;
        if (v >= 180.0) {
            break;
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace

double objective(const SettingsQuad& quad, InequalityId id, const Source& source)
{
    if (std::holds_alternative<LhvSource>(source)) {
        throw ValidationError("the optimizer scans quantum sources only");
    }
    switch (id) {
    case InequalityId::ardehali10:
    case InequalityId::ardehali28:
    case InequalityId::bell65: return evaluate(id, source, quad).lhs;
    default: break;
    }
    throw ValidationError(std::string("cannot scan inequality ") + name(id) +
                          "; use ardehali10, ardehali28 or bell65");
}

ScanResult grid_scan(InequalityId id, const Source& source, const ScanOptions& options)
{
    if (!(options.step_deg > 0.0 && options.step_deg <= 45.0)) {
        std::ostringstream msg;
        msg << "scan step " << options.step_deg << " deg outside (0, 45]";
        throw ValidationError(msg.str());
    }
    if (options.refine_rounds < 0) {
        throw ValidationError("refinement rounds must be nonnegative");
    }
    // Fail fast on an unsupported inequality or source.
    (void)objective(make_quad(0.0, 0.0, 0.0), id, source);

    ScanResult result;
    bool have_best = false;
    const bool tied = options.tie_b_prime_to_a_prime;

    const auto axis = grid_axis(options.step_deg);
    std::vector<SettingsQuad> candidates;
    for (double b : axis) {
        for (double ap : axis) {
            if (tied) {
                candidates.push_back(make_quad(b, ap, ap));
            } else {
                for (double bp : axis) {
                    candidates.push_back(make_quad(b, ap, bp));
                }
            }
        }
    }
    scan_candidates(candidates, id, source, options.workers, result, have_best,
                    options.keep_surface);

    double step = options.step_deg;
    for (int round = 0; round < options.refine_rounds; ++round) {
        step *= 0.5;
        const SettingsQuad centre = result.best_quad;
        candidates.clear();
        for (int i = -2; i <= 2; ++i) {
            for (int j = -2; j <= 2; ++j) {
                const double b = centre.b.degrees() + i * step;
                const double ap = centre.a_prime.degrees() + j * step;
                if (tied) {
                    candidates.push_back(make_quad(b, ap, ap));
                } else {
                    for (int k = -2; k <= 2; ++k) {
                        candidates.push_back(make_quad(b, ap, centre.b_prime.degrees() + k * step));
                    }
                }
            }
        }
        scan_candidates(candidates, id, source, options.workers, result, have_best,
                        options.keep_surface);
    }

    result.best_factor = evaluate(id, source, result.best_quad).violation_factor;
    return result;
}

void write_surface_csv(std::ostream& out, const ScanResult& result)
{
    std::ostringstream buf;
    buf << "a,b,a_prime,b_prime,lhs\n";
    for (const auto& s : result.surface) {
        buf << format_double(s.quad.a.degrees()) << ',' << format_double(s.quad.b.degrees()) << ','
            << format_double(s.quad.a_prime.degrees()) << ','
            << format_double(s.quad.b_prime.degrees()) << ',' << format_double(s.lhs) << '\n';
    }
    out << buf.str();
}

}  // namespace belltest::opt
