#include "belltest/cli.hpp"

#include "belltest/evaluate.hpp"
#include "belltest/format.hpp"
#include "belltest/lhv.hpp"
#include "belltest/montecarlo.hpp"
#include "belltest/optimizer.hpp"
#include "belltest/qm.hpp"
#include "belltest/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace belltest::cli {

namespace {

struct SourceOptions {
    std::string source = "qm-ideal";
    double eta = 0.2;
    double phi = 30.0;
    std::optional<double> force_F;
    std::string model_path;
};

struct AngleOptions {
    std::string angles;
    std::string diffs;
};

void add_source_options(CLI::App& cmd, SourceOptions& opts)
{
    cmd.add_option("--source", opts.source, "qm-ideal, qm-real or lhv")
        ->capture_default_str();
    cmd.add_option("--eta", opts.eta,
                   "Detector quantum efficiency for qm-real (illustrative default)")
        ->capture_default_str();
    cmd.add_option("--phi", opts.phi,
                   "Detector half-aperture in degrees for qm-real (illustrative default)")
        ->capture_default_str();
    cmd.add_option("--force-F", opts.force_F,
                   "Override the depolarization factor F (default: 1 - 2/3 (1 - cos phi)^2)");
    cmd.add_option("--model", opts.model_path, "LHV model file for --source lhv");
}

void add_angle_options(CLI::App& cmd, AngleOptions& opts)
{
    cmd.add_option("--angles", opts.angles, "Axes a,b,a',b' in degrees");
    cmd.add_option("--diffs", opts.diffs,
                   "Differences (a-b),(b'-a),(b-a'),(a'-b') in degrees; last defaults to 0");
}

Source build_source(const SourceOptions& o)
{
    if (o.source == "qm-ideal") {
        return QmIdealSource{};
    }
    if (o.source == "qm-real") {
        qm::CascadeGeometry g;
        g.eta = o.eta;
        g.phi_deg = o.phi;
        g.F_override = o.force_F;
        if (!(g.eta > 0.0 && g.eta <= 1.0)) {
            throw UsageError("--eta", "--eta must be in (0, 1]");
        }
        if (!(g.phi_deg > 0.0 && g.phi_deg <= 90.0)) {
            throw UsageError("--phi", "--phi must be in (0, 90]");
        }
        if (g.F_override && !(*g.F_override >= 0.0 && *g.F_override <= 1.0)) {
            throw UsageError("--force-F", "--force-F must be in [0, 1]");
        }
        return QmRealSource{g};
    }
    if (o.source == "lhv") {
        if (o.model_path.empty()) {
            throw UsageError("--model", "--source lhv needs --model FILE");
        }
        try {
            return LhvSource{lhv::load_model_file(o.model_path)};
        } catch (const ValidationError& e) {
            throw UsageError("--model", e.what());
        }
    }
    throw UsageError("--source", "--source must be qm-ideal, qm-real or lhv");
}

Json source_echo(const Source& source)
{
    Json j;
    j["source"] = source_name(source);
    if (const auto* real = std::get_if<QmRealSource>(&source)) {
        j["eta"] = real->geometry.eta;
        j["phi_deg"] = real->geometry.phi_deg;
        j["F"] = real->geometry.effective_F();
        j["F_overridden"] = real->geometry.F_override.has_value();
    }
    return j;
}

Json quad_echo(const SettingsQuad& quad)
{
    Json j;
    j["axes"] = to_json(quad);
    const auto d = differences(quad);
    j["differences"] = Json::array({d[0], d[1], d[2], d[3]});
    return j;
}

void emit(std::ostream& out, const Json& report, const std::string& format)
{
    if (format == "csv") {
        write_report_csv(out, report);
    } else {
        out << report.dump(2) << '\n';
    }
}

void check_format(const std::string& format)
{
    if (format != "json" && format != "csv") {
        throw UsageError("--format", "--format must be json or csv");
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag)
{
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return v;
            }
        } catch (const std::exception&) {
        }
        throw UsageError(kSeedEnvVar, std::string(kSeedEnvVar) + " must be an unsigned integer");
    }
    return kDefaultSeed;
}

std::ofstream open_output(const std::string& path, const std::string& flag)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError(flag, "cannot write " + path);
    }
    return f;
}

void write_error(std::ostream& err, const std::string& message, const std::string& flag)
{
    Json j;
    j["error"] = message;
    if (!flag.empty()) {
        j["flag"] = flag;
    }
    err << j.dump() << '\n';
}

int cmd_verify_theorem(unsigned workers, std::ostream& out)
{
    const auto report = lhv::verify_theorem(workers);
    out << to_json(report).dump(2) << '\n';
    return report.all_satisfied && report.case_bounds_match ? kExitOk : kExitInternal;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& flag)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
                throw std::invalid_argument(item);
            }
            values.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(flag, flag + ": '" + item + "' is not a number");
        }
    }
    return values;
}

SettingsQuad resolve_quad(const std::string& angles, const std::string& diffs)
{
    if (!angles.empty() && !diffs.empty()) {
        throw UsageError("--angles", "give either --angles or --diffs, not both");
    }
    if (!angles.empty()) {
        const auto v = parse_list(angles, "--angles");
        if (v.size() != 4) {
            throw UsageError("--angles", "--angles needs four values a,b,a',b'");
        }
        return {AngleDeg(v[0]), AngleDeg(v[1]), AngleDeg(v[2]), AngleDeg(v[3])};
    }
    std::vector<double> d{120.0, 120.0, 120.0, 0.0};
    if (!diffs.empty()) {
        d = parse_list(diffs, "--diffs");
        if (d.size() == 3) {
            d.push_back(0.0);
        }
        if (d.size() != 4) {
            throw UsageError("--diffs", "--diffs needs three or four values");
        }
    }
    try {
        return quad_from_differences(d[0], d[1], d[2], d[3]);
    } catch (const ValidationError& e) {
        throw UsageError("--diffs", e.what());
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ternary-outcome Bell inequality toolkit: theorem check, quantum predictions, "
                 "Monte Carlo coincidence experiments and angle scans"};
    app.require_subcommand(1);

    unsigned theorem_workers = 1;
    auto* verify = app.add_subcommand("verify-theorem",
                                      "Enumerate all 81 deterministic assignments");
    verify->add_option("--workers", theorem_workers, "Threads for the enumeration")
        ->check(CLI::Range(1u, 81u));

    SourceOptions eval_src;
    AngleOptions eval_angles;
    std::string eval_ineq = "ardehali10";
    std::string eval_format = "json";
    auto* eval = app.add_subcommand("eval", "Evaluate an inequality from closed-form inputs");
    eval->add_option("--ineq", eval_ineq,
                     "ardehali10, ardehali14, bell65, ardehali28, ardehali31 or chsh")
        ->capture_default_str();
    add_source_options(*eval, eval_src);
    add_angle_options(*eval, eval_angles);
    eval->add_option("--format", eval_format, "json or csv")->capture_default_str();

    SourceOptions mc_src;
    mc_src.source = "qm-real";
    AngleOptions mc_angles;
    std::string mc_ineq = "ardehali31";
    std::string mc_format = "json";
    std::int64_t mc_pairs = 10'000'000;
    std::optional<std::uint64_t> mc_seed;
    unsigned mc_workers = 1;
    std::string mc_counters;
    std::string mc_manifest;
    bool mc_bootstrap = false;
    auto* mc = app.add_subcommand("mc", "Monte Carlo coincidence experiment");
    mc->add_option("--ineq", mc_ineq, "ardehali31 or ardehali28")->capture_default_str();
    add_source_options(*mc, mc_src);
    add_angle_options(*mc, mc_angles);
    mc->add_option("--pairs", mc_pairs, "Emitted pairs per setting pair")->capture_default_str();
    mc->add_option("--seed", mc_seed,
                   std::string("Master seed (default: $") + kSeedEnvVar + ", else 42)");
    mc->add_option("--workers", mc_workers, "Sampling threads; results do not depend on it")
        ->capture_default_str();
    mc->add_option("--counters", mc_counters, "Write pair,cell,count CSV here");
    mc->add_option("--manifest", mc_manifest, "Write the run manifest here");
    mc->add_flag("--bootstrap", mc_bootstrap,
                 "Add a 1000-resample parametric bootstrap standard error");
    mc->add_option("--format", mc_format, "json or csv")->capture_default_str();

    SourceOptions scan_src;
    std::string scan_ineq = "ardehali10";
    std::string scan_format = "json";
    double scan_step = 1.0;
    int scan_rounds = 6;
    bool scan_untie = false;
    unsigned scan_workers = 1;
    std::string scan_surface;
    auto* scan = app.add_subcommand("scan", "Grid search for the most violating settings");
    scan->add_option("--ineq", scan_ineq, "ardehali10, ardehali28 or bell65")
        ->capture_default_str();
    add_source_options(*scan, scan_src);
    scan->add_option("--step", scan_step, "Grid step in degrees, (0, 45]")->capture_default_str();
    scan->add_option("--rounds", scan_rounds, "Refinement rounds")->capture_default_str();
    scan->add_flag("--untie-bprime", scan_untie, "Scan b' independently of a'");
    scan->add_option("--workers", scan_workers, "Evaluation threads")->capture_default_str();
    scan->add_option("--surface", scan_surface, "Write every evaluated quad as CSV here");
    scan->add_option("--format", scan_format, "json or csv")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        write_error(err, e.what(), "");
        return kExitInvalidInput;
    }

    try {
        if (*verify) {
            return cmd_verify_theorem(theorem_workers, out);
        }

        if (*eval) {
            check_format(eval_format);
            const InequalityId id = [&] {
                try {
                    return parse_inequality(eval_ineq);
                } catch (const ValidationError& e) {
                    throw UsageError("--ineq", e.what());
                }
            }();
            const Source source = build_source(eval_src);
            const SettingsQuad quad = resolve_quad(eval_angles.angles, eval_angles.diffs);
            Json report = to_json(evaluate(id, source, quad));
            Json inputs = source_echo(source);
            inputs.update(quad_echo(quad));
            report["inputs"] = std::move(inputs);
            emit(out, report, eval_format);
            return kExitOk;
        }

        if (*mc) {
            check_format(mc_format);
            if (mc_ineq != "ardehali31" && mc_ineq != "ardehali28") {
                throw UsageError("--ineq", "mc evaluates ardehali31 or ardehali28");
            }
            if (mc_pairs < 1) {
                throw UsageError("--pairs", "--pairs must be at least 1");
            }
            if (mc_workers < 1) {
                throw UsageError("--workers", "--workers must be at least 1");
            }
            mc::RunPlan plan;
            plan.source = build_source(mc_src);
            plan.quad = resolve_quad(mc_angles.angles, mc_angles.diffs);
            plan.pairs_per_setting = mc_pairs;
            plan.seed = resolve_seed(mc_seed);

            const auto counters = mc::run_experiment(plan, mc_workers);
            mc::EstimatedReport estimated;
            std::optional<double> bootstrap;
            if (mc_ineq == "ardehali31") {
                // The three correlation pairs share one separation under the
                // symmetry assumption and are pooled.
                const auto sep = [&](SettingPair p) {
                    const auto [x, y] = axes(plan.quad, p);
                    return axis_separation(x, y);
                };
                if (std::abs(sep(SettingPair::a_b) - sep(SettingPair::bp_a)) > 1e-9 ||
                    std::abs(sep(SettingPair::a_b) - sep(SettingPair::b_ap)) > 1e-9) {
                    throw UsageError("--ineq",
                                     "ardehali31 needs equal separations at (a,b), (b',a), (b,a')");
                }
                const auto pooled = counters.at(SettingPair::a_b) + counters.at(SettingPair::bp_a) +
                                    counters.at(SettingPair::b_ap);
                estimated = mc::evaluate_31_from_counts(pooled, counters.at(SettingPair::ap_bp));
                if (mc_bootstrap) {
                    bootstrap = mc::bootstrap_std_error_31(pooled, counters.at(SettingPair::ap_bp),
                                                           mc::kBootstrapResamples,
                                                           mc::derive_seed(plan.seed, 0xB007));
                }
            } else {
                if (mc_bootstrap) {
                    throw UsageError("--bootstrap", "--bootstrap is available for ardehali31 only");
                }
                estimated = mc::evaluate_28_from_counts(counters);
            }

            Json report = to_json(estimated);
            if (bootstrap) {
                report["bootstrap_std_error"] = *bootstrap;
            }
            if (!std::holds_alternative<LhvSource>(plan.source)) {
                report["analytic_lhs"] = evaluate(parse_inequality(mc_ineq), plan.source, plan.quad).lhs;
            }
            Json inputs = source_echo(plan.source);
            inputs.update(quad_echo(plan.quad));
            inputs["pairs_per_setting"] = plan.pairs_per_setting;
            inputs["seed"] = plan.seed;
            report["inputs"] = std::move(inputs);

            if (!mc_counters.empty()) {
                auto f = open_output(mc_counters, "--counters");
                mc::write_counters_csv(f, counters);
            }
            if (!mc_manifest.empty()) {
                auto f = open_output(mc_manifest, "--manifest");
                mc::write_manifest(f, plan, counters);
            }
            emit(out, report, mc_format);
            return kExitOk;
        }

        if (*scan) {
            check_format(scan_format);
            if (!(scan_step > 0.0 && scan_step <= 45.0)) {
                throw UsageError("--step", "--step must be in (0, 45]");
            }
            if (scan_rounds < 0) {
                throw UsageError("--rounds", "--rounds must be nonnegative");
            }
            const InequalityId id = [&] {
                try {
                    return parse_inequality(scan_ineq);
                } catch (const ValidationError& e) {
                    throw UsageError("--ineq", e.what());
                }
            }();
            const Source source = build_source(scan_src);
            opt::ScanOptions options;
            options.step_deg = scan_step;
            options.refine_rounds = scan_rounds;
            options.tie_b_prime_to_a_prime = !scan_untie;
            options.keep_surface = !scan_surface.empty();
            options.workers = std::max(1u, scan_workers);
            const auto result = opt::grid_scan(id, source, options);

            Json report;
            report["name"] = name(id);
            report["best_lhs"] = result.best_lhs;
            report["best_factor"] = result.best_factor;
            const auto d = differences(result.best_quad);
            report["best_quad"] = to_json(result.best_quad);
            report["best_differences"] = Json::array({d[0], d[1], d[2], d[3]});
            Json inputs = source_echo(source);
            inputs["step_deg"] = scan_step;
            inputs["refine_rounds"] = scan_rounds;
            inputs["b_prime_tied_to_a_prime"] = options.tie_b_prime_to_a_prime;
            report["inputs"] = std::move(inputs);

            if (!scan_surface.empty()) {
                auto f = open_output(scan_surface, "--surface");
                opt::write_surface_csv(f, result);
            }
            emit(out, report, scan_format);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        write_error(err, e.what(), e.flag());
        return kExitInvalidInput;
    } catch (const Error& e) {
        write_error(err, e.what(), "");
        return kExitInvalidInput;
    }
    return kExitInvalidInput;
}

}  // namespace belltest::cli
