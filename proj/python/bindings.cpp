#include "belltest/evaluate.hpp"
#include "belltest/lhv.hpp"
#include "belltest/montecarlo.hpp"
#include "belltest/optimizer.hpp"
#include "belltest/qm.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace belltest;

namespace {

SettingsQuad to_quad(const std::array<double, 4>& axes)
{
    return {AngleDeg(axes[0]), AngleDeg(axes[1]), AngleDeg(axes[2]), AngleDeg(axes[3])};
}

std::array<double, 4> from_quad(const SettingsQuad& q)
{
    return {q.a.degrees(), q.b.degrees(), q.a_prime.degrees(), q.b_prime.degrees()};
}

qm::CascadeGeometry make_geometry(double eta, double phi, std::optional<double> F)
{
    qm::CascadeGeometry g;
    g.eta = eta;
    g.phi_deg = phi;
    g.F_override = F;
    g.validate();
    return g;
}

// "qm-ideal", "qm-real" or "lhv"; the LHV weights follow the canonical
// assignment order.
Source make_source(const std::string& kind, double eta, double phi, std::optional<double> F,
                   const std::optional<std::vector<double>>& weights)
{
    if (kind == "qm-ideal") {
        return QmIdealSource{};
    }
    if (kind == "qm-real") {
        return QmRealSource{make_geometry(eta, phi, F)};
    }
    if (kind == "lhv") {
        if (!weights || weights->size() != lhv::kAssignmentCount) {
            throw ValidationError("lhv source needs 81 weights");
        }
        lhv::FourAxisModel m;
        std::copy(weights->begin(), weights->end(), m.weights.begin());
        m.validate();
        return LhvSource{m};
    }
    throw ValidationError("source must be qm-ideal, qm-real or lhv");
}

py::dict report_dict(const InequalityReport& r)
{
    py::dict d;
    d["name"] = r.name;
    d["lhs"] = r.lhs;
    d["bound"] = r.bound;
    d["sense"] = r.sense == BoundSense::lower ? "lhs>=bound" : "lhs<=bound";
    d["margin"] = r.margin;
    d["violation_factor"] = r.violation_factor;
    d["violated"] = r.violated;
    return d;
}

py::dict rates_dict(const DetectionRates& r)
{
    py::dict d;
    d["pp"] = r.pp;
    d["pm"] = r.pm;
    d["mp"] = r.mp;
    d["mm"] = r.mm;
    d["plus1"] = r.plus1;
    d["minus1"] = r.minus1;
    d["plus2"] = r.plus2;
    d["minus2"] = r.minus2;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Ternary-outcome Bell inequality toolkit";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DivisionUndefinedError>(m, "DivisionUndefinedError", PyExc_ZeroDivisionError);
    py::register_exception<InfeasibleModelError>(m, "InfeasibleModelError", PyExc_ValueError);
    py::register_exception<mc::InsufficientStatisticsError>(m, "InsufficientStatisticsError",
                                                            PyExc_RuntimeError);

    m.def("solid_angle", &qm::solid_angle, py::arg("phi_deg"));
    m.def("angular_correlation", &qm::angular_correlation, py::arg("phi_deg"));
    m.def("depolarization", &qm::depolarization, py::arg("phi_deg"));
    m.def(
        "detection_rates",
        [](double a, double b, double eta, double phi, std::optional<double> F) {
            return rates_dict(qm::detection_rates(AngleDeg(a), AngleDeg(b), make_geometry(eta, phi, F)));
        },
        py::arg("a"), py::arg("b"), py::arg("eta") = 0.2, py::arg("phi_deg") = 30.0,
        py::arg("F") = py::none());
    m.def(
        "T0", [](double eta, double phi) { return qm::qm_T0(make_geometry(eta, phi, std::nullopt)); },
        py::arg("eta") = 0.2, py::arg("phi_deg") = 30.0);
    m.def(
        "t0", [](double eta, double phi) { return qm::qm_t0(make_geometry(eta, phi, std::nullopt)); },
        py::arg("eta") = 0.2, py::arg("phi_deg") = 30.0);

    m.def(
        "verify_theorem",
        [](unsigned workers) {
            const auto r = lhv::verify_theorem(workers);
            py::dict d;
            py::dict values;
            for (std::size_t i = 0; i < r.values.size(); ++i) {
                values[py::str(lhv::assignment_key(lhv::assignment_at(i)))] = r.values[i];
            }
            py::list argmin;
            for (const auto& s : r.argmin_assignments) {
                argmin.append(lhv::assignment_key(s));
            }
            py::list cases;
            for (const auto& c : r.case_bounds) {
                cases.append(c.minimum);
            }
            d["functional_values"] = values;
            d["min_functional_value"] = r.min_functional_value;
            d["argmin_assignments"] = argmin;
            d["case_bounds"] = cases;
            d["all_satisfied"] = r.all_satisfied;
            d["case_bounds_match"] = r.case_bounds_match;
            return d;
        },
        py::arg("workers") = 1);
    m.def("random_model", [](std::uint64_t seed) {
        const auto w = lhv::random_model(seed).weights;
        return std::vector<double>(w.begin(), w.end());
    });

    m.def("quad_from_differences",
          [](double d1, double d2, double d3, double d4) {
              return from_quad(quad_from_differences(d1, d2, d3, d4));
          },
          py::arg("d_ab"), py::arg("d_bpa"), py::arg("d_bap"), py::arg("d_apbp") = 0.0);
    m.def("differences", [](const std::array<double, 4>& axes) { return differences(to_quad(axes)); });

    m.def(
        "evaluate",
        [](const std::string& ineq, const std::array<double, 4>& axes, const std::string& source,
           double eta, double phi, std::optional<double> F,
           std::optional<std::vector<double>> weights) {
            return report_dict(
                evaluate(parse_inequality(ineq), make_source(source, eta, phi, F, weights), to_quad(axes)));
        },
        py::arg("ineq"), py::arg("axes"), py::arg("source") = "qm-ideal", py::arg("eta") = 0.2,
        py::arg("phi_deg") = 30.0, py::arg("F") = py::none(), py::arg("weights") = py::none());
    m.def("chsh", [](double a, double b, double c, double d) { return report_dict(chsh(a, b, c, d)); });
    m.def("excess_violation_ratio", &excess_violation_ratio, py::arg("factor_new"), py::arg("factor_ref"));

    m.def(
        "run_mc",
        [](const std::array<double, 4>& axes, std::int64_t pairs, std::uint64_t seed, const std::string& source,
           double eta, double phi, std::optional<double> F, std::optional<std::vector<double>> weights,
           unsigned workers) {
            mc::RunPlan plan;
            plan.quad = to_quad(axes);
            plan.pairs_per_setting = pairs;
            plan.seed = seed;
            plan.source = make_source(source, eta, phi, F, weights);
            const auto counters = mc::run_experiment(plan, workers);
            py::dict out;
            for (const auto& [pair, c] : counters) {
                py::dict cells;
                for (const auto& cell : mc::dump_cells()) {
                    cells[cell.name] = c.at(cell.first, cell.second);
                }
                cells["n_emitted"] = c.n_emitted;
                out[label(pair)] = cells;
            }
            const auto est = mc::evaluate_31_from_counts(counters.at(SettingPair::a_b),
                                                         counters.at(SettingPair::ap_bp));
            py::dict result = report_dict(est.report);
            result["std_error"] = est.std_error;
            result["sigma_distance"] = est.sigma_distance ? py::cast(*est.sigma_distance) : py::none();
            result["counters"] = out;
            return result;
        },
        py::arg("axes"), py::arg("pairs"), py::arg("seed") = 42, py::arg("source") = "qm-real",
        py::arg("eta") = 0.2, py::arg("phi_deg") = 30.0, py::arg("F") = py::none(),
        py::arg("weights") = py::none(), py::arg("workers") = 1);

    m.def(
        "grid_scan",
        [](const std::string& ineq, const std::string& source, double step, int rounds, bool untie,
           double eta, double phi, std::optional<double> F, unsigned workers) {
            opt::ScanOptions o;
            o.step_deg = step;
            o.refine_rounds = rounds;
            o.tie_b_prime_to_a_prime = !untie;
            o.workers = workers;
            const auto r = opt::grid_scan(parse_inequality(ineq),
                                          make_source(source, eta, phi, F, std::nullopt), o);
            py::dict d;
            d["best_quad"] = from_quad(r.best_quad);
            d["best_differences"] = differences(r.best_quad);
            d["best_lhs"] = r.best_lhs;
            d["best_factor"] = r.best_factor;
            return d;
        },
        py::arg("ineq") = "ardehali10", py::arg("source") = "qm-ideal", py::arg("step_deg") = 1.0,
        py::arg("refine_rounds") = 6, py::arg("untie_b_prime") = false, py::arg("eta") = 0.2,
        py::arg("phi_deg") = 30.0, py::arg("F") = py::none(), py::arg("workers") = 1);
}
