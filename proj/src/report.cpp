#include "belltest/report.hpp"

#include "belltest/format.hpp"

#include <array>
#include <ostream>
#include <sstream>

namespace belltest {

Json to_json(const InequalityReport& r)
{
    Json j;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["bound"] = r.bound;
    j["sense"] = r.sense == BoundSense::lower ? "lhs>=bound" : "lhs<=bound";
    j["margin"] = r.margin;
    j["violation_factor"] = r.violation_factor;
    j["violated"] = r.violated;
    return j;
}

Json to_json(const mc::EstimatedReport& e)
{
    Json j = to_json(e.report);
    j["std_error"] = e.std_error;
    if (e.sigma_distance) {
        j["sigma_distance"] = *e.sigma_distance;
    } else {
        j["sigma_distance"] = nullptr;
    }
    return j;
}

Json to_json(const SettingsQuad& q)
{
    Json j;
    j["a"] = q.a.degrees();
    j["b"] = q.b.degrees();
    j["a_prime"] = q.a_prime.degrees();
    j["b_prime"] = q.b_prime.degrees();
    return j;
}

Json to_json(const lhv::TheoremReport& r)
{
    static constexpr std::array<const char*, 9> kCaseNames{"i",  "ii",  "iii",  "iv", "v",
                                                           "vi", "vii", "viii", "ix"};
    Json j;
    j["assignment_count"] = r.values.size();
    Json values = Json::object();
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        values[lhv::assignment_key(lhv::assignment_at(i))] = static_cast<int>(r.values[i]);
    }
    j["functional_values"] = std::move(values);
    j["min_functional_value"] = static_cast<int>(r.min_functional_value);
    Json argmin = Json::array();
    for (const auto& s : r.argmin_assignments) {
        argmin.push_back(lhv::assignment_key(s));
    }
    j["argmin_assignments"] = std::move(argmin);
    Json cases = Json::array();
    for (std::size_t i = 0; i < r.case_bounds.size(); ++i) {
        const auto& cb = r.case_bounds[i];
        Json c;
        c["case"] = kCaseNames[i];
        c["a_prime"] = std::string(1, symbol(cb.a_prime));
        c["b_prime"] = std::string(1, symbol(cb.b_prime));
        c["minimum"] = cb.minimum;
        c["stated_bound"] = cb.expected_minimum;
        cases.push_back(std::move(c));
    }
    j["case_bounds"] = std::move(cases);
    j["case_bounds_match"] = r.case_bounds_match;
    j["all_satisfied"] = r.all_satisfied;
    return j;
}

void write_report_csv(std::ostream& out, const Json& report)
{
    std::ostringstream header;
    std::ostringstream row;
    bool first = true;
    for (const auto& [k, v] : report.items()) {
        if (v.is_object() || v.is_array()) {
            continue;
        }
        if (!first) {
            header << ',';
            row << ',';
        }
        first = false;
        header << k;
        if (v.is_number_float()) {
            row << format_double(v.get<double>());
        } else if (v.is_string()) {
            row << v.get<std::string>();
        } else if (v.is_null()) {
            // empty field
        } else {
            row << v.dump();
        }
    }
    out << header.str() << '\n' << row.str() << '\n';
}

}  // namespace belltest
