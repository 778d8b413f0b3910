#pragma once

#include "belltest/inequalities.hpp"
#include "belltest/lhv.hpp"
#include "belltest/montecarlo.hpp"
#include "belltest/optimizer.hpp"

#include <json.hpp>

#include <iosfwd>

namespace belltest {

using Json = nlohmann::ordered_json;

Json to_json(const InequalityReport& report);
Json to_json(const mc::EstimatedReport& estimated);
Json to_json(const lhv::TheoremReport& report);
Json to_json(const SettingsQuad& quad);

/// One header line and one value line. Optional columns are written only
/// when the report carries them.
void write_report_csv(std::ostream& out, const Json& report);

}  // namespace belltest
