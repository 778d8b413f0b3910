#pragma once

#include "belltest/core.hpp"
#include "belltest/inequalities.hpp"
#include "belltest/lhv.hpp"
#include "belltest/qm.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace belltest {

enum class InequalityId { ardehali10, ardehali14, bell65, ardehali28, ardehali31, chsh };

const char* name(InequalityId id) noexcept;
InequalityId parse_inequality(std::string_view text);

struct QmIdealSource {};

struct QmRealSource {
    qm::CascadeGeometry geometry;
};

// For a local model the quad's angles are labels only: the model fixes the
// outcomes at a, a', b, b' directly.
struct LhvSource {
    lhv::FourAxisModel model;
};

using Source = std::variant<QmIdealSource, QmRealSource, LhvSource>;

const char* source_name(const Source& source) noexcept;

// Which of a/a' and b/b' a setting pair selects.
std::pair<lhv::FirstSetting, lhv::SecondSetting> lhv_sides(SettingPair pair) noexcept;

/// Per-emitted-pair detection rates at one setting pair. Ideal sources detect
/// every photon, so their rates are their probabilities with singles 1/2; a
/// local model reports its pair marginals.
DetectionRates source_rates(const Source& source, const SettingsQuad& quad, SettingPair pair);

/// Full nine-cell distribution of one emission at a setting pair.
PairProbabilities source_events(const Source& source, const SettingsQuad& quad, SettingPair pair);

/// Transmission-level statistics for the four-axis inequality. The cascade
/// model is reduced through T0 and t0 (D = T0 p, D = t0 p).
struct TransmissionStats {
    double e_ab = 0.0;
    double e_bpa = 0.0;
    double e_bap = 0.0;
    double e_apbp = 0.0;
    PairProbabilities pair_apbp;
    SinglesProbabilities singles_ap;
    SinglesProbabilities singles_bp;
};

TransmissionStats transmission_stats(const Source& source, const SettingsQuad& quad);

QuadRates quad_rates(const Source& source, const SettingsQuad& quad);

/// Evaluates one inequality at a quad from closed-form inputs. ardehali14 and
/// ardehali31 assume the three correlation pairs agree and throw
/// ValidationError otherwise. chsh subtracts the (a, b') correlation.
InequalityReport evaluate(InequalityId id, const Source& source, const SettingsQuad& quad);

}  // namespace belltest
