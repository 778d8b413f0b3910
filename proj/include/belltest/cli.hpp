#pragma once

#include "belltest/inequalities.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace belltest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitInternal = 2;

inline constexpr const char* kSeedEnvVar = "BELLTEST_SEED";
inline constexpr std::uint64_t kDefaultSeed = 42;

/// Bad command-line input. `flag` names the offending option when known.
class UsageError : public std::runtime_error {
public:
    UsageError(std::string flag, const std::string& message)
        : std::runtime_error(message), flag_(std::move(flag))
    {
    }
    const std::string& flag() const noexcept { return flag_; }

private:
    std::string flag_;
};

// Comma-separated reals, e.g. "120,120,120".
std::vector<double> parse_list(const std::string& text, const std::string& flag);

/// `--angles a,b,a',b'` or `--diffs d1,d2,d3[,d4]` (d4 defaults to 0). At
/// most one may be given; with neither the 120/120/120/0 configuration is used.
SettingsQuad resolve_quad(const std::string& angles, const std::string& diffs);

/// Runs the command line and returns the process exit code. Reports go to
/// `out`; structured errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace belltest::cli
