#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ensplace/ensemble.hpp"
#include "ensplace/error.hpp"
#include "ensplace/json_out.hpp"
#include "ensplace/simulation.hpp"

namespace ensplace::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;  // numeric failure, strict divergence, I/O
inline constexpr int kExitInvalid = 2;  // validation failure, bad config or command line

class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

enum class InitialProfile { ones, inverse_b, random, basis };

struct SimulationSettings {
    TrajectoryConfig trajectory;
    bool dt_auto = true;  // use the integrator's stable-step ceiling
    InitialProfile initial = InitialProfile::ones;
    std::size_t basis_index = 1;
    std::uint64_t seed = 1;
};

struct RunConfig {
    EnsembleSpec ensemble;  // ensemble.N holds the materialised length M
    TargetSpec targets;
    std::size_t N = 16;
    std::size_t M = 0;
    SimulationSettings simulation;
    std::string synth_mode = "truncated_infinite";
    std::vector<double> d_grid{1.5, 2.5};
    std::filesystem::path output_dir = "out";
    bool write_json = true;
    bool write_csv = true;
    bool strict = false;
};

/// Reads a JSON document; throws ConfigError on parse failure, IoError when
/// the file cannot be read.
Json load_config_document(const std::filesystem::path& path);

/// Applies "dotted.path=value". The value is parsed as JSON and taken as a
/// plain string when that fails. Intermediate objects are created.
void apply_override(Json& doc, const std::string& assignment);

/// Interprets a config tree. Throws ConfigError on unknown keys, wrong types
/// or violated invariants (N <= M, N >= 1).
RunConfig parse_config(const Json& doc);

/// Entry point shared by the executable and the end-to-end tests. args
/// excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ReportOutcome {
    std::vector<std::string> present;
    std::vector<std::string> missing;
};

/// Aggregates whatever artifacts exist in dir into report.md and
/// summary.json; missing artifacts are listed, not fatal.
ReportOutcome write_report(const std::filesystem::path& dir);

}  // namespace ensplace::cli
