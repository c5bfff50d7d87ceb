#pragma once

#include "oppenheim/model.hpp"
#include "oppenheim/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace oppenheim::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestSchema = "oppenheim.manifest.v1";
inline constexpr const char* kCheckpointSchema = "oppenheim.checkpoints.v1";
inline constexpr const char* kReportSchema = "oppenheim.report.v1";

/// Exit-code contract.
enum ExitCode : int { ok = 0, failure = 1, config_error = 2 };

/// The last three powers of ten not above n, with n appended when it is not one
/// of them (n = 10^6 gives 10^4, 10^5, 10^6).
std::vector<std::uint64_t> default_checkpoints(std::uint64_t n);

struct SimulateOptions {
    std::string model_source;
    std::string model_text;
    Backend backend = Backend::lattice;
    std::uint64_t n = 1'000'000;
    std::size_t paths = 30;
    std::uint64_t seed = 7;
    std::size_t trim = 2;
    double power = 2.5;
    std::vector<std::uint64_t> checkpoints;
    double tau = 1.0;
    std::string out;
    std::string manifest;
    unsigned threads = 1;
};

struct VerifyOptions {
    std::string suite = "all";
    std::string model_source;
    std::string model_text;
    Backend backend = Backend::lattice;
    std::uint64_t n = 1'000'000;
    std::vector<std::uint64_t> checkpoints;
    std::size_t paths = 30;
    std::size_t samples = 100'000;
    std::size_t trim = 2;
    double power = 2.5;
    std::uint64_t seed = 7;
    double tau = 1.0;
    double significance = 1e-3;
    double th1_tolerance = 0.2;
    std::size_t slot = 1;
    std::string out;
    std::string manifest;
    unsigned threads = 1;
};

nlohmann::ordered_json to_json(const SimulateOptions& options);
nlohmann::ordered_json to_json(const VerifyOptions& options);
SimulateOptions simulate_options_from_json(const nlohmann::json& j);
VerifyOptions verify_options_from_json(const nlohmann::json& j);

/// A model file path, or one of the built-in names luroth, engel, sylvester.
/// Returns the canonical model text.
std::string resolve_model_text(const std::string& source);

/// The command bodies. Each writes its artifact to options.out (stdout when
/// empty), diagnostics to `err`, and a manifest when options.manifest is set.
int cmd_expand(const std::string& scheme, const std::string& x, std::size_t max_digits, std::ostream& out,
               std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);
/// Re-runs the command recorded in a manifest; `out_override` redirects the artifact.
int cmd_replay(const std::string& manifest_path, const std::optional<std::string>& out_override, std::ostream& out,
               std::ostream& err);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace oppenheim::cli
