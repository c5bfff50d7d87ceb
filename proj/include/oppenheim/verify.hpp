#pragma once

#include "oppenheim/model.hpp"
#include "oppenheim/sampler.hpp"
#include "oppenheim/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace oppenheim {

/// Worker count from OPPENHEIM_THREADS, else the hardware concurrency (at least 1).
unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any worker is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

struct VerifyConfig {
    std::shared_ptr<const OppenheimModel> model;
    /// Backend for the trajectory tests (th1, conv). The distributional tests
    /// always sample exact ratios.
    Backend backend = Backend::lattice;
    std::vector<std::uint64_t> checkpoints{10'000, 100'000, 1'000'000};
    std::size_t paths = 30;
    /// Sample size N of the distributional tests.
    std::size_t samples = 100'000;
    std::size_t r = 2;
    double p = 2.5;
    std::uint64_t seed = 7;
    double significance = 1e-3;
    double th1_tolerance = 0.2;
    double conv_tolerance = 1e-2;
    double max_ratio_tolerance = 0.5;
    double trend_fraction = 0.9;
    double mori_tolerance = 1e-4;
    double tau = 1.0;
    /// Position n at which single-index tests sample R_n.
    std::size_t slot = 1;
    unsigned threads = 1;

    nlohmann::ordered_json echo() const;
    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

struct TestEntry {
    std::string name;
    nlohmann::ordered_json statistics = nlohmann::ordered_json::object();
    nlohmann::ordered_json threshold = nlohmann::ordered_json::object();
    std::string provenance;
    bool pass = false;
    std::uint64_t sample_size = 0;
    double runtime_seconds = 0;
    std::string message;

    nlohmann::ordered_json to_json() const;
};

struct VerificationReport {
    nlohmann::ordered_json config_echo;
    std::vector<TestEntry> tests;
    std::uint64_t seed = 0;
    double runtime_seconds = 0;

    bool pass() const;
    nlohmann::ordered_json to_json() const;
};

TestEntry test_domination(const VerifyConfig& config);
TestEntry test_lattice_identity(const VerifyConfig& config);
TestEntry test_joint_product(const VerifyConfig& config);
TestEntry test_independence(const VerifyConfig& config);
TestEntry track_th1(const VerifyConfig& config);
TestEntry track_conv(const VerifyConfig& config);
TestEntry check_mori_hypotheses(const VerifyConfig& config);

/// domination, lattice-identity, joint, independence, th1, conv, mori.
const std::vector<std::string>& suite_names();
/// `suite` is one of suite_names() or "all". Configuration errors propagate.
VerificationReport run_suite(const VerifyConfig& config, const std::string& suite);

struct SimulationSpec {
    std::vector<std::uint64_t> checkpoints;
    std::size_t paths = 1;
    std::size_t r = 2;
    double p = 2.5;
    double tau = 1.0;
    std::uint64_t seed = 7;
    unsigned threads = 1;
};

struct SimulationResult {
    /// records[path][checkpoint]; a failed path keeps the checkpoints it reached.
    std::vector<std::vector<CheckpointRecord>> records;
    /// First failure (CapExceeded and the like), if any.
    std::optional<std::string> failure;
    bool complete() const { return !failure; }
};

/// One trajectory up to the last checkpoint, recording a CheckpointRecord at each.
std::vector<CheckpointRecord> simulate_path(const std::shared_ptr<const Sampler>& sampler, std::uint64_t seed,
                                            std::uint64_t path_id, const std::vector<std::uint64_t>& checkpoints,
                                            std::size_t r, double p, const std::vector<double>& centering);

/// Independent paths 0..paths-1; the envelope is checked before any work starts.
SimulationResult simulate_paths(const std::shared_ptr<const Sampler>& sampler, const SimulationSpec& spec);

} // namespace oppenheim
