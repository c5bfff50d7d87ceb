#include "oppenheim/verify.hpp"

#include "oppenheim/config.hpp"
#include "oppenheim/errors.hpp"
#include "oppenheim/hypothesis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace oppenheim {

using json = nlohmann::ordered_json;

unsigned default_threads() {
    if (const char* env = std::getenv("OPPENHEIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Configuration and report

json VerifyConfig::echo() const {
    json out;
    out["model"] = model ? serialize_model_config(*model) : "";
    out["backend"] = to_string(backend);
    out["checkpoints"] = checkpoints;
    out["paths"] = paths;
    out["samples"] = samples;
    out["r"] = r;
    out["p"] = p;
    out["seed"] = seed;
    out["significance"] = significance;
    out["th1_tolerance"] = th1_tolerance;
    out["conv_tolerance"] = conv_tolerance;
    out["max_ratio_tolerance"] = max_ratio_tolerance;
    out["trend_fraction"] = trend_fraction;
    out["mori_tolerance"] = mori_tolerance;
    out["tau"] = tau;
    out["slot"] = slot;
    return out;
}

void VerifyConfig::validate() const {
    if (!model) throw ConfigError("verify: no model given");
    if (checkpoints.empty()) throw ConfigError("verify: at least one checkpoint is required");
    if (checkpoints.front() < 2) throw ConfigError("verify: checkpoints must be >= 2");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1]) throw ConfigError("verify: checkpoints must increase strictly");
    if (paths == 0) throw ConfigError("verify: paths must be >= 1");
    if (samples == 0) throw ConfigError("verify: samples must be >= 1");
    if (r == 0) throw ConfigError("verify: r must be >= 1");
    if (!(p > 0)) throw ConfigError("verify: p must be positive");
    if (!(significance > 0 && significance < 1)) throw ConfigError("verify: significance must lie in (0,1)");
    if (!(th1_tolerance > 0)) throw ConfigError("verify: th1 tolerance must be positive");
    if (!(tau > 0)) throw ConfigError("verify: tau must be positive");
    if (slot == 0) throw ConfigError("verify: slot must be >= 1");
    if (!(trend_fraction > 0 && trend_fraction <= 1)) throw ConfigError("verify: trend fraction must lie in (0,1]");
}

json TestEntry::to_json() const {
    json out;
    out["name"] = name;
    out["statistics"] = statistics;
    out["threshold"] = threshold;
    out["provenance"] = provenance;
    out["pass"] = pass;
    out["sample_size"] = sample_size;
    out["runtime_seconds"] = runtime_seconds;
    if (!message.empty()) out["message"] = message;
    return out;
}

bool VerificationReport::pass() const {
    return !tests.empty() && std::all_of(tests.begin(), tests.end(), [](const TestEntry& t) { return t.pass; });
}

json VerificationReport::to_json() const {
    json out;
    out["config_echo"] = config_echo;
    out["tests"] = json::array();
    for (const auto& t : tests) out["tests"].push_back(t.to_json());
    out["verdict"] = pass() ? "pass" : "fail";
    out["runtime_seconds"] = runtime_seconds;
    out["seed"] = seed;
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Each test draws from its own block of path ids so that tests never share streams.
enum class StreamTag : std::uint64_t { domination = 1, lattice_identity = 2, joint = 3, independence = 4 };

std::uint64_t stream_id(StreamTag tag, std::size_t i) {
    return (static_cast<std::uint64_t>(tag) << 40) + static_cast<std::uint64_t>(i);
}

/// N independent exact trajectories; row i holds R_1..R_depth of path i.
std::vector<Rational> exact_ratio_rows(const VerifyConfig& config, StreamTag tag, std::size_t depth) {
    const auto sampler = std::make_shared<const Sampler>(config.model, Backend::exact);
    std::vector<Rational> rows(config.samples * depth);
    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (config.samples + kChunk - 1) / kChunk;
    parallel_for(chunks, config.threads, [&](std::size_t c) {
        const std::size_t end = std::min(config.samples, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            PathStream path(sampler, config.seed, stream_id(tag, i));
            for (std::size_t j = 0; j < depth; ++j) rows[i * depth + j] = path.next().ratio;
        }
    });
    return rows;
}

const GoodSequence& certified_lattice(const OppenheimModel& model) {
    if (!model.lattice) throw CertificationMissing("the model has no good sequence attached");
    const LatticeCertificate cert = certify_lattice(model, *model.lattice);
    if (!cert.certified) throw CertificationMissing("lattice integrality check failed: " + cert.detail);
    return *model.lattice;
}

double fraction(std::size_t hits, std::size_t total) {
    return static_cast<double>(hits) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Trajectory experiments shared by th1 and conv

struct Trajectories {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> centering;
    std::vector<std::vector<CheckpointRecord>> records;
    double runtime = 0;
};

Trajectories run_trajectories(const VerifyConfig& config) {
    config.validate();
    const auto start = Clock::now();
    if (!config.model->dist.identical())
        throw ConfigError("trajectory tests need one distribution F shared by all positions");
    const auto sampler = std::make_shared<const Sampler>(config.model, config.backend);
    SimulationSpec spec;
    spec.checkpoints = config.checkpoints;
    spec.paths = config.paths;
    spec.r = std::max<std::size_t>(2, config.r);
    spec.p = config.p;
    spec.tau = config.tau;
    spec.seed = config.seed;
    spec.threads = config.threads;
    SimulationResult result = simulate_paths(sampler, spec);
    if (!result.complete()) throw CapExceeded(*result.failure);
    Trajectories out;
    out.checkpoints = config.checkpoints;
    for (auto n : config.checkpoints)
        out.centering.push_back(centering_c(static_cast<double>(n), config.model->dist.at(1), config.tau));
    out.records = std::move(result.records);
    out.runtime = seconds_since(start);
    return out;
}

TestEntry th1_from(const VerifyConfig& config, const Trajectories& data) {
    const auto start = Clock::now();
    TestEntry entry;
    entry.name = "th1";
    entry.provenance = "configured tolerance on |stat - c_n| (engineering choice); trend over checkpoint decades";
    const std::size_t K = data.checkpoints.size();
    std::vector<double> median_dev(K), median_stat(K);
    json per_checkpoint = json::array();
    for (std::size_t c = 0; c < K; ++c) {
        std::vector<double> stats, devs;
        for (const auto& path : data.records) {
            stats.push_back(path[c].stat_th1);
            devs.push_back(std::abs(path[c].stat_th1 - data.centering[c]));
        }
        median_stat[c] = median(stats);
        median_dev[c] = median(devs);
        per_checkpoint.push_back({{"n", data.checkpoints[c]},
                                  {"c_n", data.centering[c]},
                                  {"median_statistic", median_stat[c]},
                                  {"median_abs_deviation", median_dev[c]}});
    }
    const bool terminal = median_dev[K - 1] <= config.th1_tolerance;
    // Decades: the last two steps between consecutive checkpoints.
    bool trend = true;
    for (std::size_t c = K >= 3 ? K - 2 : 1; c < K; ++c) trend = trend && median_dev[c] <= median_dev[c - 1];
    entry.statistics["backend"] = to_string(config.backend);
    entry.statistics["checkpoints"] = per_checkpoint;
    entry.statistics["terminal_ok"] = terminal;
    entry.statistics["trend_ok"] = trend;
    entry.threshold = {{"median_abs_deviation_max", config.th1_tolerance},
                       {"trend", "median |stat - c_n| non-increasing over the last two checkpoint steps"}};
    entry.pass = terminal && trend;
    entry.sample_size = static_cast<std::uint64_t>(config.paths) * data.checkpoints.back();
    entry.runtime_seconds = data.runtime + seconds_since(start);
    if (!terminal) entry.message = "median deviation from c_n above tolerance at the last checkpoint";
    else if (!trend) entry.message = "median deviation from c_n increased between checkpoints";
    return entry;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

TestEntry conv_from(const VerifyConfig& config, const Trajectories& data) {
    const auto start = Clock::now();
    TestEntry entry;
    entry.name = "conv";
    entry.provenance = "configured tolerances (terminal bound, trend fraction); ratio bound probed numerically";
    const std::size_t K = data.checkpoints.size();
    const double ratio_bound = config.model->dist.ratio_bound();
    const bool ratio_ok = std::isfinite(ratio_bound);

    std::vector<std::size_t> orders{1};
    if (config.r >= 2) orders.push_back(config.r);
    bool trimmed_ok = true;
    json trimmed = json::array();
    for (std::size_t k : orders) {
        std::size_t good = 0;
        std::vector<double> terminal;
        for (const auto& path : data.records) {
            std::vector<double> series;
            for (std::size_t c = 0; c < K; ++c) {
                const auto& rec = path[c];
                const double a = a_n(static_cast<double>(rec.n));
                const double s = k == 1 ? rec.sum - rec.maxima.at(0) : rec.trimmed;
                series.push_back(s / std::pow(a, config.p));
            }
            terminal.push_back(series.back());
            const bool positive = std::all_of(series.begin(), series.end(), [](double v) { return v > 0; });
            if (positive && series.back() <= config.conv_tolerance && strictly_decreasing(series)) ++good;
        }
        const double share = fraction(good, data.records.size());
        const bool ok = share >= config.trend_fraction;
        trimmed_ok = trimmed_ok && ok;
        trimmed.push_back({{"r", k},
                           {"median_terminal_statistic", median(terminal)},
                           {"max_terminal_statistic", *std::max_element(terminal.begin(), terminal.end())},
                           {"fraction_paths_ok", share},
                           {"pass", ok}});
    }

    std::vector<double> max_medians;
    for (std::size_t c = 0; c < K; ++c) {
        std::vector<double> v;
        for (const auto& path : data.records)
            v.push_back(path[c].maxima.at(1) / a_n(static_cast<double>(path[c].n)));
        max_medians.push_back(median(v));
    }
    const bool max_ok = max_medians.back() <= config.max_ratio_tolerance && strictly_decreasing(max_medians);

    entry.statistics["backend"] = to_string(config.backend);
    entry.statistics["p"] = config.p;
    entry.statistics["ratio_bound"] = ratio_ok ? json(ratio_bound) : json("infinite");
    entry.statistics["trimmed"] = trimmed;
    entry.statistics["max_ratio_order"] = 2;
    entry.statistics["max_ratio_medians"] = max_medians;
    entry.statistics["checkpoints"] = data.checkpoints;
    entry.threshold = {{"statistic_max", config.conv_tolerance},
                       {"fraction_paths_min", config.trend_fraction},
                       {"max_ratio_median_max", config.max_ratio_tolerance}};
    entry.pass = ratio_ok && trimmed_ok && max_ok;
    entry.sample_size = static_cast<std::uint64_t>(config.paths) * data.checkpoints.back();
    entry.runtime_seconds = data.runtime + seconds_since(start);
    if (!ratio_ok) entry.message = "ratio bound sup limsup F(t)/t is not finite";
    else if (!trimmed_ok) entry.message = "too few paths with a small, decreasing trimmed statistic";
    else if (!max_ok) entry.message = "max-ratio medians not small or not decreasing";
    return entry;
}

void require_conv_config(const VerifyConfig& config) {
    if (!(config.p > 2)) throw ConfigError("conv tests need p > 2");
}

} // namespace

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Appends one record per checkpoint reached, so a failing path keeps its prefix.
void run_path(const std::shared_ptr<const Sampler>& sampler, std::uint64_t seed, std::uint64_t path_id,
              const std::vector<std::uint64_t>& checkpoints, std::size_t r, double p,
              const std::vector<double>& centering, std::vector<CheckpointRecord>& out) {
    PathStream path(sampler, seed, path_id);
    TrimAccumulator acc(r);
    std::size_t next = 0;
    for (std::uint64_t n = 1; next < checkpoints.size(); ++n) {
        acc.observe(path.next_value());
        if (n == checkpoints[next]) {
            out.push_back(make_checkpoint(acc, path_id, p, centering[next]));
            ++next;
        }
    }
}

} // namespace

std::vector<CheckpointRecord> simulate_path(const std::shared_ptr<const Sampler>& sampler, std::uint64_t seed,
                                            std::uint64_t path_id, const std::vector<std::uint64_t>& checkpoints,
                                            std::size_t r, double p, const std::vector<double>& centering) {
    std::vector<CheckpointRecord> out;
    out.reserve(checkpoints.size());
    run_path(sampler, seed, path_id, checkpoints, r, p, centering, out);
    return out;
}

SimulationResult simulate_paths(const std::shared_ptr<const Sampler>& sampler, const SimulationSpec& spec) {
    if (spec.checkpoints.empty()) throw ConfigError("simulate: no checkpoints");
    for (std::size_t i = 0; i < spec.checkpoints.size(); ++i) {
        if (spec.checkpoints[i] < 2) throw ConfigError("simulate: checkpoints must be >= 2");
        if (i && spec.checkpoints[i] <= spec.checkpoints[i - 1])
            throw ConfigError("simulate: checkpoints must increase strictly");
    }
    if (spec.r == 0) throw ConfigError("simulate: trim order must be >= 1");
    check_envelope(sampler->model(), sampler->backend(), spec.checkpoints.back());

    std::vector<double> centering;
    const Cdf& cdf = sampler->model().dist.at(1);
    for (auto n : spec.checkpoints) centering.push_back(centering_c(static_cast<double>(n), cdf, spec.tau));

    SimulationResult result;
    result.records.resize(spec.paths);
    std::vector<std::string> failures(spec.paths);
    parallel_for(spec.paths, spec.threads, [&](std::size_t i) {
        try {
            run_path(sampler, spec.seed, i, spec.checkpoints, spec.r, spec.p, centering, result.records[i]);
        } catch (const CapExceeded& e) {
            failures[i] = "path " + std::to_string(i) + ": " + e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) {
            result.failure = f;
            break;
        }
    return result;
}

// ---------------------------------------------------------------------------
// Distributional tests

TestEntry test_domination(const VerifyConfig& config) {
    config.validate();
    if (config.samples < 10'000) throw ConfigError("domination needs at least 10^4 samples");
    const auto start = Clock::now();
    require_proper(*config.model);
    const auto rows = exact_ratio_rows(config, StreamTag::domination, config.slot);
    const std::size_t N = config.samples;
    const double eps = dkw_epsilon(N, config.significance);
    const Cdf& F = config.model->dist.at(config.slot);

    TestEntry entry;
    entry.name = "domination";
    entry.provenance = "DKW band sqrt(ln(2/delta)/(2N)), simultaneous over the grid";
    entry.pass = true;
    json grid = json::array();
    for (const char* text : {"3/2", "2", "37/10", "10", "50"}) {
        const Rational x = parse_rational(text);
        std::size_t above = 0;
        for (std::size_t i = 0; i < N; ++i)
            if (rows[i * config.slot + config.slot - 1] > x) ++above;
        const double empirical = fraction(above, N);
        const double envelope = to_double(F(Rational(1) / x));
        const bool ok = empirical <= envelope + eps;
        entry.pass = entry.pass && ok;
        grid.push_back({{"x", text}, {"empirical_survival", empirical}, {"F_inv_x", envelope}, {"pass", ok}});
    }
    entry.statistics["slot"] = config.slot;
    entry.statistics["grid"] = grid;
    entry.threshold = {{"dkw_epsilon", eps}, {"delta", config.significance}};
    entry.sample_size = N;
    entry.runtime_seconds = seconds_since(start);
    if (!entry.pass) entry.message = "empirical survival above F(1/x) + epsilon";
    return entry;
}

TestEntry test_lattice_identity(const VerifyConfig& config) {
    config.validate();
    const auto start = Clock::now();
    const GoodSequence& lattice = certified_lattice(*config.model);
    require_proper(*config.model);
    const auto rows = exact_ratio_rows(config, StreamTag::lattice_identity, config.slot);
    const std::size_t N = config.samples;
    const double eps = dkw_epsilon(N, config.significance);
    const Cdf& F = config.model->dist.at(config.slot);

    std::vector<std::int64_t> points;
    for (std::int64_t j = 1; points.size() < 5; ++j)
        if (lattice[j] >= 2) points.push_back(lattice[j]);

    TestEntry entry;
    entry.name = "lattice-identity";
    entry.provenance = "DKW band sqrt(ln(2/delta)/(2N)); non-strict form P(R >= x) = F(1/x)";
    entry.pass = true;
    json grid = json::array();
    for (auto x : points) {
        const Rational xr(static_cast<long>(x));
        std::size_t geq = 0, gt = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const Rational& R = rows[i * config.slot + config.slot - 1];
            const int c = cmp(R, xr);
            if (c >= 0) ++geq;
            if (c > 0) ++gt;
        }
        const double target = to_double(survival_at_lattice(F, x));
        const double residual = std::abs(fraction(geq, N) - target);
        const bool ok = residual <= eps;
        entry.pass = entry.pass && ok;
        grid.push_back({{"x", x},
                        {"empirical_geq", fraction(geq, N)},
                        {"F_inv_x", target},
                        {"residual", residual},
                        {"strict_residual", std::abs(fraction(gt, N) - target)},
                        {"pass", ok}});
    }
    entry.statistics["slot"] = config.slot;
    entry.statistics["points"] = grid;
    entry.threshold = {{"dkw_epsilon", eps}, {"delta", config.significance}};
    entry.sample_size = N;
    entry.runtime_seconds = seconds_since(start);
    if (!entry.pass) entry.message = "non-strict survival differs from F(1/x) beyond epsilon";
    return entry;
}

TestEntry test_joint_product(const VerifyConfig& config) {
    config.validate();
    const auto start = Clock::now();
    const GoodSequence& lattice = certified_lattice(*config.model);
    require_proper(*config.model);
    constexpr std::size_t kDepth = 5;
    const auto rows = exact_ratio_rows(config, StreamTag::joint, kDepth);
    const std::size_t N = config.samples;
    const auto& dist = config.model->dist;

    struct Case {
        std::vector<std::size_t> positions;
        std::vector<std::int64_t> lattice_index;
    };
    std::vector<Case> cases;
    for (const auto& pos : std::vector<std::vector<std::size_t>>{{1, 2}, {1, 3}, {2, 5}})
        for (const auto& idx : std::vector<std::vector<std::int64_t>>{{2, 2}, {2, 3}, {3, 5}}) cases.push_back({pos, idx});
    cases.push_back({{1, 2, 3}, {2, 2, 2}});

    TestEntry entry;
    entry.name = "joint";
    entry.provenance = "3 binomial standard deviations per configuration";
    entry.pass = true;
    json out = json::array();
    for (const auto& cs : cases) {
        std::vector<Rational> xs;
        std::vector<std::int64_t> values;
        Rational product(1);
        for (std::size_t m = 0; m < cs.positions.size(); ++m) {
            const std::int64_t x = lattice[cs.lattice_index[m]];
            values.push_back(x);
            xs.emplace_back(static_cast<long>(x));
            product *= survival_at_lattice(dist.at(cs.positions[m]), x);
        }
        std::size_t hits = 0;
        for (std::size_t i = 0; i < N; ++i) {
            bool all = true;
            for (std::size_t m = 0; m < cs.positions.size() && all; ++m)
                all = rows[i * kDepth + cs.positions[m] - 1] >= xs[m];
            if (all) ++hits;
        }
        const double target = to_double(product);
        const double sigma = binomial_sigma(target, N);
        const double empirical = fraction(hits, N);
        const bool ok = std::abs(empirical - target) <= 3 * sigma;
        entry.pass = entry.pass && ok;
        out.push_back({{"positions", cs.positions},
                       {"x", values},
                       {"empirical", empirical},
                       {"product", target},
                       {"sigma", sigma},
                       {"pass", ok}});
    }
    entry.statistics["cases"] = out;
    entry.threshold = {{"sigmas", 3}};
    entry.sample_size = N;
    entry.runtime_seconds = seconds_since(start);
    if (!entry.pass) entry.message = "joint non-strict survival differs from the product beyond 3 sigma";
    return entry;
}

TestEntry test_independence(const VerifyConfig& config) {
    config.validate();
    const auto start = Clock::now();
    const GoodSequence& lattice = certified_lattice(*config.model);
    require_proper(*config.model);
    const std::size_t depth = config.slot + 1;
    const auto rows = exact_ratio_rows(config, StreamTag::independence, depth);
    const std::size_t N = config.samples;
    constexpr std::size_t kCells = 6;

    // Cells: lattice indices s <= 1, 2, 3, 4, 5 and the tail s >= 6.
    auto cell = [&](const Rational& R) {
        const auto s = lattice_floor(lattice, to_double(R)).index;
        return static_cast<std::size_t>(std::clamp<std::int64_t>(s, 1, kCells) - 1);
    };
    std::vector<std::vector<std::uint64_t>> table(kCells, std::vector<std::uint64_t>(kCells, 0));
    std::vector<std::vector<std::uint64_t>> control(kCells, std::vector<std::uint64_t>(kCells, 0));
    std::vector<std::vector<std::uint64_t>> margins(2, std::vector<std::uint64_t>(kCells, 0));
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t a = cell(rows[i * depth + config.slot - 1]);
        const std::size_t b = cell(rows[i * depth + config.slot]);
        ++table[a][b];
        ++control[a][a];
        ++margins[0][a];
        ++margins[1][b];
    }
    const ChiSquareResult honest = chi_square_independence(table);
    const ChiSquareResult adversarial = chi_square_independence(control);

    // Marginal CDFs at the cell boundaries against cumulative t_density, one DKW band per margin.
    const double eps = dkw_epsilon(N, config.significance / 2);
    bool margins_ok = true;
    json marginal = json::array();
    for (std::size_t m = 0; m < 2; ++m) {
        const std::size_t n = config.slot + m;
        double expected = 0, observed = 0, worst = 0;
        json cdf = json::array();
        for (std::size_t c = 0; c + 1 < kCells; ++c) {
            if (c == 0) expected += to_double(t_density(*config.model, lattice, 0, DensityConvention::floor, n));
            expected += to_double(t_density(*config.model, lattice, static_cast<std::int64_t>(c + 1),
                                            DensityConvention::floor, n));
            observed += fraction(margins[m][c], N);
            worst = std::max(worst, std::abs(observed - expected));
            cdf.push_back({{"lattice_value", lattice[static_cast<std::int64_t>(c + 1)]},
                           {"empirical_cdf", observed},
                           {"t_density_cdf", expected}});
        }
        const bool ok = worst <= eps;
        margins_ok = margins_ok && ok;
        marginal.push_back({{"n", n}, {"cdf", cdf}, {"max_deviation", worst}, {"pass", ok}});
    }

    const bool honest_ok = !honest.rejected(config.significance);
    const bool control_ok = adversarial.rejected(config.significance);
    TestEntry entry;
    entry.name = "independence";
    entry.provenance = "chi-square independence at the configured significance; DKW band per margin (Bonferroni over 2)";
    entry.statistics["backend"] = "exact";
    entry.statistics["positions"] = {config.slot, config.slot + 1};
    entry.statistics["chi_square"] = {{"statistic", honest.statistic}, {"dof", honest.dof}, {"p_value", honest.p_value}};
    entry.statistics["control_chi_square"] = {
        {"statistic", adversarial.statistic}, {"dof", adversarial.dof}, {"p_value", adversarial.p_value}};
    entry.statistics["control_rejected"] = control_ok;
    entry.statistics["marginals"] = marginal;
    entry.threshold = {{"significance", config.significance}, {"dkw_epsilon", eps}};
    entry.pass = honest_ok && control_ok && margins_ok;
    entry.sample_size = N;
    entry.runtime_seconds = seconds_since(start);
    if (!honest_ok) entry.message = "independence rejected";
    else if (!control_ok) entry.message = "perfect-dependence control was not rejected";
    else if (!margins_ok) entry.message = "marginal law differs from t_density beyond the DKW band";
    return entry;
}

TestEntry track_th1(const VerifyConfig& config) { return th1_from(config, run_trajectories(config)); }

TestEntry track_conv(const VerifyConfig& config) {
    require_conv_config(config);
    return conv_from(config, run_trajectories(config));
}

TestEntry check_mori_hypotheses(const VerifyConfig& config) {
    config.validate();
    const auto start = Clock::now();
    const Normalizer normalizer;
    const double b1 = normalizer.B(1.0);
    TestEntry entry;
    entry.name = "mori";
    entry.provenance = "quadrature plus analytic tail; closed form 2/log B(1) for linear F";
    entry.pass = true;
    json members = json::array();
    const auto& dist = config.model->dist;
    for (std::size_t i = 0; i < dist.members().size(); ++i) {
        const Cdf& F = dist.members()[i];
        json m;
        auto report = [&](double s) {
            const MoriIntegral J = mori_J(s, F, normalizer);
            json j{{"s", s}, {"finite", J.finite}};
            if (J.finite) {
                j["estimate"] = J.estimate;
                j["quadrature"] = J.quadrature;
                j["tail"] = J.tail;
                j["tail_bound"] = J.tail_bound;
            } else {
                j["estimate"] = "divergent";
            }
            return std::pair{J, j};
        };
        auto [j2, j2_json] = report(2.0);
        m["J2"] = j2_json;
        bool ok = j2.finite;
        if (config.r + 1 != 2) {
            auto [jr, jr_json] = report(static_cast<double>(config.r + 1));
            m["J_r_plus_1"] = jr_json;
            ok = ok && jr.finite;
        }
        auto [j1, j1_json] = report(1.0);
        m["J1"] = j1_json;
        if (F.is_linear()) {
            const double closed = 2.0 / std::log(b1);
            const double rel = std::abs(j2.estimate - closed) / std::abs(closed);
            m["closed_form_J2"] = closed;
            m["relative_error"] = rel;
            ok = ok && rel <= config.mori_tolerance && !j1.finite;
        }
        entry.pass = entry.pass && ok;
        m["pass"] = ok;
        members.push_back(m);
    }
    entry.statistics["B_1"] = b1;
    entry.statistics["members"] = members;
    entry.threshold = {{"relative_tolerance", config.mori_tolerance}};
    entry.sample_size = 0;
    entry.runtime_seconds = seconds_since(start);
    if (!entry.pass) entry.message = "J2 or J_{r+1} not finite, or closed-form disagreement";
    return entry;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"domination", "lattice-identity", "joint", "independence",
                                                "th1",        "conv",             "mori"};
    return names;
}

VerificationReport run_suite(const VerifyConfig& config, const std::string& suite) {
    config.validate();
    const bool all = suite == "all";
    if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw ConfigError("unknown suite '" + suite + "'");
    auto wanted = [&](const std::string& name) { return all || suite == name; };
    if (wanted("conv")) require_conv_config(config);

    const auto start = Clock::now();
    VerificationReport report;
    report.config_echo = config.echo();
    report.config_echo["suite"] = suite;
    report.seed = config.seed;
    if (wanted("domination")) report.tests.push_back(test_domination(config));
    if (wanted("lattice-identity")) report.tests.push_back(test_lattice_identity(config));
    if (wanted("joint")) report.tests.push_back(test_joint_product(config));
    if (wanted("independence")) report.tests.push_back(test_independence(config));
    if (wanted("th1") || wanted("conv")) {
        const Trajectories data = run_trajectories(config);
        if (wanted("th1")) report.tests.push_back(th1_from(config, data));
        if (wanted("conv")) report.tests.push_back(conv_from(config, data));
    }
    if (wanted("mori")) report.tests.push_back(check_mori_hypotheses(config));
    report.runtime_seconds = seconds_since(start);
    return report;
}

} // namespace oppenheim
