#include "oppenheim/cli.hpp"

#include "oppenheim/classic.hpp"
#include "oppenheim/config.hpp"
#include "oppenheim/errors.hpp"
#include "oppenheim/stats.hpp"
#include "oppenheim/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace oppenheim::cli {

using json = nlohmann::ordered_json;

std::vector<std::uint64_t> default_checkpoints(std::uint64_t n) {
    if (n < 2) throw ConfigError("n must be >= 2");
    std::vector<std::uint64_t> decades;
    for (std::uint64_t d = 10; d <= n; d *= 10) {
        decades.push_back(d);
        if (d > std::numeric_limits<std::uint64_t>::max() / 10) break;
    }
    if (decades.empty() || decades.back() != n) decades.push_back(n);
    if (decades.size() > 3) decades.erase(decades.begin(), decades.end() - 3);
    return decades;
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::uint64_t> resolve_checkpoints(std::vector<std::uint64_t> explicit_list, std::uint64_t n) {
    if (explicit_list.empty()) return default_checkpoints(n);
    for (std::size_t i = 0; i < explicit_list.size(); ++i) {
        if (explicit_list[i] < 2) throw ConfigError("checkpoints must be >= 2");
        if (i && explicit_list[i] <= explicit_list[i - 1]) throw ConfigError("checkpoints must increase strictly");
    }
    return explicit_list;
}

/// Writes `text` to `path`, or to `out` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

void write_manifest(const std::string& path, const std::string& command, const json& options,
                    const std::string& model_text, std::uint64_t seed, const std::string& started,
                    const std::vector<std::string>& outputs, int exit_code, bool partial) {
    if (path.empty()) return;
    json m;
    m["schema"] = kManifestSchema;
    m["command"] = command;
    m["tool_version"] = kToolVersion;
    m["options"] = options;
    m["model_text"] = model_text;
    m["seed"] = seed;
    m["started_at"] = started;
    m["finished_at"] = utc_now();
    m["outputs"] = outputs;
    m["output_schema"] = command == "simulate" ? kCheckpointSchema : kReportSchema;
    m["exit_code"] = exit_code;
    m["partial"] = partial;
    emit(path, json_text(m), std::cout);
}

/// Maps library exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return config_error;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return config_error;
    } catch (const CertificationMissing& e) {
        err << "certification missing: " << e.what() << "\n";
        return config_error;
    } catch (const ImproperModel& e) {
        err << "improper model: " << e.what() << "\n";
        return config_error;
    } catch (const CapExceeded& e) {
        err << "cap exceeded: " << e.what() << "\n";
        return failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
}

Backend backend_from(const std::string& name) {
    try {
        return parse_backend(name);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

std::string resolve_model_text(const std::string& source) {
    if (source.empty()) throw ConfigError("--model is required");
    if (std::filesystem::exists(source)) return serialize_model_config(load_model_file(source));
    if (source == "luroth") return serialize_model_config(luroth_model());
    if (source == "engel") return serialize_model_config(engel_model());
    if (source == "sylvester") return serialize_model_config(sylvester_model());
    throw ConfigError("model file '" + source + "' not found");
}

json to_json(const SimulateOptions& o) {
    return json{{"model", o.model_source}, {"backend", to_string(o.backend)}, {"n", o.n},
                {"paths", o.paths},        {"seed", o.seed},                  {"trim", o.trim},
                {"power", o.power},        {"checkpoints", o.checkpoints},    {"tau", o.tau},
                {"out", o.out},            {"threads", o.threads}};
}

json to_json(const VerifyOptions& o) {
    return json{{"suite", o.suite},
                {"model", o.model_source},
                {"backend", to_string(o.backend)},
                {"n", o.n},
                {"checkpoints", o.checkpoints},
                {"paths", o.paths},
                {"samples", o.samples},
                {"trim", o.trim},
                {"power", o.power},
                {"seed", o.seed},
                {"tau", o.tau},
                {"significance", o.significance},
                {"th1_tolerance", o.th1_tolerance},
                {"slot", o.slot},
                {"out", o.out},
                {"threads", o.threads}};
}

SimulateOptions simulate_options_from_json(const nlohmann::json& j) {
    SimulateOptions o;
    o.model_source = j.at("model").get<std::string>();
    o.backend = backend_from(j.at("backend").get<std::string>());
    o.n = j.at("n").get<std::uint64_t>();
    o.paths = j.at("paths").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.trim = j.at("trim").get<std::size_t>();
    o.power = j.at("power").get<double>();
    o.checkpoints = j.at("checkpoints").get<std::vector<std::uint64_t>>();
    o.tau = j.at("tau").get<double>();
    o.out = j.at("out").get<std::string>();
    o.threads = j.at("threads").get<unsigned>();
    return o;
}

VerifyOptions verify_options_from_json(const nlohmann::json& j) {
    VerifyOptions o;
    o.suite = j.at("suite").get<std::string>();
    o.model_source = j.at("model").get<std::string>();
    o.backend = backend_from(j.at("backend").get<std::string>());
    o.n = j.at("n").get<std::uint64_t>();
    o.checkpoints = j.at("checkpoints").get<std::vector<std::uint64_t>>();
    o.paths = j.at("paths").get<std::size_t>();
    o.samples = j.at("samples").get<std::size_t>();
    o.trim = j.at("trim").get<std::size_t>();
    o.power = j.at("power").get<double>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.tau = j.at("tau").get<double>();
    o.significance = j.at("significance").get<double>();
    o.th1_tolerance = j.at("th1_tolerance").get<double>();
    o.slot = j.at("slot").get<std::size_t>();
    o.out = j.at("out").get<std::string>();
    o.threads = j.at("threads").get<unsigned>();
    return o;
}

int cmd_expand(const std::string& scheme_name, const std::string& x_text, std::size_t max_digits,
               std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        classic::Scheme scheme;
        try {
            scheme = classic::parse_scheme(scheme_name);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        const Rational x = parse_rational(x_text);
        const classic::DigitSequence seq = classic::expand(scheme, x, max_digits);
        json j;
        j["scheme"] = classic::to_string(scheme);
        j["x"] = to_string(x);
        j["digits"] = json::array();
        for (const auto& d : seq.digits) j["digits"].push_back(to_string(d));
        j["terminated"] = seq.terminated;
        j["errors"] = json::array();
        for (std::size_t k = 1; k <= seq.digits.size(); ++k) {
            json e{{"k", k}, {"error", to_string(Rational(x - classic::reconstruct(scheme, seq.digits, k)))}};
            if (!(seq.terminated && k == seq.digits.size()))
                e["bound"] = to_string(classic::remainder_bound(scheme, seq.digits, k));
            j["errors"].push_back(e);
        }
        out << json_text(j);
        return static_cast<int>(ok);
    });
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
    const std::string started = utc_now();
    return guarded(err, [&] {
        const std::string model_text =
            options.model_text.empty() ? resolve_model_text(options.model_source) : options.model_text;
        auto model = std::make_shared<const OppenheimModel>(parse_model_config(model_text));
        SimulationSpec spec;
        spec.checkpoints = resolve_checkpoints(options.checkpoints, options.n);
        if (spec.checkpoints.back() > options.n) throw ConfigError("checkpoints exceed --n");
        spec.paths = options.paths;
        spec.r = options.trim;
        spec.p = options.power;
        spec.tau = options.tau;
        spec.seed = options.seed;
        spec.threads = std::max(1u, options.threads);
        if (spec.paths == 0) throw ConfigError("--paths must be >= 1");
        if (!(spec.p > 0)) throw ConfigError("--power must be positive");
        if (!(spec.tau > 0)) throw ConfigError("--tau must be positive");

        const auto sampler = std::make_shared<const Sampler>(model, options.backend);
        const SimulationResult result = simulate_paths(sampler, spec);
        std::string csv = checkpoint_csv_header() + "\n";
        for (const auto& path : result.records)
            for (const auto& rec : path) csv += to_csv_row(rec) + "\n";
        emit(options.out, csv, out);

        int code = ok;
        if (!result.complete()) {
            err << "cap exceeded: " << *result.failure << "\npartial output: only checkpoints reached were written\n";
            code = failure;
        }
        write_manifest(options.manifest, "simulate", to_json(options), model_text, options.seed, started,
                       {options.out}, code, !result.complete());
        return code;
    });
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
    const std::string started = utc_now();
    return guarded(err, [&] {
        const std::string model_text =
            options.model_text.empty() ? resolve_model_text(options.model_source) : options.model_text;
        VerifyConfig config;
        config.model = std::make_shared<const OppenheimModel>(parse_model_config(model_text));
        config.backend = options.backend;
        config.checkpoints = resolve_checkpoints(options.checkpoints, options.n);
        config.paths = options.paths;
        config.samples = options.samples;
        config.r = options.trim;
        config.p = options.power;
        config.seed = options.seed;
        config.tau = options.tau;
        config.significance = options.significance;
        config.th1_tolerance = options.th1_tolerance;
        config.slot = options.slot;
        config.threads = std::max(1u, options.threads);
        const VerificationReport report = run_suite(config, options.suite);
        emit(options.out, json_text(report.to_json()), out);
        const int code = report.pass() ? ok : failure;
        if (code != ok)
            for (const auto& t : report.tests)
                if (!t.pass) err << "FAIL " << t.name << ": " << t.message << "\n";
        write_manifest(options.manifest, "verify", to_json(options), model_text, options.seed, started,
                       {options.out}, code, false);
        return code;
    });
}

int cmd_replay(const std::string& manifest_path, const std::optional<std::string>& out_override, std::ostream& out,
               std::ostream& err) {
    return guarded(err, [&]() -> int {
        std::ifstream in(manifest_path);
        if (!in) throw ConfigError("cannot open manifest '" + manifest_path + "'");
        nlohmann::json m;
        try {
            m = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed manifest: ") + e.what());
        }
        try {
            const std::string command = m.at("command").get<std::string>();
            const std::string model_text = m.at("model_text").get<std::string>();
            if (command == "simulate") {
                SimulateOptions o = simulate_options_from_json(m.at("options"));
                o.model_text = model_text;
                o.manifest.clear();
                if (out_override) o.out = *out_override;
                return cmd_simulate(o, out, err);
            }
            if (command == "verify") {
                VerifyOptions o = verify_options_from_json(m.at("options"));
                o.model_text = model_text;
                o.manifest.clear();
                if (out_override) o.out = *out_override;
                return cmd_verify(o, out, err);
            }
            throw ConfigError("manifest records unsupported command '" + command + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("malformed manifest: ") + e.what());
        }
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Oppenheim expansion simulator and verifier"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string scheme, x;
    std::size_t max_digits = 20;
    auto* expand = app.add_subcommand("expand", "Digit expansion of a rational in (0,1)");
    expand->add_option("--scheme", scheme, "luroth | engel | sylvester")->required();
    expand->add_option("--x", x, "rational p/q in (0,1)")->required();
    expand->add_option("--max-digits", max_digits, "maximum number of digits")->capture_default_str();

    SimulateOptions sim;
    sim.threads = default_threads();
    std::string sim_backend = "lattice";
    auto* simulate = app.add_subcommand("simulate", "Simulate paths and write checkpoint CSV");
    simulate->add_option("--model", sim.model_source, "model file or built-in name")->required();
    simulate->add_option("--backend", sim_backend, "exact | lattice")->capture_default_str();
    simulate->add_option("--n", sim.n, "path length")->capture_default_str();
    simulate->add_option("--paths", sim.paths, "number of paths")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--trim", sim.trim, "trimming order r")->capture_default_str();
    simulate->add_option("--power", sim.power, "normalization power p")->capture_default_str();
    simulate->add_option("--checkpoints", sim.checkpoints, "checkpoint list")->delimiter(',');
    simulate->add_option("--tau", sim.tau, "centering constant tau")->capture_default_str();
    simulate->add_option("--out", sim.out, "CSV output path (stdout when omitted)");
    simulate->add_option("--manifest", sim.manifest, "manifest output path");
    simulate->add_option("--threads", sim.threads, "worker threads");

    VerifyOptions ver;
    ver.threads = default_threads();
    std::string ver_backend = "lattice";
    auto* verify = app.add_subcommand("verify", "Run the verification suite and write a JSON report");
    verify->add_option("--suite", ver.suite, "domination | lattice-identity | joint | independence | th1 | conv | mori | all")
        ->capture_default_str();
    verify->add_option("--model", ver.model_source, "model file or built-in name")->required();
    verify->add_option("--backend", ver_backend, "backend for trajectory tests")->capture_default_str();
    verify->add_option("--n", ver.n, "largest checkpoint")->capture_default_str();
    verify->add_option("--checkpoints", ver.checkpoints, "checkpoint list")->delimiter(',');
    verify->add_option("--paths", ver.paths, "paths for trajectory tests")->capture_default_str();
    verify->add_option("--samples", ver.samples, "samples for distributional tests")->capture_default_str();
    verify->add_option("--trim", ver.trim, "trimming order r")->capture_default_str();
    verify->add_option("--power", ver.power, "normalization power p")->capture_default_str();
    verify->add_option("--seed", ver.seed, "RNG seed")->capture_default_str();
    verify->add_option("--tau", ver.tau, "centering constant tau")->capture_default_str();
    verify->add_option("--significance", ver.significance, "test significance")->capture_default_str();
    verify->add_option("--th1-tolerance", ver.th1_tolerance, "terminal tolerance of the th1 test")
        ->capture_default_str();
    verify->add_option("--slot", ver.slot, "position n of single-index tests")->capture_default_str();
    verify->add_option("--out", ver.out, "JSON output path (stdout when omitted)");
    verify->add_option("--manifest", ver.manifest, "manifest output path");
    verify->add_option("--threads", ver.threads, "worker threads");

    std::string replay_manifest;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay->add_option("--manifest", replay_manifest, "manifest path")->required();
    auto* replay_out_opt = replay->add_option("--out", replay_out, "override the artifact path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    if (*expand) return cmd_expand(scheme, x, max_digits, out, err);
    if (*simulate) {
        const int code = guarded(err, [&] {
            sim.backend = backend_from(sim_backend);
            return static_cast<int>(ok);
        });
        return code != ok ? code : cmd_simulate(sim, out, err);
    }
    if (*verify) {
        const int code = guarded(err, [&] {
            ver.backend = backend_from(ver_backend);
            return static_cast<int>(ok);
        });
        return code != ok ? code : cmd_verify(ver, out, err);
    }
    return cmd_replay(replay_manifest, *replay_out_opt ? std::optional(replay_out) : std::nullopt, out, err);
}

} // namespace oppenheim::cli
