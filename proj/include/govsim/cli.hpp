#pragma once

// Command-line front end: validate scenarios, run single or batched
// simulations, aggregate reports, emit SVG timelines.
//
// Exit codes: 0 success (a collision-halted run is a result, not an error),
// 1 run-level failure, 2 usage/configuration error. Diagnostics go to stderr,
// data to files only. CPSOS_GOV_LOG in {error, info, debug} picks verbosity.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "govsim/harness.hpp"
#include "govsim/scenario_io.hpp"
#include "govsim/svg_timeline.hpp"

namespace govsim {

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValidateCmd {
    std::string scenario_path;
};

struct RunCmd {
    std::string scenario_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    Tick max_ticks = 3000;
    std::optional<AdasMode> force_mode;
};

struct BatchCmd {
    std::string scenario_dir;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    int jobs = 1;
    Tick max_ticks = 3000;
    std::optional<AdasMode> force_mode;
};

struct ReportCmd {
    std::vector<std::string> trace_paths;
    std::string out_csv;
    bool svg = false;
};

using Command = std::variant<ValidateCmd, RunCmd, BatchCmd, ReportCmd>;

// ---------------------------------------------------------------------------
// Logging

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("CPSOS_GOV_LOG");
        if (!env) return LogLevel::Error;
        const std::string_view v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

inline void log_at(LogLevel level, const std::string& message) {
    if (level > log_level() && level != LogLevel::Error) return;
    const char* tag = level == LogLevel::Error ? "error" : level == LogLevel::Info ? "info" : "debug";
    std::cerr << "govsim [" << tag << "] " << message << "\n";
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace cli_detail {

inline std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw usage_error("expected a non-negative integer for " + what + ", got '" + text + "'");
    }
}

/// "A..B" inclusive range, or a comma-separated list, or a single seed.
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const std::uint64_t from = parse_u64(text.substr(0, dots), "--seeds");
        const std::uint64_t to = parse_u64(text.substr(dots + 2), "--seeds");
        if (to < from) throw usage_error("--seeds range is inverted: " + text);
        if (to - from >= 1000000) throw usage_error("--seeds range too large: " + text);
        for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss{text};
    std::string item;
    while (std::getline(ss, item, ',')) seeds.push_back(parse_u64(item, "--seeds"));
    if (seeds.empty()) throw usage_error("--seeds must name at least one seed");
    return seeds;
}

inline std::optional<AdasMode> parse_force_mode(const std::string& text) {
    const auto mode = mode_from_string(text);
    if (!mode) throw usage_error("--force-mode must be one of off|passive|active, got '" + text + "'");
    return mode;
}

} // namespace cli_detail

inline constexpr const char* kUsage =
    "usage:\n"
    "  govsim validate <scenario>\n"
    "  govsim run <scenario> --seed N --out DIR [--max-ticks N] [--force-mode MODE]\n"
    "  govsim batch <dir> --seeds A..B --out DIR [--jobs N] [--max-ticks N] [--force-mode MODE]\n"
    "  govsim report <traces...> --csv FILE [--svg]\n";

inline Command parse_args(const std::vector<std::string>& args) {
    if (args.empty()) throw usage_error("missing subcommand");
    const std::string& sub = args[0];

    auto flag_value = [&](size_t& i, const std::string& flag) -> std::string {
        if (i + 1 >= args.size()) throw usage_error(flag + " requires a value");
        return args[++i];
    };

    if (sub == "validate") {
        ValidateCmd cmd;
        for (size_t i = 1; i < args.size(); ++i) {
            if (args[i].starts_with("--")) throw usage_error("unknown flag '" + args[i] + "'");
            if (!cmd.scenario_path.empty()) throw usage_error("validate takes one scenario path");
            cmd.scenario_path = args[i];
        }
        if (cmd.scenario_path.empty()) throw usage_error("validate requires a scenario path");
        return cmd;
    }

    if (sub == "run") {
        RunCmd cmd;
        bool have_seed = false;
        for (size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--seed") {
                cmd.seed = cli_detail::parse_u64(flag_value(i, a), "--seed");
                have_seed = true;
            } else if (a == "--out") {
                cmd.out_dir = flag_value(i, a);
            } else if (a == "--max-ticks") {
                cmd.max_ticks = static_cast<Tick>(cli_detail::parse_u64(flag_value(i, a), a));
            } else if (a == "--force-mode") {
                cmd.force_mode = cli_detail::parse_force_mode(flag_value(i, a));
            } else if (a.starts_with("--")) {
                throw usage_error("unknown flag '" + a + "'");
            } else if (cmd.scenario_path.empty()) {
                cmd.scenario_path = a;
            } else {
                throw usage_error("unexpected argument '" + a + "'");
            }
        }
        if (cmd.scenario_path.empty()) throw usage_error("run requires a scenario path");
        if (!have_seed) throw usage_error("run requires --seed");
        if (cmd.out_dir.empty()) throw usage_error("run requires --out");
        if (cmd.max_ticks <= 0) throw usage_error("--max-ticks must be positive");
        return cmd;
    }

    if (sub == "batch") {
        BatchCmd cmd;
        for (size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--seeds") {
                cmd.seeds = cli_detail::parse_seeds(flag_value(i, a));
            } else if (a == "--out") {
                cmd.out_dir = flag_value(i, a);
            } else if (a == "--jobs") {
                cmd.jobs = static_cast<int>(cli_detail::parse_u64(flag_value(i, a), a));
            } else if (a == "--max-ticks") {
                cmd.max_ticks = static_cast<Tick>(cli_detail::parse_u64(flag_value(i, a), a));
            } else if (a == "--force-mode") {
                cmd.force_mode = cli_detail::parse_force_mode(flag_value(i, a));
            } else if (a.starts_with("--")) {
                throw usage_error("unknown flag '" + a + "'");
            } else if (cmd.scenario_dir.empty()) {
                cmd.scenario_dir = a;
            } else {
                throw usage_error("unexpected argument '" + a + "'");
            }
        }
        if (cmd.scenario_dir.empty()) throw usage_error("batch requires a scenario directory");
        if (cmd.seeds.empty()) throw usage_error("batch requires --seeds");
        if (cmd.out_dir.empty()) throw usage_error("batch requires --out");
        if (cmd.jobs < 1) throw usage_error("--jobs must be >= 1");
        if (cmd.max_ticks <= 0) throw usage_error("--max-ticks must be positive");
        return cmd;
    }

    if (sub == "report") {
        ReportCmd cmd;
        for (size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--csv") {
                cmd.out_csv = flag_value(i, a);
            } else if (a == "--svg") {
                cmd.svg = true;
            } else if (a.starts_with("--")) {
                throw usage_error("unknown flag '" + a + "'");
            } else {
                cmd.trace_paths.push_back(a);
            }
        }
        if (cmd.trace_paths.empty()) throw usage_error("report requires at least one trace path");
        if (cmd.out_csv.empty()) throw usage_error("report requires --csv");
        return cmd;
    }

    throw usage_error("unknown subcommand '" + sub + "'");
}

// ---------------------------------------------------------------------------
// Command execution

namespace cli_detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Scenario load_scenario_or_throw(const std::string& path) {
    const ScenarioParseResult result = parse_scenario(read_file(path));
    for (const SchemaIssue& w : result.warnings)
        log_at(LogLevel::Info, path + ": warning: " + w.field + ": " + w.message);
    if (!result.ok()) {
        std::string msg = path + ": invalid scenario";
        for (const SchemaIssue& e : result.errors) msg += "\n  " + e.field + ": " + e.message;
        throw usage_error(msg);
    }
    return *result.scenario;
}

inline std::filesystem::path trace_path(const std::string& out_dir, const std::string& name,
                                        std::uint64_t seed) {
    return std::filesystem::path(out_dir) / (name + "_" + std::to_string(seed) + ".trace");
}

inline void write_trace_file(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_trace(trace, out);
}

} // namespace cli_detail

inline int run_validate(const ValidateCmd& cmd) {
    const ScenarioParseResult result = parse_scenario(cli_detail::read_file(cmd.scenario_path));
    for (const SchemaIssue& w : result.warnings)
        std::cerr << cmd.scenario_path << ": warning: " << w.field << ": " << w.message << "\n";
    if (!result.ok()) {
        for (const SchemaIssue& e : result.errors)
            std::cerr << cmd.scenario_path << ": error: " << e.field << ": " << e.message << "\n";
        return 2;
    }
    log_at(LogLevel::Info, cmd.scenario_path + ": ok (scenario '" + result.scenario->name + "')");
    return 0;
}

inline int run_single(const RunCmd& cmd) {
    const Scenario scenario = cli_detail::load_scenario_or_throw(cmd.scenario_path);
    std::filesystem::create_directories(cmd.out_dir);
    RunConfig cfg{scenario, cmd.seed, cmd.max_ticks, cmd.force_mode};
    const Trace trace = run_simulation(cfg);
    const auto path = cli_detail::trace_path(cmd.out_dir, scenario.name, cmd.seed);
    cli_detail::write_trace_file(trace, path);
    log_at(LogLevel::Info, "wrote " + path.string() + " (" + std::to_string(trace.events.size()) +
                               " events)");
    return 0;
}

/// Runs every (scenario, seed) pair on up to `jobs` worker threads. Each run
/// writes its own file, so the produced set is identical whatever the
/// parallelism.
inline int run_batch(const BatchCmd& cmd) {
    std::vector<std::filesystem::path> files;
    {
        std::error_code ec;
        std::filesystem::directory_iterator it(cmd.scenario_dir, ec);
        if (ec) throw usage_error("cannot read directory '" + cmd.scenario_dir + "'");
        for (const auto& entry : it)
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw usage_error("no .json scenarios in '" + cmd.scenario_dir + "'");

    std::vector<Scenario> scenarios;
    std::set<std::string> names;
    for (const auto& file : files) {
        Scenario sc = cli_detail::load_scenario_or_throw(file.string());
        if (!names.insert(sc.name).second)
            throw usage_error("duplicate scenario name '" + sc.name + "' in batch directory");
        scenarios.push_back(std::move(sc));
    }

    std::filesystem::create_directories(cmd.out_dir);
    struct Job {
        const Scenario* scenario;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const Scenario& sc : scenarios)
        for (std::uint64_t seed : cmd.seeds) jobs.push_back({&sc, seed});

    std::atomic<size_t> next{0};
    std::mutex failure_mutex;
    std::vector<std::string> failures;
    auto worker = [&] {
        for (;;) {
            const size_t index = next.fetch_add(1);
            if (index >= jobs.size()) return;
            const Job& job = jobs[index];
            try {
                RunConfig cfg{*job.scenario, job.seed, cmd.max_ticks, cmd.force_mode};
                const Trace trace = run_simulation(cfg);
                cli_detail::write_trace_file(
                    trace, cli_detail::trace_path(cmd.out_dir, job.scenario->name, job.seed));
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                failures.push_back(job.scenario->name + " seed " + std::to_string(job.seed) +
                                   ": " + e.what());
            }
        }
    };

    const int thread_count = std::min<int>(cmd.jobs, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < thread_count; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    if (!failures.empty()) {
        for (const std::string& f : failures) log_at(LogLevel::Error, f);
        return 1;
    }
    log_at(LogLevel::Info, "batch complete: " + std::to_string(jobs.size()) + " runs");
    return 0;
}

inline int run_report(const ReportCmd& cmd) {
    std::vector<Trace> traces;
    for (const std::string& path : cmd.trace_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw usage_error("cannot open '" + path + "'");
        try {
            traces.push_back(read_trace(in));
        } catch (const TraceParseError& e) {
            throw usage_error(path + ": " + e.what());
        }
    }
    const Report report = summarize(traces);
    {
        std::ofstream out(cmd.out_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + cmd.out_csv + "'");
        write_report_csv(report, out);
    }
    if (cmd.svg) {
        for (size_t i = 0; i < traces.size(); ++i) {
            const std::string svg_path = cmd.trace_paths[i] + ".svg";
            std::ofstream out(svg_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write '" + svg_path + "'");
            emit_timeline_svg(traces[i], out);
        }
    }
    log_at(LogLevel::Info, "wrote " + cmd.out_csv);
    return 0;
}

inline int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        const Command cmd = parse_args(args);
        if (const auto* v = std::get_if<ValidateCmd>(&cmd)) return run_validate(*v);
        if (const auto* r = std::get_if<RunCmd>(&cmd)) return run_single(*r);
        if (const auto* b = std::get_if<BatchCmd>(&cmd)) return run_batch(*b);
        if (const auto* rep = std::get_if<ReportCmd>(&cmd)) return run_report(*rep);
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "govsim: " << e.what() << "\n" << kUsage;
        return 2;
    } catch (const configuration_error& e) {
        std::cerr << "govsim: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "govsim: " << e.what() << "\n";
        return 1;
    }
}

} // namespace govsim
