#pragma once

// Subcommands of the `weave` tool. Each returns the process exit status:
// 0 success (or periodic tail detected), 2 no periodic tail within bounds,
// 1 any error.

#include "weave/generators.hpp"
#include "weave/interleave.hpp"
#include "weave/io.hpp"
#include "weave/periodicity.hpp"
#include "weave/reconstruct.hpp"

#include <CLI11.hpp>

#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace weave::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_not_detected = 2;

inline std::string format_word(std::span<Symbol const> w) {
    std::string out = "[";
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (j > 0) {
            out += ',';
        }
        out += std::to_string(w[j]);
    }
    return out + "]";
}

inline std::string summary_line(RunResult const& run) {
    std::ostringstream os;
    auto const& st = run.final_state;
    if (st.locked()) {
        os << "locked index=" << run.trace.back().source_index << " S=" << format_word(st.fundamental->fundamental)
           << " h=" << *st.lock_block;
    } else {
        os << "unlocked";
    }
    os << " symbols=" << run.symbols.size();
    return os.str();
}

inline std::string verdict_line(std::optional<EventualPeriodicity> const& tail) {
    if (!tail) {
        return "no periodic tail within bounds";
    }
    return "periodic r=" + std::to_string(tail->preperiod) + " m=" + std::to_string(tail->period)
        + " S=" + format_word(tail->fundamental);
}

namespace detail {

    template <typename F>
    void with_output(std::optional<std::string> const& path, std::ostream& fallback, F&& write) {
        if (!path || *path == "-") {
            write(fallback);
            fallback.flush();
            return;
        }
        std::ofstream file(*path);
        if (!file) {
            throw std::runtime_error("cannot open '" + *path + "' for writing");
        }
        write(file);
        file.flush();
        if (!file) {
            throw std::runtime_error("write to '" + *path + "' failed");
        }
    }

} // namespace detail

/// Runs the interleaver; writes the token stream to config.out_path and the
/// trace to config.trace_path when set, then prints the summary line and the
/// tail detector's verdict on the output.
inline int cmd_run(io::RunConfig const& config, std::ostream& out, std::ostream& err) {
    try {
        io::validate(config);
        Family family = family_from_specs(config.specs);
        RunResult const run = run_prefix(family, config.num_blocks);
        if (config.out_path) {
            detail::with_output(config.out_path, out, [&](std::ostream& os) { io::write_tokens(os, run.symbols); });
        }
        if (config.trace_path) {
            detail::with_output(config.trace_path, out, [&](std::ostream& os) { io::write_trace(os, run.trace); });
        }
        out << summary_line(run) << '\n';
        auto const& b = config.detect;
        out << verdict_line(detect_tail(run.symbols, b.max_preperiod, b.max_period, b.min_reps)) << '\n';
        return exit_ok;
    } catch (std::exception const& e) {
        err << "weave run: " << e.what() << '\n';
        return exit_error;
    }
}

inline int cmd_detect(std::string const& stream_path, io::DetectBounds const& bounds, std::ostream& out, std::ostream& err) {
    try {
        if (bounds.min_reps < 2 || bounds.max_period == 0) {
            throw std::invalid_argument("detect needs min_reps >= 2 and max_period >= 1");
        }
        Word const prefix = io::read_tokens_file(stream_path);
        auto const tail = detect_tail(prefix, bounds.max_preperiod, bounds.max_period, bounds.min_reps);
        out << verdict_line(tail) << '\n';
        return tail ? exit_ok : exit_not_detected;
    } catch (std::exception const& e) {
        err << "weave detect: " << e.what() << '\n';
        return exit_error;
    }
}

/// Reconstructs the trace from a token stream. The trace goes to
/// `trace_path` (stdout when unset); recovered inputs, one JSON object per
/// index, go to `inputs_path` (stdout when unset).
inline int cmd_replay(std::string const& stream_path, std::optional<std::string> const& trace_path,
                      std::optional<std::string> const& inputs_path, std::ostream& out, std::ostream& err) {
    try {
        Word const output = io::read_tokens_file(stream_path);
        ReplayTrace const trace = replay(output);
        auto const inputs = recover_inputs(trace);
        detail::with_output(trace_path, out, [&](std::ostream& os) { io::write_trace(os, trace.records); });
        detail::with_output(inputs_path, out, [&](std::ostream& os) {
            for (auto const& input : inputs) {
                os << io::to_json(input).dump() << '\n';
            }
        });
        return exit_ok;
    } catch (std::exception const& e) {
        err << "weave replay: " << e.what() << '\n';
        return exit_error;
    }
}

struct DemoConfig {
    std::int64_t P{0};
    std::int64_t Q{1};
    std::int64_t D{2};
    std::size_t num_blocks{16};
    std::size_t noise_count{3};
    bool include_surd{true};
    io::DetectBounds detect;
};

/// Decoys alternate between shifted Thue-Morse words and shifted naturals.
inline std::vector<GeneratorSpec> demo_specs(DemoConfig const& demo) {
    std::vector<GeneratorSpec> specs;
    if (demo.include_surd) {
        specs.push_back(CfSurdSpec{demo.P, demo.Q, demo.D});
    }
    for (std::size_t j = 0; j < demo.noise_count; ++j) {
        if (j % 2 == 0) {
            specs.push_back(ThueMorseSpec{static_cast<std::uint64_t>(j) * 1000 + 7});
        } else {
            specs.push_back(NaturalsSpec{static_cast<Symbol>(j) * 1000});
        }
    }
    return specs;
}

struct DemoOutcome {
    RunResult run;
    std::optional<EventualPeriodicity> tail;
};

inline DemoOutcome run_demo(DemoConfig const& demo) {
    auto specs = demo_specs(demo);
    if (specs.empty()) {
        throw std::invalid_argument("demo needs the surd or at least one decoy");
    }
    Family family = family_from_specs(std::move(specs));
    DemoOutcome outcome{run_prefix(family, demo.num_blocks), std::nullopt};
    outcome.tail = detect_tail(outcome.run.symbols, demo.detect.max_preperiod, demo.detect.max_period, demo.detect.min_reps);
    return outcome;
}

/// Interleaves a quadratic surd's continued fraction with aperiodic decoys
/// and reports whether the output has a periodic tail.
inline int cmd_demo_surd(DemoConfig const& demo, std::ostream& out, std::ostream& err) {
    try {
        if (demo.num_blocks == 0 || demo.num_blocks > 24) {
            throw std::invalid_argument("demo blocks must be in 1..24");
        }
        auto const outcome = run_demo(demo);
        out << "family: " << (demo.include_surd ? "cf_surd(" + std::to_string(demo.P) + "," + std::to_string(demo.Q) + ","
                                                      + std::to_string(demo.D) + ") + "
                                                : std::string{})
            << demo.noise_count << " decoys\n";
        out << summary_line(outcome.run) << '\n';
        out << verdict_line(outcome.tail) << '\n';
        return outcome.tail ? exit_ok : exit_not_detected;
    } catch (std::exception const& e) {
        err << "weave demo-surd: " << e.what() << '\n';
        return exit_error;
    }
}

/// Parses argv and dispatches. Separate from main() so tests can drive it.
inline int run_cli(int argc, char const* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interleave sequence families so the output is eventually periodic exactly when some input sequence is", "weave"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::size_t> blocks;
    std::optional<std::string> out_path;
    std::optional<std::string> trace_path;
    std::optional<std::size_t> max_preperiod;
    std::optional<std::size_t> max_period;
    std::optional<std::size_t> min_reps;

    auto add_bounds = [&](CLI::App* cmd) {
        cmd->add_option("--max-preperiod", max_preperiod, "Largest preperiod the detector considers (default 1024)");
        cmd->add_option("--max-period", max_period, "Largest period the detector considers (default 512)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--min-reps", min_reps, "Repetitions of the period required in the tail (default 3)")
            ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    };
    auto bounds = [&] {
        io::DetectBounds b;
        b.max_preperiod = max_preperiod.value_or(b.max_preperiod);
        b.max_period = max_period.value_or(b.max_period);
        b.min_reps = min_reps.value_or(b.min_reps);
        return b;
    };

    auto* run = app.add_subcommand("run", "Run the interleaver on a configured family");
    run->add_option("--config", config_path, "JSON run config")->required();
    run->add_option("--blocks", blocks, "Number of blocks to emit (overrides config)");
    run->add_option("--out", out_path, "Token stream output path ('-' for stdout)");
    run->add_option("--trace", trace_path, "Trace output path ('-' for stdout)");

    std::string stream_path;
    auto* detect = app.add_subcommand("detect", "Look for a periodic tail in a token stream");
    detect->add_option("stream", stream_path, "Token stream path")->required();
    add_bounds(detect);

    auto* rep = app.add_subcommand("replay", "Reconstruct the trace and the inputs from a token stream");
    rep->add_option("stream", stream_path, "Token stream path")->required();
    rep->add_option("--trace", trace_path, "Trace output path (default stdout)");
    rep->add_option("--out", out_path, "Recovered inputs output path (default stdout)");

    DemoConfig demo;
    bool decoys_only = false;
    auto* dem = app.add_subcommand("demo-surd", "Interleave the continued fraction of (P + sqrt D)/Q with decoys");
    dem->add_option("--P", demo.P, "Surd numerator offset")->capture_default_str();
    dem->add_option("--Q", demo.Q, "Surd denominator")->capture_default_str();
    dem->add_option("--D", demo.D, "Surd radicand (positive non-square)")->capture_default_str();
    dem->add_option("--blocks", blocks, "Number of blocks to emit (default 16)");
    dem->add_option("--noise", demo.noise_count, "Number of aperiodic decoys")->capture_default_str();
    dem->add_flag("--decoys-only", decoys_only, "Leave the surd out of the family");
    add_bounds(dem);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        // CLI11 reports --help as a "successful" parse error.
        std::ostringstream help_out;
        std::ostringstream help_err;
        int const code = app.exit(e, help_out, help_err);
        out << help_out.str();
        err << help_err.str();
        return code == 0 ? exit_ok : exit_error;
    }

    if (run->parsed()) {
        io::RunConfig config;
        try {
            config = io::read_config_file(*config_path);
        } catch (std::exception const& e) {
            err << "weave run: " << e.what() << '\n';
            return exit_error;
        }
        if (blocks) {
            config.num_blocks = *blocks;
        }
        if (out_path) {
            config.out_path = out_path;
        }
        if (trace_path) {
            config.trace_path = trace_path;
        }
        if (max_preperiod || max_period || min_reps) {
            config.detect = bounds();
        }
        return cmd_run(config, out, err);
    }
    if (detect->parsed()) {
        return cmd_detect(stream_path, bounds(), out, err);
    }
    if (rep->parsed()) {
        return cmd_replay(stream_path, trace_path, out_path, out, err);
    }
    if (dem->parsed()) {
        demo.num_blocks = blocks.value_or(demo.num_blocks);
        demo.include_surd = !decoys_only;
        demo.detect = bounds();
        return cmd_demo_surd(demo, out, err);
    }
    return exit_error;
}

} // namespace weave::cli
