#pragma once

/**
 * @file io.hpp
 * @brief On-disk formats.
 *
 * Token stream: one ASCII decimal integer per line, newline-terminated, no
 * header.
 *
 * Trace: one JSON object per line with keys, in order,
 *   l, len, k, i, P, S, h
 * where S is an array or null and h an integer or null.
 *
 * Run config: a JSON document
 *   {
 *     "specs": [ {"kind": "cycle", "preamble": [4], "cycle": [1, 2]},
 *                {"kind": "naturals", "offset": 0},
 *                {"kind": "thue_morse", "offset": 0},
 *                {"kind": "cf_surd", "P": 0, "Q": 1, "D": 2} ],
 *     "num_blocks": 16,
 *     "max_blocks": 24,
 *     "detect": {"max_preperiod": 1024, "max_period": 512, "min_reps": 3},
 *     "out": "stream.txt",
 *     "trace": "trace.jsonl"
 *   }
 * Only "specs" is required; unknown keys are rejected.
 */

#include "weave/generators.hpp"
#include "weave/interleave.hpp"
#include "weave/reconstruct.hpp"
#include "weave/symbol.hpp"

#include "json.hpp"

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace weave::io {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ── Token stream ─────────────────────────────────────────────────────────────

inline void write_tokens(std::ostream& os, std::span<Symbol const> symbols) {
    for (Symbol s : symbols) {
        os << s << '\n';
    }
}

inline Word read_tokens(std::istream& is) {
    Word out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        Symbol value{};
        auto const* first = line.data();
        auto const* last = line.data() + line.size();
        auto const [ptr, ec] = std::from_chars(first, last, value);
        if (line.empty() || ec != std::errc{} || ptr != last) {
            throw FormatError("line " + std::to_string(line_no) + ": expected a decimal integer, got '" + line + "'");
        }
        out.push_back(value);
    }
    return out;
}

inline Word read_tokens_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open token stream '" + path + "'");
    }
    return read_tokens(in);
}

inline void write_tokens_file(std::string const& path, std::span<Symbol const> symbols) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_tokens(out, symbols);
    out.flush();
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

// ── Trace ────────────────────────────────────────────────────────────────────

inline Json to_json(BlockRecord const& rec) {
    Json j;
    j["l"] = rec.l;
    j["len"] = rec.len;
    j["k"] = rec.k_before;
    j["i"] = rec.source_index;
    j["P"] = rec.periodic_after;
    j["S"] = rec.fundamental_after ? Json(*rec.fundamental_after) : Json(nullptr);
    j["h"] = rec.lock_block_after ? Json(*rec.lock_block_after) : Json(nullptr);
    return j;
}

inline void write_trace(std::ostream& os, std::span<BlockRecord const> records) {
    for (auto const& rec : records) {
        os << to_json(rec).dump() << '\n';
    }
}

/// Trace lines parsed back, without block contents.
struct TraceLine {
    std::size_t l{};
    std::size_t len{};
    std::size_t k{};
    std::size_t i{};
    bool P{};
    std::optional<Word> S;
    std::optional<std::size_t> h;

    bool operator==(TraceLine const&) const = default;
};

inline TraceLine trace_line(BlockRecord const& rec) {
    return {rec.l, rec.len, rec.k_before, rec.source_index, rec.periodic_after, rec.fundamental_after, rec.lock_block_after};
}

inline std::vector<TraceLine> read_trace(std::istream& is) {
    std::vector<TraceLine> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            auto const j = Json::parse(line);
            TraceLine t;
            t.l = j.at("l").get<std::size_t>();
            t.len = j.at("len").get<std::size_t>();
            t.k = j.at("k").get<std::size_t>();
            t.i = j.at("i").get<std::size_t>();
            t.P = j.at("P").get<bool>();
            if (!j.at("S").is_null()) {
                t.S = j.at("S").get<Word>();
            }
            if (!j.at("h").is_null()) {
                t.h = j.at("h").get<std::size_t>();
            }
            out.push_back(std::move(t));
        } catch (nlohmann::json::exception const& e) {
            throw FormatError(std::string("bad trace line: ") + e.what());
        }
    }
    return out;
}

inline Json to_json(RecoveredInput const& input) {
    Json j;
    j["index"] = input.index;
    j["prefix"] = input.prefix;
    if (input.periodic_tail) {
        Json tail;
        tail["preperiod"] = input.periodic_tail->preperiod;
        tail["S"] = input.periodic_tail->fundamental;
        j["periodic_tail"] = std::move(tail);
    } else {
        j["periodic_tail"] = nullptr;
    }
    return j;
}

// ── Config ───────────────────────────────────────────────────────────────────

struct DetectBounds {
    std::size_t max_preperiod{1024};
    std::size_t max_period{512};
    std::size_t min_reps{3};

    bool operator==(DetectBounds const&) const = default;
};

struct RunConfig {
    std::vector<GeneratorSpec> specs;
    std::size_t num_blocks{16};
    std::size_t max_blocks{24};
    DetectBounds detect;
    std::optional<std::string> out_path;
    std::optional<std::string> trace_path;

    bool operator==(RunConfig const&) const = default;
};

inline void validate(RunConfig const& config) {
    if (config.specs.empty()) {
        throw FormatError("config needs at least one generator spec");
    }
    if (config.num_blocks == 0) {
        throw FormatError("num_blocks must be positive");
    }
    if (config.max_blocks > 40) {
        throw FormatError("max_blocks above 40 is not supported");
    }
    if (config.num_blocks > config.max_blocks) {
        throw FormatError("num_blocks " + std::to_string(config.num_blocks) + " exceeds the cap of "
                          + std::to_string(config.max_blocks));
    }
    if (config.detect.max_period == 0) {
        throw FormatError("max_period must be positive");
    }
    if (config.detect.min_reps < 2) {
        throw FormatError("min_reps must be at least 2");
    }
}

namespace detail {

    inline void reject_unknown_keys(Json const& j, std::set<std::string_view> const& allowed, std::string_view where) {
        if (!j.is_object()) {
            throw FormatError(std::string(where) + " must be an object");
        }
        for (auto const& [key, value] : j.items()) {
            if (!allowed.contains(key)) {
                throw FormatError("unknown key '" + key + "' in " + std::string(where));
            }
        }
    }

    template <typename T>
    T get_or(Json const& j, char const* key, T fallback) {
        return j.contains(key) ? j.at(key).get<T>() : fallback;
    }

} // namespace detail

inline GeneratorSpec spec_from_json(Json const& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw FormatError("generator spec needs a 'kind'");
    }
    auto const kind = j.at("kind").get<std::string>();
    if (kind == "cycle") {
        detail::reject_unknown_keys(j, {"kind", "preamble", "cycle"}, "cycle spec");
        CycleSpec s{detail::get_or<Word>(j, "preamble", {}), j.at("cycle").get<Word>()};
        if (s.cycle.empty()) {
            throw FormatError("cycle spec needs a nonempty 'cycle'");
        }
        return s;
    }
    if (kind == "naturals") {
        detail::reject_unknown_keys(j, {"kind", "offset"}, "naturals spec");
        return NaturalsSpec{detail::get_or<Symbol>(j, "offset", 0)};
    }
    if (kind == "thue_morse") {
        detail::reject_unknown_keys(j, {"kind", "offset"}, "thue_morse spec");
        return ThueMorseSpec{detail::get_or<std::uint64_t>(j, "offset", 0)};
    }
    if (kind == "cf_surd") {
        detail::reject_unknown_keys(j, {"kind", "P", "Q", "D"}, "cf_surd spec");
        return CfSurdSpec{detail::get_or<std::int64_t>(j, "P", 0), detail::get_or<std::int64_t>(j, "Q", 1),
                          j.at("D").get<std::int64_t>()};
    }
    throw FormatError("unknown generator kind '" + kind + "'");
}

inline Json to_json(GeneratorSpec const& spec) {
    return std::visit(overloaded{
                          [](CycleSpec const& s) { return Json{{"kind", "cycle"}, {"preamble", s.preamble}, {"cycle", s.cycle}}; },
                          [](NaturalsSpec const& s) { return Json{{"kind", "naturals"}, {"offset", s.offset}}; },
                          [](ThueMorseSpec const& s) { return Json{{"kind", "thue_morse"}, {"offset", s.offset}}; },
                          [](CfSurdSpec const& s) { return Json{{"kind", "cf_surd"}, {"P", s.P}, {"Q", s.Q}, {"D", s.D}}; },
                      },
                      spec);
}

inline RunConfig config_from_json(Json const& j) {
    try {
        detail::reject_unknown_keys(j, {"specs", "num_blocks", "max_blocks", "detect", "out", "trace"}, "config");
        RunConfig c;
        if (!j.contains("specs") || !j.at("specs").is_array()) {
            throw FormatError("config needs a 'specs' array");
        }
        for (auto const& s : j.at("specs")) {
            c.specs.push_back(spec_from_json(s));
        }
        c.num_blocks = detail::get_or<std::size_t>(j, "num_blocks", c.num_blocks);
        c.max_blocks = detail::get_or<std::size_t>(j, "max_blocks", c.max_blocks);
        if (j.contains("detect")) {
            auto const& d = j.at("detect");
            detail::reject_unknown_keys(d, {"max_preperiod", "max_period", "min_reps"}, "detect");
            c.detect.max_preperiod = detail::get_or<std::size_t>(d, "max_preperiod", c.detect.max_preperiod);
            c.detect.max_period = detail::get_or<std::size_t>(d, "max_period", c.detect.max_period);
            c.detect.min_reps = detail::get_or<std::size_t>(d, "min_reps", c.detect.min_reps);
        }
        if (j.contains("out")) {
            c.out_path = j.at("out").get<std::string>();
        }
        if (j.contains("trace")) {
            c.trace_path = j.at("trace").get<std::string>();
        }
        validate(c);
        return c;
    } catch (nlohmann::json::exception const& e) {
        throw FormatError(std::string("bad config: ") + e.what());
    }
}

inline Json to_json(RunConfig const& c) {
    Json specs = Json::array();
    for (auto const& s : c.specs) {
        specs.push_back(to_json(s));
    }
    Json j{{"specs", std::move(specs)},
           {"num_blocks", c.num_blocks},
           {"max_blocks", c.max_blocks},
           {"detect",
            {{"max_preperiod", c.detect.max_preperiod}, {"max_period", c.detect.max_period}, {"min_reps", c.detect.min_reps}}}};
    if (c.out_path) {
        j["out"] = *c.out_path;
    }
    if (c.trace_path) {
        j["trace"] = *c.trace_path;
    }
    return j;
}

inline RunConfig read_config_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open config '" + path + "'");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (nlohmann::json::parse_error const& e) {
        throw FormatError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace weave::io
