// report.hpp: run configuration, aggregated records, JSON and text output.
//
// JSON is canonical. The text rendering is produced from the JSON document and
// never parsed back.

#pragma once

#include "qaybe/identities.hpp"
#include "qaybe/sampling.hpp"

#include "json.hpp"

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qaybe {

inline constexpr const char* kToolName = "qaybe";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "1.0";

struct RunConfig {
    std::string command = "verify";
    std::optional<RFamily> family;
    std::string identity = "all";
    int N = 3;
    bool n_given = false;
    int samples = 20;
    std::optional<double> tol;
    std::uint64_t seed = kDefaultSeed;
    double pole_margin = kDefaultPoleMargin;
    std::string format = "json";
    std::optional<std::string> output_path;
    PinnedParameters pinned;
    bool timings = false;
    double mem_budget_mb = 2048;
    std::vector<int> bench_sizes = {2, 4, 8, 16, 32};
};

/// All samples of one (identity, family, label, N) combination.
struct Record {
    IdentityTag tag = IdentityTag::aybe;
    std::string family;
    std::string label;
    int N = 1;
    Expectation expected = Expectation::holds;
    double tolerance = 0;
    int samples_run = 0;
    int samples_rejected = 0;
    double max_residual_rel = 0;
    double max_residual_abs = 0;
    std::optional<SpectralPoint> worst_point;
    bool passed = true; // every sample within tolerance
    bool control = false; // non-vacuity control, expected to fail in every mode
    std::vector<double> sample_residuals;
    std::string hint;
    std::string error;
    double wall_ms = 0;

    bool as_expected() const {
        if (!error.empty())
            return false;
        return expected == Expectation::holds ? passed : !passed;
    }
};

struct Notice {
    std::string id;
    std::string message;
    nlohmann::ordered_json values;
};

struct VerificationReport {
    RunConfig config;
    std::vector<Record> records;
    std::vector<Notice> notices;

    /// Suite: every record matches its expectation. Verify: every record
    /// passes, except controls, which must fail.
    bool counts_as_failure(const Record& r) const {
        if (config.command == "suite" || r.control)
            return !r.as_expected();
        return !r.passed || !r.error.empty();
    }

    bool ok() const {
        for (const auto& r : records)
            if (counts_as_failure(r))
                return false;
        return !records.empty();
    }
};

// ------------------------------------------------------------------ JSON

inline nlohmann::ordered_json point_json(const SpectralPoint& p) {
    nlohmann::ordered_json j;
    j["hbar"] = format_complex(p.hbar);
    j["x"] = format_complex(p.x);
    j["y"] = format_complex(p.y);
    j["u"] = format_complex(p.u);
    j["v"] = format_complex(p.v);
    j["w"] = format_complex(p.w);
    j["pole_margin"] = p.pole_margin;
    return j;
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["family"] = c.family ? std::string(family_name(*c.family)) : std::string("all");
    j["identity"] = c.identity;
    if (c.command == "suite" && !c.n_given)
        j["N"] = "default-matrix";
    else
        j["N"] = c.N;
    j["samples"] = c.samples;
    if (c.tol)
        j["tol"] = *c.tol;
    else
        j["tol"] = "default";
    j["seed"] = c.seed;
    j["pole_margin"] = c.pole_margin;
    j["format"] = c.format;
    nlohmann::ordered_json pins = nlohmann::ordered_json::object();
    auto pin = [&](const char* k, const std::optional<Complex>& z) {
        if (z)
            pins[k] = format_complex(*z);
    };
    pin("hbar", c.pinned.hbar);
    pin("x", c.pinned.x);
    pin("y", c.pinned.y);
    pin("u", c.pinned.u);
    pin("v", c.pinned.v);
    pin("w", c.pinned.w);
    j["pinned"] = pins;
    return j;
}

inline const char* outcome_of(const Record& r) {
    if (!r.error.empty())
        return "error";
    if (r.expected == Expectation::violated)
        return r.passed ? "unexpected-pass" : "expected-fail";
    return r.passed ? "pass" : "fail";
}

inline nlohmann::ordered_json to_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["config"] = config_json(rep.config);
    auto& recs = j["records"] = nlohmann::ordered_json::array();
    std::size_t failed = 0;
    for (const auto& r : rep.records) {
        nlohmann::ordered_json o;
        o["identity"] = std::string(identity_name(r.tag));
        o["family"] = r.family;
        o["label"] = r.label;
        o["N"] = r.N;
        o["expected"] = r.expected == Expectation::holds ? "holds" : "violated";
        o["tolerance"] = r.tolerance;
        o["samples_run"] = r.samples_run;
        o["samples_rejected"] = r.samples_rejected;
        o["max_residual_rel"] = r.max_residual_rel;
        o["max_residual_abs"] = r.max_residual_abs;
        o["passed"] = r.passed && r.error.empty();
        o["outcome"] = outcome_of(r);
        if (r.control)
            o["control"] = true;
        if (r.worst_point)
            o["worst_point"] = point_json(*r.worst_point);
        o["sample_residuals"] = r.sample_residuals;
        if (!r.hint.empty())
            o["hint"] = r.hint;
        if (!r.error.empty())
            o["error"] = r.error;
        if (rep.config.timings)
            o["wall_ms"] = r.wall_ms;
        failed += rep.counts_as_failure(r) ? 1 : 0;
        recs.push_back(std::move(o));
    }
    auto& notes = j["notices"] = nlohmann::ordered_json::array();
    for (const auto& n : rep.notices)
        notes.push_back({{"id", n.id}, {"message", n.message}, {"values", n.values}});
    j["summary"] = {{"records", rep.records.size()},
                    {"failed", failed},
                    {"status", rep.ok() ? "pass" : "fail"}};
    return j;
}

// ------------------------------------------------------------------ text

inline std::string format_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

/// Human-readable rendering of a report document.
inline std::string to_text(const nlohmann::ordered_json& j) {
    std::ostringstream os;
    os << j["tool"]["name"].get<std::string>() << " " << j["tool"]["version"].get<std::string>()
       << "  schema " << j["schema_version"].get<std::string>() << "\n";
    const auto& c = j["config"];
    os << "command=" << c["command"].get<std::string>() << " family=" << c["family"].get<std::string>()
       << " identity=" << c["identity"].get<std::string>() << " N=" << c["N"].dump()
       << " samples=" << c["samples"].dump() << " seed=" << c["seed"].dump() << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-26s %-24s %2s %5s %4s %11s %9s  %s\n", "identity",
                  "family", "label", "N", "run", "rej", "max_rel", "tol", "outcome");
    os << line;
    for (const auto& r : j["records"]) {
        std::snprintf(line, sizeof line, "%-20s %-26s %-24s %2d %5d %4d %11s %9s  %s\n",
                      r["identity"].get<std::string>().c_str(),
                      r["family"].get<std::string>().c_str(),
                      r["label"].get<std::string>().c_str(), r["N"].get<int>(),
                      r["samples_run"].get<int>(), r["samples_rejected"].get<int>(),
                      format_sci(r["max_residual_rel"].get<double>()).c_str(),
                      format_sci(r["tolerance"].get<double>()).c_str(),
                      r["outcome"].get<std::string>().c_str());
        os << line;
        if (r.contains("hint"))
            os << "    hint: " << r["hint"].get<std::string>() << "\n";
        if (r.contains("error"))
            os << "    error: " << r["error"].get<std::string>() << "\n";
    }
    if (!j["notices"].empty()) {
        os << "\nnotices:\n";
        for (const auto& n : j["notices"]) {
            os << "  [" << n["id"].get<std::string>() << "] " << n["message"].get<std::string>()
               << "\n";
            for (const auto& [k, v] : n["values"].items())
                os << "      " << k << " = " << v.dump() << "\n";
        }
    }
    const auto& s = j["summary"];
    os << "\n" << s["records"].dump() << " records, " << s["failed"].dump()
       << " failed: " << s["status"].get<std::string>() << "\n";
    return os.str();
}

} // namespace qaybe
