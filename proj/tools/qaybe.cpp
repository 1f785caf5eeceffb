// qaybe: residual checks for the queer R-matrices.
//
//   qaybe verify   --family rational --identity aybe --N 2
//   qaybe suite    [--N 3] [--family ...] [--identity ...]
//   qaybe bench    [--sizes 2,4,8,16,32] [--mem-budget-mb 2048]
//   qaybe describe --family rational --N 1 [--hbar 0.3+0.1i --u ... --v ...]
//
// Exit codes: 0 pass, 1 fail, 2 usage or configuration error.

#include "qaybe/runner.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct RawOptions {
    std::string family, identity = "all", tol, format = "json", out;
    std::string hbar, x, y, u, v, w;
    int N = 3;
    int samples = 20;
    std::uint64_t seed = qaybe::kDefaultSeed;
    double pole_margin = qaybe::kDefaultPoleMargin;
    double mem_budget_mb = 2048;
    std::vector<int> sizes = {2, 4, 8, 16, 32};
    bool timings = false;
};

void add_common(CLI::App* sub, RawOptions& o, bool sampling) {
    sub->add_option("--family", o.family, "R-matrix family (e.g. rational, trig-literal, rcal)");
    sub->add_option("--N", o.N, "half dimension of C^{N|N}")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--pole-margin", o.pole_margin, "minimum distance to any pole")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out, "write the report here (relative paths go under "
                                    "$QAYBE_OUTPUT_DIR when set)");
    sub->add_option("--hbar", o.hbar, "pin hbar (complex, a+bi)");
    sub->add_option("--u", o.u, "pin u");
    sub->add_option("--v", o.v, "pin v");
    if (!sampling)
        return;
    sub->add_option("--identity", o.identity, "identity tag or 'all'");
    sub->add_option("--samples", o.samples, "accepted samples per identity")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "override the relative tolerance of every holds-check");
    sub->add_option("--x", o.x, "pin x");
    sub->add_option("--y", o.y, "pin y");
    sub->add_option("--w", o.w, "pin w");
    sub->add_flag("--timings", o.timings, "include wall-clock times (reports stop being "
                                          "byte-identical)");
}

std::optional<qaybe::Complex> complex_flag(const std::string& text, const char* name) {
    if (text.empty())
        return std::nullopt;
    auto z = qaybe::parse_complex(text);
    if (!z)
        throw qaybe::ConfigError(std::string("--") + name + ": cannot parse '" + text +
                                 "' as a complex number (use a+bi)");
    return *z;
}

qaybe::RunConfig make_config(const std::string& command, const RawOptions& o, bool n_given) {
    qaybe::RunConfig c;
    c.command = command;
    if (!o.family.empty()) {
        c.family = qaybe::parse_family(o.family);
        if (!c.family)
            throw qaybe::ConfigError("unknown family '" + o.family + "'");
    }
    c.identity = o.identity;
    c.N = o.N;
    c.n_given = n_given;
    c.samples = o.samples;
    if (!o.tol.empty()) {
        char* end = nullptr;
        const double t = std::strtod(o.tol.c_str(), &end);
        if (end == o.tol.c_str() || *end != '\0' || !(t > 0))
            throw qaybe::ConfigError("--tol must be a positive number");
        c.tol = t;
    }
    c.seed = o.seed;
    c.pole_margin = o.pole_margin;
    c.format = o.format;
    if (!o.out.empty())
        c.output_path = o.out;
    c.pinned.hbar = complex_flag(o.hbar, "hbar");
    c.pinned.x = complex_flag(o.x, "x");
    c.pinned.y = complex_flag(o.y, "y");
    c.pinned.u = complex_flag(o.u, "u");
    c.pinned.v = complex_flag(o.v, "v");
    c.pinned.w = complex_flag(o.w, "w");
    c.timings = o.timings;
    c.mem_budget_mb = o.mem_budget_mb;
    c.bench_sizes = o.sizes;
    return c;
}

std::filesystem::path resolve_output(const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative())
        if (const char* dir = std::getenv("QAYBE_OUTPUT_DIR"); dir && *dir)
            return std::filesystem::path(dir) / path;
    return path;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qaybe: residual checks of quantum and classical R-matrices for the queer "
                 "superalgebra"};
    app.set_version_flag("--version", qaybe::kToolVersion);
    app.require_subcommand(1);
    RawOptions o;
    auto* verify = app.add_subcommand("verify", "check identities for one family");
    auto* suite = app.add_subcommand("suite", "run the full family x identity matrix");
    auto* bench = app.add_subcommand("bench", "time r_trig construction and AYBE residuals");
    auto* describe = app.add_subcommand("describe", "list the nonzero entries of an operator");
    add_common(verify, o, true);
    add_common(suite, o, true);
    add_common(bench, o, false);
    add_common(describe, o, false);
    bench->add_option("--sizes", o.sizes, "values of N")->delimiter(',');
    bench->add_option("--mem-budget-mb", o.mem_budget_mb, "abort above this estimate")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    try {
        const bool n_given = chosen->count("--N") > 0;
        const auto cfg = make_config(command, o, n_given);

        std::ofstream file;
        if (cfg.output_path) {
            const auto path = resolve_output(*cfg.output_path);
            file.open(path, std::ios::binary | std::ios::trunc);
            if (!file)
                throw qaybe::ConfigError("cannot write output file '" + path.string() + "'");
        }
        std::ostream& out = cfg.output_path ? static_cast<std::ostream&>(file) : std::cout;
        const bool text = cfg.format == "text";

        int code = kExitPass;
        if (command == "verify" || command == "suite") {
            const auto rep = command == "verify" ? qaybe::run_verify(cfg) : qaybe::run_suite(cfg);
            const auto doc = qaybe::to_json(rep);
            out << (text ? qaybe::to_text(doc) : doc.dump(2) + "\n");
            code = rep.ok() ? kExitPass : kExitFail;
        } else if (command == "bench") {
            const auto doc = qaybe::run_bench(cfg);
            out << (text ? qaybe::bench_text(doc) : doc.dump(2) + "\n");
            code = doc["status"] == "pass" ? kExitPass : kExitFail;
        } else {
            const auto doc = qaybe::run_describe(cfg);
            out << (text ? qaybe::describe_text(doc) : doc.dump(2) + "\n");
        }
        out.flush();
        if (!out) {
            std::cerr << "qaybe: error writing report\n";
            return kExitUsage;
        }
        return code;
    } catch (const qaybe::ConfigError& e) {
        std::cerr << "qaybe: " << e.what() << "\n";
        return kExitUsage;
    } catch (const qaybe::PoleProximityError& e) {
        std::cerr << "qaybe: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "qaybe: " << e.what() << "\n";
        return kExitFail;
    }
}
