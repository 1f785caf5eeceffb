// runner.hpp: verify / suite / bench / describe.

#pragma once

#include "qaybe/dense.hpp"
#include "qaybe/identities.hpp"
#include "qaybe/report.hpp"
#include "qaybe/sampling.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace qaybe {

/// Bad flags, unknown names, identities that do not apply to a family.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// ------------------------------------------------------------ applicability

inline std::vector<IdentityTag> applicable_identities(RFamily f) {
    using T = IdentityTag;
    switch (f) {
    case RFamily::rational:
        return {T::aybe, T::qybe, T::unitarity, T::skew, T::qybe_derivation_steps,
                T::proof_numerators, T::expansion_rational, T::fay};
    case RFamily::trig_literal:
        return {T::aybe, T::qybe, T::unitarity, T::skew, T::qybe_derivation_steps, T::gauge_rel,
                T::dq_identities, T::expansion_trig, T::fay};
    case RFamily::trig_via_gauge:
        return {T::aybe, T::qybe, T::unitarity, T::skew, T::gauge_rel};
    case RFamily::s_const: return {T::const_qybe_s, T::const_aybe_stwisted, T::aybe, T::qybe};
    case RFamily::s_twisted:
        return {T::const_qybe_s, T::const_aybe_stwisted, T::aybe, T::qybe, T::twist_rel};
    case RFamily::rcal:
        return {T::aybe, T::qybe, T::unitarity, T::skew, T::modified_aybe, T::twist_rel};
    case RFamily::rcal_twisted:
        return {T::aybe, T::qybe, T::unitarity, T::skew, T::twist_rel, T::gauge_rel};
    case RFamily::classical_rational:
        return {T::cybe, T::half_cybe, T::skew, T::expansion_rational};
    case RFamily::classical_trig: return {T::cybe, T::half_cybe, T::skew, T::expansion_trig};
    case RFamily::d_part:
    case RFamily::q_part: return {T::dq_identities};
    case RFamily::f_twist: return {T::twist_rel};
    case RFamily::g_gauge: return {T::gauge_rel};
    case RFamily::m_trig: return {T::expansion_trig, T::half_cybe};
    }
    return {};
}

inline bool is_applicable(RFamily f, IdentityTag t) {
    for (auto x : applicable_identities(f))
        if (x == t)
            return true;
    return false;
}

/// Where an identity is expected to fail. R-cal and S miss the plain AYBE by
/// a diagonal term summed over triples of distinct |i|, which exists only for N >= 3.
inline Expectation expected_outcome(IdentityTag t, RFamily f, int n) {
    const bool aybe_like = t == IdentityTag::aybe || t == IdentityTag::const_aybe_stwisted;
    if (aybe_like && (f == RFamily::rcal || f == RFamily::s_const) && n >= 3)
        return Expectation::violated;
    return Expectation::holds;
}

inline std::string hint_for(IdentityTag t, RFamily f) {
    if (t == IdentityTag::aybe && f == RFamily::rcal)
        return "rcal solves the AYBE only up to a constant diagonal term; see --identity "
               "modified-aybe";
    if ((t == IdentityTag::aybe || t == IdentityTag::const_aybe_stwisted) &&
        f == RFamily::s_const)
        return "S solves the constant AYBE only up to a diagonal term; the twisted s-twisted "
               "solves it exactly (see --identity modified-aybe for the right-hand side)";
    return {};
}

/// Runs one identity for one family at one point. Throws PoleProximityError
/// when the point is too close to a pole (the caller resamples).
inline std::vector<IdentityCheck> evaluate_identity(IdentityTag t, RFamily f,
                                                    const Superspace& s,
                                                    const SpectralPoint& p) {
    const int n = s.half_dim();
    const Expectation e = expected_outcome(t, f, n);
    const double tol = default_tolerance(f);
    const bool constant = f == RFamily::s_const || f == RFamily::s_twisted;
    switch (t) {
    case IdentityTag::aybe:
    case IdentityTag::const_aybe_stwisted:
        if (constant) {
            const double ct = e == Expectation::violated ? tolerances::s_aybe_violation : tol;
            auto c = const_aybe(f, s, p, ct, e);
            c.tag = t;
            return {c};
        }
        return {aybe_residual(f, s, p, tol, e)};
    case IdentityTag::qybe:
    case IdentityTag::const_qybe_s:
        if (constant) {
            auto c = const_qybe(f, s, p, tol);
            c.tag = t;
            return {c};
        }
        return {qybe_residual(f, s, p, tol)};
    case IdentityTag::unitarity: return unitarity_check(f, s, p, tol);
    case IdentityTag::skew: return {skew_check(f, s, p, tol)};
    case IdentityTag::cybe: return {cybe_residual(f, s, p)};
    case IdentityTag::half_cybe:
        return half_cybe_residual(f == RFamily::m_trig ? RFamily::classical_trig : f, s, p);
    case IdentityTag::modified_aybe: return modified_aybe(s, p, tolerances::trig);
    case IdentityTag::twist_rel: return twist_relation(s, p);
    case IdentityTag::gauge_rel: return gauge_relation(s, p);
    case IdentityTag::dq_identities: return dq_identities(s, p);
    case IdentityTag::proof_numerators: return proof_numerators(s, p);
    case IdentityTag::qybe_derivation_steps: return qybe_derivation_steps(f, s, p, tolerances::structural);
    case IdentityTag::expansion_rational: return expansion_check_rational(s, p);
    case IdentityTag::expansion_trig: return expansion_check_trig(s, p);
    case IdentityTag::fay: {
        auto all = fay_checks(p);
        std::vector<IdentityCheck> out;
        for (auto& c : all)
            if (f == RFamily::trig_literal ? c.family == "trig-literal" : c.family != "trig-literal")
                out.push_back(c);
        return out;
    }
    }
    throw ConfigError("unknown identity");
}

// ------------------------------------------------------------- aggregation

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Each (family, identity, N, control) stream gets its own seed, so adding or
/// filtering plan items never shifts the samples of the others.
inline std::uint64_t stream_seed(std::uint64_t seed, RFamily f, IdentityTag t, int n,
                                 bool control) {
    std::uint64_t k = static_cast<std::uint64_t>(f) * 1000003ULL +
                      static_cast<std::uint64_t>(t) * 1009ULL +
                      static_cast<std::uint64_t>(n) * 17ULL + (control ? 7ULL : 0ULL);
    return splitmix64(seed ^ splitmix64(k));
}

class Aggregator {
  public:
    std::vector<Record> records;

    std::size_t add(const IdentityCheck& c, int n) {
        const auto key = std::make_tuple(static_cast<int>(c.tag), c.family, c.label, n);
        auto it = index_.find(key);
        std::size_t k;
        if (it == index_.end()) {
            k = records.size();
            index_.emplace(key, k);
            Record r;
            r.tag = c.tag;
            r.family = c.family;
            r.label = c.label;
            r.N = n;
            r.expected = c.expected;
            r.tolerance = c.tolerance;
            r.control = c.expected == Expectation::violated &&
                        (c.label.starts_with("negative-control") ||
                         c.label.starts_with("wrong-kernel"));
            records.push_back(std::move(r));
        } else {
            k = it->second;
        }
        auto& r = records[k];
        ++r.samples_run;
        r.sample_residuals.push_back(c.residual_rel);
        if (!r.worst_point || c.residual_rel > r.max_residual_rel) {
            r.max_residual_rel = c.residual_rel;
            r.worst_point = c.point;
        }
        r.max_residual_abs = std::max(r.max_residual_abs, c.residual_abs);
        r.passed = r.passed && c.passed;
        return k;
    }

  private:
    std::map<std::tuple<int, std::string, std::string, int>, std::size_t> index_;
};

inline void apply_tolerance_override(IdentityCheck& c, const std::optional<double>& tol) {
    if (!tol || c.expected != Expectation::holds || c.tolerance == 0 ||
        c.label == "remainder-decay")
        return;
    c.tolerance = *tol;
    c.passed = c.residual_rel <= *tol;
}

struct StreamSpec {
    RFamily family;
    IdentityTag tag;
    int n;
    bool negative_control = false;
};

/// Runs `samples` accepted samples of one stream into the aggregator.
inline void run_stream(const StreamSpec& spec, const RunConfig& cfg, Aggregator& agg) {
    const Superspace s(spec.n);
    Sampler sampler(stream_seed(cfg.seed, spec.family, spec.tag, spec.n, spec.negative_control),
                    cfg.pinned, cfg.pole_margin);
    std::vector<std::size_t> touched;
    int rejected = 0;
    std::string error;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < cfg.samples && error.empty(); ++i) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= kMaxAttemptsPerSample) {
                error = "no admissible sample after " + std::to_string(attempt) +
                        " attempts (pinned parameters on a pole?)";
                break;
            }
            const auto p = sampler.draw();
            try {
                auto checks = spec.negative_control
                                  ? negative_controls(spec.family, s, p,
                                                      static_cast<std::size_t>(i) * 7919u)
                                  : evaluate_identity(spec.tag, spec.family, s, p);
                for (auto& c : checks) {
                    apply_tolerance_override(c, cfg.tol);
                    const auto k = agg.add(c, spec.n);
                    if (std::find(touched.begin(), touched.end(), k) == touched.end())
                        touched.push_back(k);
                }
                break;
            } catch (const PoleProximityError&) {
                ++rejected;
            } catch (const std::exception& ex) {
                error = ex.what();
                break;
            }
        }
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (touched.empty()) {
        // nothing evaluated: keep a record so the failure is visible
        IdentityCheck c;
        c.tag = spec.tag;
        c.family = std::string(family_name(spec.family));
        c.label = spec.negative_control ? "negative-control" : std::string(identity_name(spec.tag));
        c.expected = expected_outcome(spec.tag, spec.family, spec.n);
        touched.push_back(agg.add(c, spec.n));
        agg.records[touched.back()].samples_run = 0;
        agg.records[touched.back()].sample_residuals.clear();
        agg.records[touched.back()].worst_point.reset();
        if (error.empty())
            error = "no samples evaluated";
    }
    for (auto k : touched) {
        auto& r = agg.records[k];
        r.samples_rejected += rejected;
        r.wall_ms += ms;
        if (!error.empty())
            r.error = error;
        if (!r.passed && r.expected == Expectation::holds)
            r.hint = hint_for(spec.tag, spec.family);
        if (r.expected == Expectation::violated && !spec.negative_control && r.hint.empty())
            r.hint = hint_for(spec.tag, spec.family);
    }
}

inline double rel_gap(const Op& a, const Op& b) { return relative_gap(a, b); }

} // namespace detail

// ---------------------------------------------------------------- notices

/// Diagnostics for every place where a formula admits more than one reading, evaluated at a fixed point with N = 3.
inline std::vector<Notice> collect_notices() {
    const Superspace s(3);
    const SpectralPoint p;
    const double m = p.pole_margin;
    std::vector<Notice> out;
    {
        const auto comp = rcal<double>(s, p.hbar, p.u, p.v, m, false);
        Notice n{"coth-vs-cot",
                 "index-sum form of rcal evaluated with cot and with coth; only cot "
                 "matches the form built from S, P and J1J2P",
                 {}};
        n.values["relative_gap_cot"] =
            detail::rel_gap(comp, rcal_literal<double>(s, p.hbar, p.u, p.v, m, CotReading::cot));
        n.values["relative_gap_coth"] = detail::rel_gap(
            comp, rcal_literal<double>(s, p.hbar, p.u, p.v, m, CotReading::coth));
        out.push_back(std::move(n));
    }
    {
        const auto fn_swapped = [&](Complex h, Complex, Complex) {
            return s_const<double>(s, h, m, SReading::swapped_rows);
        };
        const auto q_swapped = qybe_check_fn(fn_swapped, "s-const-swapped-rows", p, tolerances::trig);
        const auto q_used = const_qybe(RFamily::s_const, s, p);
        const auto rc_swapped = detail::rcal_from(
            s_const<double>(s, p.hbar, m, SReading::swapped_rows), p.u, p.v, m);
        Notice n{"s-components",
                 "S uses s_ij = (-1)^{p_j}(q-1/q)(e_ji + e_{-j,-i}) for i < j; the swapped "
                 "s_{-a,b} and s_{-b,-a} rows fail the constant QYBE and disagree with the "
                 "index-sum rcal",
                 {}};
        n.values["const_qybe_rel_implemented"] = q_used.residual_rel;
        n.values["const_qybe_rel_swapped_rows"] = q_swapped.residual_rel;
        n.values["rcal_gap_swapped_rows"] =
            detail::rel_gap(rc_swapped, rcal_literal<double>(s, p.hbar, p.u, p.v, m));
        out.push_back(std::move(n));
    }
    {
        Notice n{"exchange-index-range",
                 "exchange sums of the trigonometric R read as signed i != j (includes j = -i); "
                 "the |i| != |j| reading is evaluated for comparison",
                 {}};
        for (auto [range, key] : {std::pair{ExchangeRange::signed_distinct, "signed_distinct"},
                                  std::pair{ExchangeRange::distinct_absolute, "distinct_absolute"}}) {
            const auto fn = [&, range = range](Complex h, Complex u, Complex v) {
                return r_trig<double>(s, h, u, v, m, range);
            };
            using L = long double;
            const auto lit = r_trig<L>(s, {p.hbar.real(), p.hbar.imag()}, {p.u.real(), p.u.imag()},
                                       {p.v.real(), p.v.imag()}, m, range);
            const auto route = r_trig_via_gauge<L>(s, {p.hbar.real(), p.hbar.imag()},
                                                   {p.u.real(), p.u.imag()},
                                                   {p.v.real(), p.v.imag()}, m);
            nlohmann::ordered_json v;
            v["aybe_rel"] = aybe_check_fn(fn, "", p, 1).residual_rel;
            v["qybe_rel"] = qybe_check_fn(fn, "", p, 1).residual_rel;
            v["gauge_route_gap"] = static_cast<double>(detail::relative_gap(lit, route));
            n.values[key] = v;
        }
        out.push_back(std::move(n));
    }
    {
        std::optional<LaurentFit> fit;
        expansion_check_trig(s, p, 1e-2, &fit);
        const auto id = identity_op<double>(s, 2);
        const auto pi_id = op_scale(id, Complex(pi_v<double>));
        const auto r_used = classical_r_trig<double>(s, p.u, p.v, m);
        const auto r_pi_diag = classical_r_trig_pi_diagonal<double>(s, p.u, p.v, m);
        Notice n{"laurent-coefficients",
                 "coefficients fitted from hbar R(hbar) at +-h0, +-h0/2, +-h0/4 (h0 = 1e-2); the "
                 "1/hbar coefficient is Id, and the classical r carries no extra factor pi on its "
                 "diagonal",
                 {}};
        n.values["c_minus1_gap_to_Id"] = op_norm_max(fit->c_minus1 - id);
        n.values["c_minus1_gap_to_pi_Id"] = op_norm_max(fit->c_minus1 - pi_id);
        n.values["c0_gap_to_classical_r"] = op_norm_max(fit->c0 - r_used);
        n.values["c0_gap_to_pi_diagonal_classical_r"] = op_norm_max(fit->c0 - r_pi_diag);
        n.values["c1_gap_to_m"] = op_norm_max(fit->c1 - m_trig<double>(s));
        n.values["remainder_decay_ratio"] = fit->decay_ratio;
        out.push_back(std::move(n));
    }
    {
        Notice n{"qybe-derivation-sign",
                 "left-multiplying the specialised AYBE by R23 gives R23 R13 R12 = R23 R12^{2h} "
                 "R23 + f(u2,u3) R13^{2h}; the same step with -f fails",
                 {}};
        for (auto f : {RFamily::rational, RFamily::trig_literal}) {
            double opposite = 0;
            const auto steps = qybe_derivation_steps(f, s, p, tolerances::structural, &opposite);
            n.values[std::string(family_name(f))] = {{"plus_sign_rel", steps[1].residual_rel},
                                                    {"minus_f_rel", opposite}};
        }
        out.push_back(std::move(n));
    }
    return out;
}

// ------------------------------------------------------------------ verify

inline VerificationReport run_verify(const RunConfig& cfg) {
    if (!cfg.family)
        throw ConfigError("verify needs --family");
    if (cfg.N < 1)
        throw ConfigError("--N must be >= 1");
    const RFamily f = *cfg.family;
    std::vector<IdentityTag> tags;
    if (cfg.identity == "all") {
        tags = applicable_identities(f);
    } else {
        auto t = parse_identity(cfg.identity);
        if (!t)
            throw ConfigError("unknown identity '" + cfg.identity + "'");
        if (!is_applicable(f, *t))
            throw ConfigError("identity '" + cfg.identity + "' does not apply to family '" +
                              std::string(family_name(f)) + "'");
        tags = {*t};
    }
    VerificationReport rep;
    rep.config = cfg;
    detail::Aggregator agg;
    for (auto t : tags)
        detail::run_stream({f, t, cfg.N}, cfg, agg);
    rep.records = std::move(agg.records);
    rep.notices = collect_notices();
    return rep;
}

// ------------------------------------------------------------------- suite

struct SuiteItem {
    RFamily family;
    IdentityTag tag;
    bool two_leg; // also run at N = 4
};

/// The hard-coded (family x identity) matrix of the default suite.
inline std::vector<SuiteItem> suite_plan() {
    using F = RFamily;
    using T = IdentityTag;
    return {
        {F::rational, T::aybe, false},
        {F::rational, T::qybe, false},
        {F::rational, T::unitarity, true},
        {F::rational, T::skew, true},
        {F::rational, T::qybe_derivation_steps, false},
        {F::rational, T::proof_numerators, false},
        {F::rational, T::expansion_rational, true},
        {F::rational, T::fay, false},
        {F::trig_literal, T::aybe, false},
        {F::trig_literal, T::qybe, false},
        {F::trig_literal, T::unitarity, true},
        {F::trig_literal, T::skew, true},
        {F::trig_literal, T::qybe_derivation_steps, false},
        {F::trig_literal, T::gauge_rel, true},
        {F::trig_literal, T::dq_identities, false},
        {F::trig_literal, T::expansion_trig, true},
        {F::trig_literal, T::fay, false},
        {F::trig_via_gauge, T::aybe, false},
        {F::trig_via_gauge, T::qybe, false},
        {F::s_const, T::const_qybe_s, false},
        {F::s_const, T::const_aybe_stwisted, false},
        {F::s_twisted, T::const_qybe_s, false},
        {F::s_twisted, T::const_aybe_stwisted, false},
        {F::rcal, T::aybe, false},
        {F::rcal, T::qybe, false},
        {F::rcal, T::unitarity, true},
        {F::rcal, T::skew, true},
        {F::rcal, T::modified_aybe, false},
        {F::rcal_twisted, T::aybe, false},
        {F::rcal_twisted, T::qybe, false},
        {F::rcal_twisted, T::unitarity, true},
        {F::rcal_twisted, T::skew, true},
        {F::rcal_twisted, T::twist_rel, true},
        {F::classical_rational, T::cybe, false},
        {F::classical_rational, T::half_cybe, false},
        {F::classical_rational, T::skew, true},
        {F::classical_trig, T::cybe, false},
        {F::classical_trig, T::half_cybe, false},
        {F::classical_trig, T::skew, true},
    };
}

/// Families that get a perturbed copy run through AYBE and QYBE.
inline std::vector<RFamily> negative_control_families() {
    return {RFamily::rational, RFamily::trig_literal, RFamily::s_twisted, RFamily::rcal_twisted};
}

inline VerificationReport run_suite(const RunConfig& cfg) {
    std::optional<IdentityTag> only_tag;
    if (cfg.identity != "all") {
        only_tag = parse_identity(cfg.identity);
        if (!only_tag)
            throw ConfigError("unknown identity '" + cfg.identity + "'");
    }
    auto sizes_for = [&](bool two_leg) {
        if (cfg.n_given)
            return std::vector<int>{cfg.N};
        return two_leg ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{1, 2, 3};
    };
    VerificationReport rep;
    rep.config = cfg;
    detail::Aggregator agg;
    for (const auto& item : suite_plan()) {
        if (cfg.family && *cfg.family != item.family)
            continue;
        if (only_tag && *only_tag != item.tag)
            continue;
        for (int n : sizes_for(item.two_leg))
            detail::run_stream({item.family, item.tag, n}, cfg, agg);
    }
    if (!only_tag || *only_tag == IdentityTag::aybe || *only_tag == IdentityTag::qybe)
        for (auto f : negative_control_families()) {
            if (cfg.family && *cfg.family != f)
                continue;
            for (int n : sizes_for(false))
                detail::run_stream({f, IdentityTag::aybe, n, true}, cfg, agg);
        }
    if (agg.records.empty())
        throw ConfigError("the requested filter selects nothing from the suite");
    rep.records = std::move(agg.records);
    rep.notices = collect_notices();
    return rep;
}

// ------------------------------------------------------------------- bench

/// Construction of r_trig and one 3-leg AYBE residual per N, with nonzero
/// counts, a memory guard and (at N = 2) agreement with a dense evaluation.
inline nlohmann::ordered_json run_bench(const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    const double budget_bytes = cfg.mem_budget_mb * 1024.0 * 1024.0;
    constexpr double bytes_per_entry = 48; // CSR entry plus triplet/sort workspace
    Sampler sampler(cfg.seed, cfg.pinned, cfg.pole_margin);
    SpectralPoint p = sampler.draw();
    nlohmann::ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    out["command"] = "bench";
    out["config"] = {{"sizes", cfg.bench_sizes}, {"mem_budget_mb", cfg.mem_budget_mb},
                     {"seed", cfg.seed}};
    out["point"] = point_json(p);
    auto& rows = out["results"] = nlohmann::ordered_json::array();
    bool all_ok = true;
    std::vector<std::pair<double, double>> loglog;
    for (int n : cfg.bench_sizes) {
        nlohmann::ordered_json row;
        row["N"] = n;
        const Superspace s(n);
        row["dim_3leg"] = flat_dim(s, 3);
        try {
            auto guard = [&](double entries, const char* what) {
                if (entries * bytes_per_entry > budget_bytes)
                    throw MemoryBudgetError(std::string(what) + " needs ~" +
                                            std::to_string(static_cast<long long>(
                                                entries * bytes_per_entry / 1048576.0)) +
                                            " MB, over the " +
                                            std::to_string(static_cast<long long>(cfg.mem_budget_mb)) +
                                            " MB budget");
            };
            auto t0 = clock::now();
            const auto r = r_trig<double>(s, p.hbar, p.u, p.v, p.pole_margin);
            row["construct_ms"] = ms_since(t0);
            row["rtrig_nnz"] = r.nnz();
            row["rtrig_nnz_formula"] = 12 * n * n - 4 * n;
            row["nnz_over_N2"] = static_cast<double>(r.nnz()) / (n * n);
            loglog.emplace_back(std::log(static_cast<double>(n)),
                                std::log(static_cast<double>(r.nnz())));
            const double embedded = static_cast<double>(r.nnz()) * s.dim();
            guard(6 * embedded, "embedding six R factors");
            t0 = clock::now();
            const auto fn = family_fn(RFamily::trig_literal, s, p.pole_margin);
            const auto a = detail::at12(fn(p.x, p.u, p.v)), b = detail::at23(fn(p.y, p.v, p.w));
            const auto c = detail::at13(fn(p.y, p.u, p.w)), d = detail::at12(fn(p.x - p.y, p.u, p.v));
            const auto e = detail::at23(fn(p.y - p.x, p.v, p.w)), g = detail::at13(fn(p.x, p.u, p.w));
            double terms = 0;
            for (auto [l, rr] : {std::pair{&a, &b}, std::pair{&c, &d}, std::pair{&e, &g}})
                terms += static_cast<double>(product_nnz_bound(*l, *rr));
            guard(6 * embedded + terms, "AYBE products");
            const auto t1 = compose(a, b), t2 = compose(c, d), t3 = compose(e, g);
            const auto res = t1 - t2 - t3;
            const double aybe_ms = ms_since(t0);
            const double scale = std::max({op_norm_max(t1), op_norm_max(t2), op_norm_max(t3)});
            row["aybe_ms"] = aybe_ms;
            row["aybe_residual_rel"] = op_norm_max(res) / scale;
            row["product_terms"] = terms;
            row["multiply_mterms_per_s"] = aybe_ms > 0 ? terms / (aybe_ms * 1e3) : 0.0;
            row["status"] = "ok";
            if (n == 2) {
                const auto dense = (to_dense(a) * to_dense(b) - to_dense(c) * to_dense(d) -
                                    to_dense(e) * to_dense(g))
                                       .eval();
                const double gap = (dense - to_dense(res)).cwiseAbs().maxCoeff();
                out["dense_check"] = {{"N", 2}, {"max_abs_diff", gap}, {"agrees", gap <= 1e-12 * scale}};
                all_ok = all_ok && gap <= 1e-12 * scale;
            }
            if (n == 8) {
                out["n8_aybe_within_10s"] = aybe_ms <= 10000.0;
                all_ok = all_ok && aybe_ms <= 10000.0;
            }
        } catch (const MemoryBudgetError& ex) {
            row["status"] = "aborted-memory-budget";
            row["error"] = ex.what();
            all_ok = false;
        }
        rows.push_back(std::move(row));
    }
    if (loglog.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : loglog) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(loglog.size());
        out["nnz_growth_exponent"] = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    out["status"] = all_ok ? "pass" : "fail";
    return out;
}

// ---------------------------------------------------------------- describe

inline std::string multi_index_string(const Superspace& s, std::uint64_t x, int legs) {
    std::string out;
    for (SignedIndex i : unflatten(s, x, legs)) {
        if (!out.empty())
            out += ",";
        out += (i > 0 ? "+" : "") + std::to_string(i);
    }
    return out;
}

inline nlohmann::ordered_json entries_json(const Op& a) {
    auto arr = nlohmann::ordered_json::array();
    a.for_each([&](auto r, auto c, const auto& v) {
        arr.push_back({{"row", multi_index_string(a.space(), r, a.legs())},
                       {"col", multi_index_string(a.space(), c, a.legs())},
                       {"value", format_complex(v)}});
    });
    return arr;
}

inline nlohmann::ordered_json run_describe(const RunConfig& cfg) {
    if (!cfg.family)
        throw ConfigError("describe needs --family");
    const Superspace s(cfg.N);
    SpectralPoint p;
    const PinnedParameters& pin = cfg.pinned;
    if (pin.hbar) p.hbar = *pin.hbar;
    if (pin.u) p.u = *pin.u;
    if (pin.v) p.v = *pin.v;
    p.pole_margin = cfg.pole_margin;
    const RFamily f = *cfg.family;
    const auto op = build_family<double>(f, s, p.hbar, p.u, p.v, p.pole_margin);
    nlohmann::ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    out["command"] = "describe";
    out["family"] = std::string(family_name(f));
    out["N"] = cfg.N;
    out["point"] = {{"hbar", format_complex(p.hbar)}, {"u", format_complex(p.u)},
                    {"v", format_complex(p.v)}};
    out["legs"] = op.legs();
    out["nnz"] = op.nnz();
    if (op.degree())
        out["degree"] = *op.degree();
    else
        out["degree"] = nullptr;
    if (f == RFamily::rational || f == RFamily::classical_rational) {
        const Complex one(1);
        auto comps = nlohmann::ordered_json::array();
        Op sum(s, 2);
        auto comp = [&](const char* name, Op base, Complex coeff) {
            comps.push_back({{"term", name}, {"coefficient", format_complex(coeff)},
                             {"entries", entries_json(base)}});
            sum = sum + op_scale(base, coeff);
        };
        if (f == RFamily::rational)
            comp("Id", identity_op<double>(s, 2), one / p.hbar);
        comp("P12", superpermutation<double>(s), one / (p.u - p.v));
        comp("J1J2P12", jj_p<double>(s), one / (p.u + p.v));
        out["components"] = comps;
        out["components_reconstruction_gap"] = max_abs_diff(sum, op);
    }
    out["entries"] = entries_json(op);
    return out;
}

inline std::string describe_text(const nlohmann::ordered_json& j) {
    std::ostringstream os;
    os << j["family"].get<std::string>() << "  N=" << j["N"].dump() << "  legs=" << j["legs"].dump()
       << "  nnz=" << j["nnz"].dump() << "  degree=" << j["degree"].dump() << "\n";
    os << "hbar=" << j["point"]["hbar"].get<std::string>() << " u=" << j["point"]["u"].get<std::string>()
       << " v=" << j["point"]["v"].get<std::string>() << "\n";
    if (j.contains("components")) {
        for (const auto& c : j["components"]) {
            os << "\n" << c["term"].get<std::string>() << "  coefficient "
               << c["coefficient"].get<std::string>() << "\n";
            for (const auto& e : c["entries"])
                os << "  (" << e["row"].get<std::string>() << " | " << e["col"].get<std::string>()
                   << ")  " << e["value"].get<std::string>() << "\n";
        }
        os << "\ntotal\n";
    }
    for (const auto& e : j["entries"])
        os << "  (" << e["row"].get<std::string>() << " | " << e["col"].get<std::string>() << ")  "
           << e["value"].get<std::string>() << "\n";
    return os.str();
}

inline std::string bench_text(const nlohmann::ordered_json& j) {
    std::ostringstream os;
    char line[200];
    std::snprintf(line, sizeof line, "%4s %9s %8s %8s %12s %10s %12s  %s\n", "N", "dim3", "nnz",
                  "nnz/N^2", "construct_ms", "aybe_ms", "aybe_rel", "status");
    os << line;
    for (const auto& r : j["results"]) {
        if (r["status"] == "ok")
            std::snprintf(line, sizeof line, "%4d %9llu %8zu %8.2f %12.3f %10.2f %12.3e  ok\n",
                          r["N"].get<int>(), r["dim_3leg"].get<unsigned long long>(),
                          r["rtrig_nnz"].get<std::size_t>(), r["nnz_over_N2"].get<double>(),
                          r["construct_ms"].get<double>(), r["aybe_ms"].get<double>(),
                          r["aybe_residual_rel"].get<double>());
        else
            std::snprintf(line, sizeof line, "%4d %9llu  %s: %s\n", r["N"].get<int>(),
                          r["dim_3leg"].get<unsigned long long>(),
                          r["status"].get<std::string>().c_str(),
                          r.value("error", std::string()).c_str());
        os << line;
    }
    if (j.contains("nnz_growth_exponent"))
        os << "nnz growth exponent " << j["nnz_growth_exponent"].get<double>() << "\n";
    if (j.contains("dense_check"))
        os << "dense vs sparse at N=2: max |diff| " << j["dense_check"]["max_abs_diff"].get<double>()
           << "\n";
    os << "status " << j["status"].get<std::string>() << "\n";
    return os.str();
}

} // namespace qaybe
