// Acceptance checks. `acceptance <k>` runs criterion k (1..13), no argument
// runs all of them. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include "qaybe/qaybe.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>

using namespace qaybe;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr int kSamples = 20;
constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("FAILED " + what);
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string sci(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", x);
    return b;
}

/// Runs f on `count` admissible points, resampling past poles. Returns the max of f.
double max_over_samples(std::uint64_t seed, int count,
                        const std::function<double(const SpectralPoint&)>& f) {
    Sampler sampler(seed);
    double worst = 0;
    for (int k = 0; k < count; ++k)
        for (int attempt = 0;; ++attempt) {
            if (attempt > kMaxAttemptsPerSample)
                throw std::runtime_error("no admissible sample");
            try {
                worst = std::max(worst, f(sampler.draw()));
                break;
            } catch (const PoleProximityError&) {
            }
        }
    return worst;
}

double worst_rel(const std::vector<IdentityCheck>& checks) {
    double w = 0;
    for (const auto& c : checks)
        w = std::max(w, c.residual_rel);
    return w;
}

/// R12(u,v) R21(v,u) against an explicitly written scalar times Id.
double unitarity_against(RFamily fam, const Superspace& s, const SpectralPoint& p,
                         const std::function<Complex(Complex, Complex, Complex)>& scalar) {
    const auto r = family_fn(fam, s, p.pole_margin);
    const auto a = r(p.hbar, p.u, p.v);
    const auto b = flip(r(p.hbar, p.v, p.u));
    const auto lhs = compose(a, b);
    const auto rhs = op_scale(identity_op<double>(s, 2), scalar(p.hbar, p.u, p.v));
    const double scale = std::max({op_norm_max(lhs), op_norm_max(rhs), op_norm_max(a) * op_norm_max(b)});
    return max_abs_diff(lhs, rhs) / scale;
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double a = max_over_samples(kSeed + n, kSamples, [&](const SpectralPoint& p) {
            return aybe_residual(RFamily::rational, s, p, 1e-10).residual_rel;
        });
        const double q = max_over_samples(kSeed + 10 + n, kSamples, [&](const SpectralPoint& p) {
            return qybe_residual(RFamily::rational, s, p, 1e-10).residual_rel;
        });
        o.require(a <= 1e-10, "AYBE N=" + std::to_string(n));
        o.require(q <= 1e-10, "QYBE N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " aybe " + sci(a) + " qybe " + sci(q));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 30, "runtime < 30 s");
    o.note("runtime " + sci(secs) + " s");
    return o;
}

Outcome criterion2() {
    Outcome o;
    auto f = [](Complex h, Complex u, Complex v) {
        return 1.0 / (h * h) - 1.0 / ((u - v) * (u - v)) - 1.0 / ((u + v) * (u + v));
    };
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double w = max_over_samples(kSeed + 20 + n, kSamples, [&](const SpectralPoint& p) {
            return unitarity_against(RFamily::rational, s, p, f);
        });
        o.require(w <= 1e-10, "N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " " + sci(w));
    }
    return o;
}

Outcome criterion3() {
    Outcome o;
    auto f = [](Complex h, Complex u, Complex v) {
        auto s2 = [](Complex z) { return std::sin(kPi * z) * std::sin(kPi * z); };
        return kPi * kPi / s2(h) - kPi * kPi / s2(u - v) - kPi * kPi / s2(u + v);
    };
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double a = max_over_samples(kSeed + 30 + n, kSamples, [&](const SpectralPoint& p) {
            return aybe_residual(RFamily::trig_literal, s, p, 1e-9).residual_rel;
        });
        const double q = max_over_samples(kSeed + 40 + n, kSamples, [&](const SpectralPoint& p) {
            return qybe_residual(RFamily::trig_literal, s, p, 1e-9).residual_rel;
        });
        const double u = max_over_samples(kSeed + 50 + n, kSamples, [&](const SpectralPoint& p) {
            return unitarity_against(RFamily::trig_literal, s, p, f);
        });
        o.require(a <= 1e-9 && q <= 1e-9 && u <= 1e-9, "N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " aybe " + sci(a) + " qybe " + sci(q) + " unit " + sci(u));
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double sq = max_over_samples(kSeed + 60 + n, kSamples, [&](const SpectralPoint& p) {
            return const_qybe(RFamily::s_const, s, p).residual_rel;
        });
        const double tq = max_over_samples(kSeed + 70 + n, kSamples, [&](const SpectralPoint& p) {
            return const_qybe(RFamily::s_twisted, s, p).residual_rel;
        });
        const double ta = max_over_samples(kSeed + 80 + n, kSamples, [&](const SpectralPoint& p) {
            return const_aybe(RFamily::s_twisted, s, p, 1e-9, Expectation::holds).residual_rel;
        });
        o.require(sq <= 1e-9, "S QYBE N=" + std::to_string(n));
        o.require(tq <= 1e-9 && ta <= 1e-9, "S-twisted AYBE/QYBE N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " S qybe " + sci(sq) + ", S~ qybe " + sci(tq) +
               " aybe " + sci(ta));
    }
    // S must miss the constant AYBE by >= 1e-3 at every generic point, N >= 2
    for (int n : {2, 3}) {
        const Superspace s(n);
        double lowest = 1e300;
        Sampler sampler(kSeed + 90 + n);
        for (int k = 0; k < kSamples;) {
            try {
                const auto c = const_aybe(RFamily::s_const, s, sampler.draw(), 1e-3,
                                          Expectation::violated);
                lowest = std::min(lowest, c.residual_rel);
                ++k;
            } catch (const PoleProximityError&) {
            }
        }
        o.require(lowest >= 1e-3, "S constant-AYBE violation N=" + std::to_string(n) +
                                      " (min residual " + sci(lowest) + ")");
        if (lowest >= 1e-3)
            o.note("N=" + std::to_string(n) + " S aybe min " + sci(lowest));
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    const Superspace s3(3);
    const double w = max_over_samples(kSeed + 100, kSamples, [&](const SpectralPoint& p) {
        return worst_rel(modified_aybe(s3, p, 1e-9));
    });
    o.require(w <= 1e-9, "N=3 modified AYBE");
    o.note("N=3 " + sci(w));
    const Superspace s1(1);
    o.require(triple_distinct_sum<double>(s1).nnz() == 0, "N=1 right-hand side empty");
    const double a1 = max_over_samples(kSeed + 101, kSamples, [&](const SpectralPoint& p) {
        return aybe_residual(RFamily::rcal, s1, p, 1e-9).residual_rel;
    });
    o.require(a1 <= 1e-9, "N=1 plain AYBE");
    o.note("N=1 plain aybe " + sci(a1));
    return o;
}

Outcome criterion6() {
    Outcome o;
    double conj = 0, exact = 0;
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        max_over_samples(kSeed + 110 + n, kSamples, [&](const SpectralPoint& p) {
            auto checks = twist_relation(s, p);
            for (auto& c : gauge_relation(s, p))
                checks.push_back(c);
            for (const auto& c : checks) {
                if (c.label == "f-conj-p" || c.label == "f-conj-jjp")
                    exact = std::max(exact, c.residual_abs);
                else if (c.label != "f-in-qn2")
                    conj = std::max(conj, c.residual_rel);
            }
            return 0.0;
        });
    }
    o.require(conj <= 1e-12, "twist/gauge relations");
    o.require(exact <= 1e-14, "F-conjugation of P and J1J2P");
    o.note("twist/gauge " + sci(conj) + ", F P F21^-1 - P and F JJP F21^-1 - JJP " + sci(exact));
    return o;
}

Outcome criterion7() {
    Outcome o;
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double w = max_over_samples(kSeed + 120 + n, kSamples, [&](const SpectralPoint& p) {
            const auto checks = dq_identities(s, p, 1e-10);
            if (checks.size() != 5)
                throw std::logic_error("expected five D/Q identities");
            return worst_rel(checks);
        });
        o.require(w <= 1e-10, "N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " " + sci(w));
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double num = max_over_samples(kSeed + 130 + n, kSamples, [&](const SpectralPoint& p) {
            return worst_rel(proof_numerators(s, p));
        });
        const double rat = max_over_samples(kSeed + 140 + n, kSamples, [&](const SpectralPoint& p) {
            return worst_rel(qybe_derivation_steps(RFamily::rational, s, p, 1e-10));
        });
        const double tri = max_over_samples(kSeed + 150 + n, kSamples, [&](const SpectralPoint& p) {
            return worst_rel(qybe_derivation_steps(RFamily::trig_literal, s, p, 1e-10));
        });
        o.require(num <= 1e-10 && rat <= 1e-10 && tri <= 1e-10, "N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " numerators " + sci(num) + " steps " + sci(rat) + "/" +
               sci(tri));
    }
    return o;
}

Outcome criterion9() {
    Outcome o;
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        const double ex = max_over_samples(kSeed + 160 + n, kSamples, [&](const SpectralPoint& p) {
            return worst_rel(expansion_check_rational(s, p));
        });
        const double cl = max_over_samples(kSeed + 170 + n, kSamples, [&](const SpectralPoint& p) {
            double w = 0;
            for (auto f : {RFamily::classical_rational, RFamily::classical_trig}) {
                w = std::max(w, cybe_residual(f, s, p).residual_rel);
                w = std::max(w, skew_check(f, s, p, 1e-10).residual_rel);
                w = std::max(w, worst_rel(half_cybe_residual(f, s, p)));
            }
            return w;
        });
        o.require(ex <= 1e-13, "rational expansion N=" + std::to_string(n));
        o.require(cl <= 1e-10, "classical r N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " R - Id/h - r " + sci(ex) + ", cybe/skew/half " + sci(cl));
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    const double h0 = 1e-2;
    for (int n : {1, 2, 3}) {
        const Superspace s(n);
        double c0 = 0, c1 = 0, rmin = 1e300, rmax = 0;
        max_over_samples(kSeed + 180 + n, 5, [&](const SpectralPoint& p) {
            const auto fit = laurent_fit_trig(s, p.u, p.v, h0, p.pole_margin);
            c0 = std::max(c0, max_abs_diff(fit.c0, classical_r_trig<double>(s, p.u, p.v, p.pole_margin)));
            c1 = std::max(c1, max_abs_diff(fit.c1, m_trig<double>(s)));
            rmin = std::min(rmin, fit.decay_ratio);
            rmax = std::max(rmax, fit.decay_ratio);
            return 0.0;
        });
        o.require(c0 <= 1e-6, "c0 N=" + std::to_string(n));
        o.require(c1 <= 1e-4, "c1 N=" + std::to_string(n));
        // for N = 1 the hbar^2 term of the remainder vanishes and the decay is
        // quartic; the quadratic-decay ratio is asserted where that term exists
        if (n >= 2)
            o.require(rmin >= 3.5 && rmax <= 4.5, "decay ratio N=" + std::to_string(n));
        o.note("N=" + std::to_string(n) + " |c0-r| " + sci(c0) + " |c1-m| " + sci(c1) + " ratio " +
               sci(rmin) + ".." + sci(rmax));
    }
    return o;
}

Outcome criterion11() {
    Outcome o;
    double trig = 0, rat = 0, wrong = 1e300;
    max_over_samples(kSeed + 190, 100, [&](const SpectralPoint& p) {
        for (const auto& c : fay_checks(p)) {
            if (c.label == "phi-trig")
                trig = std::max(trig, c.residual_rel);
            else if (c.label == "phi-rational")
                rat = std::max(rat, c.residual_rel);
            else
                wrong = std::min(wrong, c.residual_rel);
        }
        return 0.0;
    });
    o.require(trig <= 1e-12, "phi_trig");
    o.require(rat <= 1e-14, "1/u kernel");
    o.require(wrong > 1e-6, "wrong kernel rejected");
    o.note("trig " + sci(trig) + ", rational " + sci(rat) + ", wrong kernel min " + sci(wrong));
    return o;
}

Outcome criterion12() {
    Outcome o;
    for (auto f : {RFamily::rational, RFamily::trig_literal, RFamily::trig_via_gauge,
                   RFamily::s_twisted, RFamily::rcal_twisted})
        for (int n : {1, 2, 3}) {
            const Superspace s(n);
            double lowest = 1e300;
            Sampler sampler(kSeed + 200 + n);
            for (int k = 0; k < kSamples;) {
                try {
                    const auto fn = perturbed(family_fn(f, s, kDefaultPoleMargin), k * 7919u);
                    const auto c = aybe_check_fn(fn, "", sampler.draw(), 1e-5);
                    lowest = std::min(lowest, c.residual_rel);
                    ++k;
                } catch (const PoleProximityError&) {
                }
            }
            o.require(lowest > 1e-5, std::string(family_name(f)) + " N=" + std::to_string(n));
            if (n == 3)
                o.note(std::string(family_name(f)) + " min " + sci(lowest));
        }
    return o;
}

Outcome criterion13() {
    Outcome o;
    RunConfig c;
    c.command = "bench";
    c.bench_sizes = {2, 4, 8, 16, 32};
    const auto j = run_bench(c);
    double ratio_min = 1e300, ratio_max = 0;
    for (const auto& r : j["results"]) {
        o.require(r["status"] == "ok", "N=" + r["N"].dump() + " ran");
        if (r["status"] != "ok")
            continue;
        ratio_min = std::min(ratio_min, r["nnz_over_N2"].get<double>());
        ratio_max = std::max(ratio_max, r["nnz_over_N2"].get<double>());
        if (r["N"] == 8) {
            const double secs = r["aybe_ms"].get<double>() / 1000;
            o.require(secs <= 10, "N=8 AYBE within 10 s");
            o.note("N=8 aybe " + sci(secs) + " s (dim " + r["dim_3leg"].dump() + ")");
        }
    }
    const double expo = j["nnz_growth_exponent"].get<double>();
    o.require(expo > 1.9 && expo < 2.1, "nnz growth exponent ~2");
    o.require(ratio_max / ratio_min < 1.5, "nnz/N^2 bounded");
    o.require(j["dense_check"]["agrees"].get<bool>(), "dense/sparse agreement at N=2");
    o.note("nnz exponent " + sci(expo) + ", nnz/N^2 in [" + sci(ratio_min) + ", " + sci(ratio_max) +
           "], dense gap " + sci(j["dense_check"]["max_abs_diff"].get<double>()));
    return o;
}

const std::vector<std::pair<const char*, Outcome (*)()>> kCriteria = {
    {"rational AYBE and QYBE", criterion1},
    {"rational unitarity", criterion2},
    {"trigonometric AYBE, QYBE and unitarity", criterion3},
    {"constant level S and S-twisted", criterion4},
    {"modified AYBE for rcal", criterion5},
    {"twist and gauge conjugation chain", criterion6},
    {"D/Q identities", criterion7},
    {"proof-chain checks", criterion8},
    {"classical limits", criterion9},
    {"Laurent fit", criterion10},
    {"Fay identity", criterion11},
    {"negative controls", criterion12},
    {"performance and sparsity", criterion13},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc > 1) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > static_cast<int>(kCriteria.size())) {
            std::fprintf(stderr, "usage: acceptance [1..%zu]\n", kCriteria.size());
            return 2;
        }
        which.push_back(k);
    } else {
        for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k)
            which.push_back(k);
    }
    bool all = true;
    for (int k : which) {
        Outcome o;
        try {
            o = kCriteria[k - 1].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d %-40s %s  %s\n", k, kCriteria[k - 1].first,
                    o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
