// identities.hpp: every asserted identity as a scaled residual.
//
// A check evaluates the identity as stated (left side minus right side) and
// normalises by the largest max-entry norm among its summands. Pole proximity
// surfaces as PoleProximityError so the sampler can reject the point.

#pragma once

#include "qaybe/families.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qaybe {

enum class IdentityTag {
    aybe,
    qybe,
    unitarity,
    skew,
    cybe,
    half_cybe,
    modified_aybe,
    twist_rel,
    gauge_rel,
    dq_identities,
    proof_numerators,
    qybe_derivation_steps,
    const_qybe_s,
    const_aybe_stwisted,
    expansion_rational,
    expansion_trig,
    fay,
};

inline constexpr std::array<IdentityTag, 17> kAllIdentities = {
    IdentityTag::aybe,           IdentityTag::qybe,
    IdentityTag::unitarity,      IdentityTag::skew,
    IdentityTag::cybe,           IdentityTag::half_cybe,
    IdentityTag::modified_aybe,  IdentityTag::twist_rel,
    IdentityTag::gauge_rel,      IdentityTag::dq_identities,
    IdentityTag::proof_numerators, IdentityTag::qybe_derivation_steps,
    IdentityTag::const_qybe_s,   IdentityTag::const_aybe_stwisted,
    IdentityTag::expansion_rational, IdentityTag::expansion_trig,
    IdentityTag::fay,
};

inline std::string_view identity_name(IdentityTag t) {
    switch (t) {
    case IdentityTag::aybe: return "aybe";
    case IdentityTag::qybe: return "qybe";
    case IdentityTag::unitarity: return "unitarity";
    case IdentityTag::skew: return "skew";
    case IdentityTag::cybe: return "cybe";
    case IdentityTag::half_cybe: return "half-cybe";
    case IdentityTag::modified_aybe: return "modified-aybe";
    case IdentityTag::twist_rel: return "twist-rel";
    case IdentityTag::gauge_rel: return "gauge-rel";
    case IdentityTag::dq_identities: return "dq-identities";
    case IdentityTag::proof_numerators: return "proof-numerators";
    case IdentityTag::qybe_derivation_steps: return "qybe-derivation-steps";
    case IdentityTag::const_qybe_s: return "const-qybe-s";
    case IdentityTag::const_aybe_stwisted: return "const-aybe-stwisted";
    case IdentityTag::expansion_rational: return "expansion-rational";
    case IdentityTag::expansion_trig: return "expansion-trig";
    case IdentityTag::fay: return "fay";
    }
    return "?";
}

inline std::optional<IdentityTag> parse_identity(std::string_view name) {
    std::string norm(name);
    for (auto& c : norm)
        c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto t : kAllIdentities)
        if (identity_name(t) == norm)
            return t;
    return std::nullopt;
}

using Complex = std::complex<double>;

struct SpectralPoint {
    Complex hbar{0.31, 0.17};
    Complex x{0.23, -0.41};
    Complex y{-0.37, 0.29};
    Complex u{0.13, 0.52};
    Complex v{-0.44, -0.21};
    Complex w{0.61, 0.08};
    double pole_margin = kDefaultPoleMargin;
};

enum class Expectation { holds, violated };

struct IdentityCheck {
    IdentityTag tag = IdentityTag::aybe;
    std::string family;
    std::string label;
    SpectralPoint point;
    double residual_abs = 0;
    double residual_rel = 0;
    double tolerance = 0;
    Expectation expected = Expectation::holds;
    bool passed = false; // residual_rel <= tolerance

    bool as_expected() const {
        return expected == Expectation::holds ? passed : !passed;
    }
};

namespace tolerances {
inline constexpr double rational = 1e-10;
inline constexpr double trig = 1e-9;
inline constexpr double structural = 1e-10; // D/Q, proof chain, CYBE
inline constexpr double conjugation = 1e-12;
inline constexpr double exact_conjugation = 1e-14;
inline constexpr double fay = 1e-12;
inline constexpr double expansion_rational = 1e-13;
inline constexpr double negative_control = 1e-5;
inline constexpr double s_aybe_violation = 1e-3;
} // namespace tolerances

inline double default_tolerance(RFamily f) {
    return f == RFamily::rational || f == RFamily::classical_rational ? tolerances::rational
                                                                      : tolerances::trig;
}

using Op = GradedOp<double>;
using TwoParamFn = std::function<Op(Complex h, Complex u, Complex v)>;

/// The family as a function of (hbar, u, v); throws for one-leg families.
inline TwoParamFn family_fn(RFamily f, const Superspace& s, double margin) {
    if (f == RFamily::g_gauge)
        throw std::invalid_argument("family_fn: g-gauge is a one-leg operator");
    return [f, s, margin](Complex h, Complex u, Complex v) {
        return build_family<double>(f, s, h, u, v, margin);
    };
}

namespace detail {

inline IdentityCheck finish_check(IdentityTag tag, std::string family, std::string label,
                                  const SpectralPoint& pt, const Op& residual,
                                  std::initializer_list<const Op*> terms, double tol,
                                  Expectation expected = Expectation::holds) {
    double scale = 0;
    for (const Op* t : terms)
        scale = std::max(scale, op_norm_max(*t));
    IdentityCheck c;
    c.tag = tag;
    c.family = std::move(family);
    c.label = std::move(label);
    c.point = pt;
    c.residual_abs = op_norm_max(residual);
    c.residual_rel = scale > 0 ? c.residual_abs / scale : c.residual_abs;
    c.tolerance = tol;
    c.expected = expected;
    c.passed = c.residual_rel <= tol;
    return c;
}

inline Op at12(const Op& x) { return embed(x, {1, 2}, 3); }
inline Op at13(const Op& x) { return embed(x, {1, 3}, 3); }
inline Op at23(const Op& x) { return embed(x, {2, 3}, 3); }
inline Op at32(const Op& x) { return place(x, 3, 2, 3); }

inline Op scaled(const Op& x, Complex c) { return op_scale(x, c); }

} // namespace detail

// ------------------------------------------------------------------- AYBE

struct AybeTerms {
    Op t1, t2, t3;
};

/// R^x_12(u1,u2) R^y_23(u2,u3), R^y_13(u1,u3) R^{x-y}_12(u1,u2), R^{y-x}_23(u2,u3) R^x_13(u1,u3)
inline AybeTerms aybe_terms(const TwoParamFn& r, Complex x, Complex y, Complex u1,
                            Complex u2, Complex u3) {
    using namespace detail;
    return {compose(at12(r(x, u1, u2)), at23(r(y, u2, u3))),
            compose(at13(r(y, u1, u3)), at12(r(x - y, u1, u2))),
            compose(at23(r(y - x, u2, u3)), at13(r(x, u1, u3)))};
}

inline IdentityCheck aybe_check_fn(const TwoParamFn& r, const std::string& family,
                                   const SpectralPoint& p, double tol,
                                   Expectation expected = Expectation::holds,
                                   IdentityTag tag = IdentityTag::aybe,
                                   std::string label = "aybe") {
    const auto t = aybe_terms(r, p.x, p.y, p.u, p.v, p.w);
    const auto res = t.t1 - t.t2 - t.t3;
    return detail::finish_check(tag, family, std::move(label), p, res, {&t.t1, &t.t2, &t.t3},
                                tol, expected);
}

inline IdentityCheck aybe_residual(RFamily f, const Superspace& s, const SpectralPoint& p,
                                   double tol, Expectation expected = Expectation::holds) {
    return aybe_check_fn(family_fn(f, s, p.pole_margin), std::string(family_name(f)), p, tol,
                         expected);
}

// ------------------------------------------------------------------- QYBE

inline IdentityCheck qybe_check_fn(const TwoParamFn& r, const std::string& family,
                                   const SpectralPoint& p, double tol,
                                   Expectation expected = Expectation::holds,
                                   IdentityTag tag = IdentityTag::qybe,
                                   std::string label = "qybe") {
    using namespace detail;
    const auto r12 = at12(r(p.hbar, p.u, p.v));
    const auto r13 = at13(r(p.hbar, p.u, p.w));
    const auto r23 = at23(r(p.hbar, p.v, p.w));
    const auto lhs = compose(compose(r12, r13), r23);
    const auto rhs = compose(compose(r23, r13), r12);
    return finish_check(tag, family, std::move(label), p, lhs - rhs, {&lhs, &rhs}, tol,
                        expected);
}

inline IdentityCheck qybe_residual(RFamily f, const Superspace& s, const SpectralPoint& p,
                                   double tol) {
    return qybe_check_fn(family_fn(f, s, p.pole_margin), std::string(family_name(f)), p, tol);
}

// --------------------------------------------------- unitarity and skew

/// X12(u,v) X21(v,u) = f Id, plus the symmetry f(u,v) = f(v,u).
inline std::vector<IdentityCheck> unitarity_check(RFamily f, const Superspace& s,
                                                  const SpectralPoint& p, double tol) {
    const auto r = family_fn(f, s, p.pole_margin);
    const auto lhs = compose(r(p.hbar, p.u, p.v), flip(r(p.hbar, p.v, p.u)));
    const Complex fu = unitarity_scalar<double>(f, p.hbar, p.u, p.v);
    const auto rhs = op_scale(identity_op<double>(s, 2), fu);
    const std::string fam(family_name(f));
    std::vector<IdentityCheck> out;
    out.push_back(detail::finish_check(IdentityTag::unitarity, fam, "unitarity", p, lhs - rhs,
                                       {&lhs, &rhs}, tol));
    const Complex fv = unitarity_scalar<double>(f, p.hbar, p.v, p.u);
    IdentityCheck sym;
    sym.tag = IdentityTag::unitarity;
    sym.family = fam;
    sym.label = "f-symmetric";
    sym.point = p;
    sym.residual_abs = std::abs(fu - fv);
    sym.residual_rel = sym.residual_abs / std::max({std::abs(fu), std::abs(fv), 1e-300});
    sym.tolerance = tol;
    sym.passed = sym.residual_rel <= tol;
    out.push_back(sym);
    return out;
}

/// X12^hbar(u,v) + X21^{-hbar}(v,u) = 0; for classical families r12(u,v) + r21(v,u) = 0.
inline IdentityCheck skew_check(RFamily f, const Superspace& s, const SpectralPoint& p,
                                double tol) {
    const auto r = family_fn(f, s, p.pole_margin);
    const auto a = r(p.hbar, p.u, p.v);
    const bool classical = f == RFamily::classical_rational || f == RFamily::classical_trig;
    const auto b = flip(r(classical ? p.hbar : -p.hbar, p.v, p.u));
    return detail::finish_check(IdentityTag::skew, std::string(family_name(f)),
                                classical ? "antisymmetry" : "skew", p, a + b, {&a, &b}, tol);
}

// -------------------------------------------------------- modified AYBE

inline Complex modified_aybe_coefficient(Complex x, Complex y) {
    const double pi = pi_v<double>;
    return pi * pi / (2.0 * std::cos(pi * x / 2.0) * std::cos(pi * y / 2.0) *
                      std::cos(pi * (x - y) / 2.0));
}

/// AYBE of R-cal with the diagonal right-hand side; the same right-hand side
/// for S at constant level; and membership of that right-hand side in Q(N)^3.
inline std::vector<IdentityCheck> modified_aybe(const Superspace& s, const SpectralPoint& p,
                                                double tol) {
    guard_off_odd_integers(p.x, p.pole_margin, "x");
    guard_off_odd_integers(p.y, p.pole_margin, "y");
    guard_off_odd_integers(p.x - p.y, p.pole_margin, "x-y");
    const auto rhs = op_scale(triple_distinct_sum<double>(s),
                              modified_aybe_coefficient(p.x, p.y));
    std::vector<IdentityCheck> out;
    {
        const auto t = aybe_terms(family_fn(RFamily::rcal, s, p.pole_margin), p.x, p.y, p.u,
                                  p.v, p.w);
        const auto res = t.t1 - t.t2 - t.t3 - rhs;
        out.push_back(detail::finish_check(IdentityTag::modified_aybe, "rcal", "rcal", p, res,
                                           {&t.t1, &t.t2, &t.t3, &rhs}, tol));
    }
    {
        const auto t = aybe_terms(family_fn(RFamily::s_const, s, p.pole_margin), p.x, p.y,
                                  p.u, p.v, p.w);
        const auto res = t.t1 - t.t2 - t.t3 - rhs;
        out.push_back(detail::finish_check(IdentityTag::modified_aybe, "s-const",
                                           "s-const", p, res,
                                           {&t.t1, &t.t2, &t.t3, &rhs}, tol));
    }
    {
        IdentityCheck c;
        c.tag = IdentityTag::modified_aybe;
        c.family = "rcal";
        c.label = "rhs-in-qn3";
        c.point = p;
        for (int leg = 1; leg <= 3; ++leg)
            c.residual_abs = std::max(c.residual_abs, j_supercommutator_norm(rhs, leg));
        const double scale = op_norm_max(rhs);
        c.residual_rel = scale > 0 ? c.residual_abs / scale : c.residual_abs;
        c.tolerance = kQnTolerance;
        c.passed = c.residual_rel <= c.tolerance;
        out.push_back(c);
    }
    return out;
}

// ------------------------------------------------------------- D and Q

inline std::vector<IdentityCheck> dq_identities(const Superspace& s, const SpectralPoint& p,
                                                double tol = tolerances::structural) {
    using namespace detail;
    const double m = p.pole_margin;
    const double pi = pi_v<double>;
    auto D = [&](Complex h) { return d_part<double>(s, h, m); };
    auto Q = [&](Complex a, Complex b) { return q_part<double>(s, a, b, m); };
    const auto eq = triple_equal_sum<double>(s);
    std::vector<IdentityCheck> out;
    {
        const auto t1 = compose(at12(D(p.x)), at23(D(p.y)));
        const auto t2 = compose(at13(D(p.y)), at12(D(p.x - p.y)));
        const auto t3 = compose(at23(D(p.y - p.x)), at13(D(p.x)));
        const auto rhs = op_scale(eq, Complex(-pi * pi));
        out.push_back(finish_check(IdentityTag::dq_identities, "d-part", "dd-cubic", p,
                                   t1 - t2 - t3 - rhs, {&t1, &t2, &t3, &rhs}, tol));
    }
    const auto q12 = at12(Q(p.u, p.v)), q23 = at23(Q(p.v, p.w)), q13 = at13(Q(p.u, p.w));
    {
        const auto t1 = compose(q12, q23);
        const auto t2 = compose(q13, q12);
        const auto t3 = compose(q23, q13);
        const auto rhs = op_scale(eq, Complex(pi * pi));
        out.push_back(finish_check(IdentityTag::dq_identities, "q-part", "qq-cubic", p,
                                   t1 - t2 - t3 - rhs, {&t1, &t2, &t3, &rhs}, tol));
    }
    {
        const auto a = compose(at12(D(p.x)), q23), b = compose(q23, at13(D(p.x)));
        out.push_back(finish_check(IdentityTag::dq_identities, "d-part", "d12-q23", p, a - b,
                                   {&a, &b}, tol));
    }
    {
        const auto a = compose(at13(D(p.y)), q12), b = compose(q12, at23(D(p.y)));
        out.push_back(finish_check(IdentityTag::dq_identities, "d-part", "d13-q12", p, a - b,
                                   {&a, &b}, tol));
    }
    {
        const auto a = compose(at23(D(p.y - p.x)), q13),
                   b = compose(q13, at12(D(p.x - p.y)));
        out.push_back(finish_check(IdentityTag::dq_identities, "d-part", "d23-q13", p, a + b,
                                   {&a, &b}, tol));
    }
    return out;
}

// ----------------------------------------------------- proof numerators

inline std::vector<IdentityCheck> proof_numerators(const Superspace& s, const SpectralPoint& p,
                                                   double tol = tolerances::structural) {
    using namespace detail;
    const Complex u1 = p.u, u2 = p.v, u3 = p.w;
    guard_nonzero(u1 - u2, p.pole_margin, "u1-u2");
    guard_nonzero(u2 - u3, p.pole_margin, "u2-u3");
    guard_nonzero(u1 - u3, p.pole_margin, "u1-u3");
    guard_nonzero(u1 + u2, p.pole_margin, "u1+u2");
    guard_nonzero(u2 + u3, p.pole_margin, "u2+u3");
    const auto P = superpermutation<double>(s);
    const auto JJP = jj_p<double>(s);
    const auto p12 = at12(P), p13 = at13(P), p23 = at23(P);
    const auto jjp12 = at12(JJP), jjp23 = at23(JJP);
    const Complex one(1);
    std::vector<IdentityCheck> out;
    {
        const auto t1 = compose(scaled(p12, one / (u1 - u2)), scaled(p23, one / (u2 - u3)));
        const auto t2 = compose(scaled(p13, one / (u1 - u3)), scaled(p12, one / (u1 - u2)));
        const auto t3 = compose(scaled(p23, one / (u2 - u3)), scaled(p13, one / (u1 - u3)));
        out.push_back(finish_check(IdentityTag::proof_numerators, "rational", "p-terms", p,
                                   t1 - t2 - t3, {&t1, &t2, &t3}, tol));
    }
    {
        const auto t1 =
            compose(scaled(jjp12, one / (u1 + u2)), scaled(jjp23, one / (u2 + u3)));
        const auto t2 = compose(scaled(p13, one / (u1 - u3)), scaled(jjp12, one / (u1 + u2)));
        const auto t3 = compose(scaled(jjp23, one / (u2 + u3)), scaled(p13, one / (u1 - u3)));
        out.push_back(finish_check(IdentityTag::proof_numerators, "rational", "jjp-terms", p,
                                   t1 - t2 - t3, {&t1, &t2, &t3}, tol));
    }
    // the two numerator identities and the symmetric-group relations are exact
    {
        const auto a = compose(jjp12, jjp23), b = compose(jjp23, p13);
        out.push_back(finish_check(IdentityTag::proof_numerators, "rational",
                                   "jjp12-jjp23", p, a - b, {&a, &b}, 0.0));
    }
    {
        const auto a = compose(p13, jjp12), b = compose(jjp23, p13);
        out.push_back(finish_check(IdentityTag::proof_numerators, "rational", "p13-jjp12",
                                   p, a + b, {&a, &b}, 0.0));
    }
    {
        const auto a = compose(p12, p23), b = compose(p13, p12), c = compose(p23, p13);
        const auto r1 = a - b, r2 = b - c;
        out.push_back(finish_check(IdentityTag::proof_numerators, "rational",
                                   "symmetric-group", p,
                                   op_norm_max(r1) >= op_norm_max(r2) ? r1 : r2, {&a, &b, &c},
                                   0.0));
    }
    return out;
}

// ------------------------------------------- QYBE from AYBE, step by step

/// The derivation of QYBE from AYBE + unitarity + skew-symmetry at
/// (x, y) = (2 hbar, hbar). The left-times-r23 step is taken with +f, which is
/// what left-multiplying aybe-at-2h-h by R23 gives; `opposite_sign_residual`
/// reports the residual with -f.
inline std::vector<IdentityCheck> qybe_derivation_steps(RFamily f, const Superspace& s,
                                               const SpectralPoint& p, double tol,
                                               double* opposite_sign_residual = nullptr) {
    using namespace detail;
    const auto r = family_fn(f, s, p.pole_margin);
    const std::string fam(family_name(f));
    const Complex h = p.hbar, u1 = p.u, u2 = p.v, u3 = p.w;
    const auto r12_2h = at12(r(2.0 * h, u1, u2));
    const auto r12 = at12(r(h, u1, u2));
    const auto r23 = at23(r(h, u2, u3));
    const auto r13 = at13(r(h, u1, u3));
    const auto r13_2h = at13(r(2.0 * h, u1, u3));
    const auto r23_mh = at23(r(-h, u2, u3));
    const auto r32 = at32(r(h, u3, u2));
    const auto r32_mh = at32(r(-h, u3, u2));
    const Complex f23 = unitarity_scalar<double>(f, h, u2, u3);
    const Complex f32 = unitarity_scalar<double>(f, h, u3, u2);
    std::vector<IdentityCheck> out;
    {
        const auto t1 = compose(r12_2h, r23), t2 = compose(r13, r12),
                   t3 = compose(r23_mh, r13_2h);
        out.push_back(finish_check(IdentityTag::qybe_derivation_steps, fam, "aybe-at-2h-h", p, t1 - t2 - t3,
                                   {&t1, &t2, &t3}, tol));
    }
    const auto lhs_step = compose(compose(r23, r13), r12);
    const auto a = compose(compose(r23, r12_2h), r23);
    const auto b = op_scale(r13_2h, f23);
    const auto rhs_step = a + b;
    out.push_back(finish_check(IdentityTag::qybe_derivation_steps, fam, "left-times-r23", p, lhs_step - rhs_step,
                               {&lhs_step, &a, &b}, tol));
    if (opposite_sign_residual) {
        const auto opposite = lhs_step - (a - b);
        *opposite_sign_residual =
            op_norm_max(opposite) / std::max({op_norm_max(lhs_step), op_norm_max(a), op_norm_max(b)});
    }
    {
        const auto t1 = compose(r13_2h, r32), t2 = compose(r12, r13),
                   t3 = compose(r32_mh, r12_2h);
        out.push_back(finish_check(IdentityTag::qybe_derivation_steps, fam, "aybe-at-2h-h-swapped", p, t1 - t2 - t3,
                                   {&t1, &t2, &t3}, tol));
    }
    const auto lhs223 = compose(compose(r12, r13), r23);
    const auto c = op_scale(r13_2h, f32);
    const auto d = compose(compose(r32_mh, r12_2h), r23);
    const auto rhs223 = c - d;
    out.push_back(finish_check(IdentityTag::qybe_derivation_steps, fam, "right-times-r23", p, lhs223 - rhs223,
                               {&lhs223, &c, &d}, tol));
    out.push_back(finish_check(IdentityTag::qybe_derivation_steps, fam, "right-hand-sides-agree", p,
                               rhs_step - rhs223, {&a, &b, &c, &d}, tol));
    return out;
}

// ------------------------------------------------------------ classical

inline Op cybe_expression(const Op& r12, const Op& r13, const Op& r23) {
    auto comm = [](const Op& a, const Op& b) { return compose(a, b) - compose(b, a); };
    return comm(r12, r13) + comm(r12, r23) + comm(r13, r23);
}

inline IdentityCheck cybe_residual(RFamily f, const Superspace& s, const SpectralPoint& p,
                                   double tol = tolerances::structural) {
    using namespace detail;
    const auto r = family_fn(f, s, p.pole_margin);
    const auto r12 = at12(r(p.hbar, p.u, p.v)), r13 = at13(r(p.hbar, p.u, p.w)),
               r23 = at23(r(p.hbar, p.v, p.w));
    const auto a = compose(r12, r13), b = compose(r13, r12), c = compose(r12, r23),
               d = compose(r23, r12), e = compose(r13, r23), g = compose(r23, r13);
    return finish_check(IdentityTag::cybe, std::string(family_name(f)), "cybe", p,
                        cybe_expression(r12, r13, r23), {&a, &b, &c, &d, &e, &g}, tol);
}

/// Rational: r12 r23 - r13 r12 - r23 r13 = 0. Trigonometric: the same with
/// right-hand side -(m12 + m23 + m13), its 2<->3 image with -(m13 + m32 + m12),
/// and their difference, which is the classical YBE.
inline std::vector<IdentityCheck> half_cybe_residual(RFamily f, const Superspace& s,
                                                     const SpectralPoint& p,
                                                     double tol = tolerances::structural) {
    using namespace detail;
    const auto r = family_fn(f, s, p.pole_margin);
    const std::string fam(family_name(f));
    const Complex u1 = p.u, u2 = p.v, u3 = p.w;
    const auto r12 = at12(r(p.hbar, u1, u2)), r23 = at23(r(p.hbar, u2, u3)),
               r13 = at13(r(p.hbar, u1, u3));
    const auto t1 = compose(r12, r23), t2 = compose(r13, r12), t3 = compose(r23, r13);
    std::vector<IdentityCheck> out;
    if (f == RFamily::classical_rational) {
        out.push_back(finish_check(IdentityTag::half_cybe, fam, "half", p, t1 - t2 - t3,
                                   {&t1, &t2, &t3}, tol));
        return out;
    }
    if (f != RFamily::classical_trig)
        throw std::invalid_argument("half_cybe_residual: needs a classical family");
    const auto m = m_trig<double>(s);
    const auto m12 = at12(m), m13 = at13(m), m23 = at23(m), m32 = at32(m);
    const auto rhs1 = -(m12 + m23 + m13);
    const auto lhs1 = t1 - t2 - t3;
    out.push_back(finish_check(IdentityTag::half_cybe, fam, "half", p, lhs1 - rhs1,
                               {&t1, &t2, &t3, &rhs1}, tol));
    const auto r32 = at32(r(p.hbar, u3, u2));
    const auto s1 = compose(r13, r32), s2 = compose(r12, r13), s3 = compose(r32, r12);
    const auto rhs2 = -(m13 + m32 + m12);
    const auto lhs2 = s1 - s2 - s3;
    out.push_back(finish_check(IdentityTag::half_cybe, fam, "half-swapped", p, lhs2 - rhs2,
                               {&s1, &s2, &s3, &rhs2}, tol));
    // subtracting the two relations leaves the CYBE expression (m is flip-symmetric)
    const auto cy = cybe_expression(r12, r13, r23);
    out.push_back(finish_check(IdentityTag::half_cybe, fam, "difference-is-cybe", p,
                               (lhs1 - rhs1) - (lhs2 - rhs2) - cy,
                               {&t1, &t2, &t3, &s1, &s2, &s3}, tol));
    return out;
}

// ------------------------------------------------------------ expansions

/// R(hbar,u,v) - Id/hbar - r(u,v) at several hbar; the rational expansion is exact.
inline std::vector<IdentityCheck> expansion_check_rational(
    const Superspace& s, const SpectralPoint& p,
    double tol = tolerances::expansion_rational) {
    std::vector<IdentityCheck> out;
    const auto r = classical_r_rational<double>(s, p.u, p.v, p.pole_margin);
    const auto r_eta = classical_r_rational_eta_form<double>(s, p.u, p.v, p.pole_margin);
    const std::vector<std::pair<std::string, Complex>> hs = {
        {"sampled-hbar", p.hbar}, {"hbar=0.37+0.21i", {0.37, 0.21}}, {"hbar=10", {10, 0}}};
    for (const auto& [label, h] : hs) {
        const auto big = r_rational<double>(s, h, p.u, p.v, p.pole_margin);
        const auto id = op_scale(identity_op<double>(s, 2), Complex(1) / h);
        out.push_back(detail::finish_check(IdentityTag::expansion_rational, "rational", label,
                                           p, big - id - r, {&big, &id, &r}, tol));
    }
    out.push_back(detail::finish_check(IdentityTag::expansion_rational, "classical-rational",
                                       "eta-form", p, r - r_eta, {&r, &r_eta}, tol));
    return out;
}

struct LaurentFit {
    Op c_minus1, c0, c1;
    double remainder_h0 = 0, remainder_half = 0;
    double decay_ratio = 0;
};

/// Fits hbar R(hbar) = c_{-1} + c0 hbar + c1 hbar^2 + ... from samples at
/// +-h0, +-h0/2, +-h0/4: the odd part gives c0 (with c2, c4 as nuisance terms)
/// and the even part c_{-1} and c1 (with c3).
inline LaurentFit laurent_fit_trig(const Superspace& s, Complex u, Complex v, double h0,
                                   double margin) {
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    if (!(h0 > 0 && h0 <= 0.1))
        throw std::invalid_argument("laurent_fit_trig: h0 must lie in (0, 0.1]");
    // hbar is deliberately close to its pole at 0, so only hbar's guard is relaxed
    margin = std::min(margin, h0 / 8);
    const std::array<double, 3> hs = {h0, h0 / 2, h0 / 4};
    std::vector<Op> odd, even, plus;
    for (double h : hs) {
        const auto rp = r_trig<double>(s, Complex(h), u, v, margin);
        const auto rm = r_trig<double>(s, Complex(-h), u, v, margin);
        const auto gp = op_scale(rp, Complex(h)), gm = op_scale(rm, Complex(-h));
        odd.push_back(op_scale(gp - gm, Complex(1 / (2 * h))));
        even.push_back(op_scale(gp + gm, Complex(0.5)));
        plus.push_back(rp);
    }
    Eigen::Matrix3d vm;
    for (int k = 0; k < 3; ++k) {
        const double t = hs[static_cast<std::size_t>(k)] * hs[static_cast<std::size_t>(k)];
        vm(k, 0) = 1;
        vm(k, 1) = t;
        vm(k, 2) = t * t;
    }
    const Eigen::Matrix3d inv = vm.inverse();
    auto combine = [&](const std::vector<Op>& ys, int row) {
        Op acc(s, 2);
        for (int k = 0; k < 3; ++k)
            acc = acc + op_scale(ys[static_cast<std::size_t>(k)], Complex(inv(row, k)));
        return acc;
    };
    LaurentFit fit{combine(even, 0), combine(odd, 0), combine(even, 1)};
    auto remainder = [&](std::size_t k) {
        const double h = hs[k];
        const auto model = op_scale(fit.c_minus1, Complex(1 / h)) + fit.c0 +
                           op_scale(fit.c1, Complex(h));
        return op_norm_max(plus[k] - model);
    };
    fit.remainder_h0 = remainder(0);
    fit.remainder_half = remainder(1);
    fit.decay_ratio = fit.remainder_half > 0 ? fit.remainder_h0 / fit.remainder_half : 0;
    return fit;
}

/// Fitted c0 vs classical r, c1 vs m, and the quadratic decay of the remainder.
/// Tolerances scale with h0^2 (1e-6 and 1e-4 at h0 = 1e-2). For N = 1 the
/// hbar^2 coefficient vanishes and the decay is cubic, so the ratio check is
/// only meaningful for N >= 2.
inline std::vector<IdentityCheck> expansion_check_trig(const Superspace& s,
                                                       const SpectralPoint& p,
                                                       double h0 = 1e-2,
                                                       std::optional<LaurentFit>* fit_out = nullptr) {
    const auto fit = laurent_fit_trig(s, p.u, p.v, h0, p.pole_margin);
    const auto r = classical_r_trig<double>(s, p.u, p.v, p.pole_margin);
    const auto m = m_trig<double>(s);
    std::vector<IdentityCheck> out;
    out.push_back(detail::finish_check(IdentityTag::expansion_trig, "classical-trig", "c0", p,
                                       fit.c0 - r, {&r}, 0.01 * h0 * h0));
    out.push_back(detail::finish_check(IdentityTag::expansion_trig, "m-trig", "c1", p,
                                       fit.c1 - m, {&m}, h0 * h0));
    const auto id = identity_op<double>(s, 2);
    out.push_back(detail::finish_check(IdentityTag::expansion_trig, "trig-literal",
                                       "c-1-vs-id", p, fit.c_minus1 - id, {&id}, 0.01 * h0 * h0));
    if (s.half_dim() >= 2) {
        IdentityCheck c;
        c.tag = IdentityTag::expansion_trig;
        c.family = "trig-literal";
        c.label = "remainder-decay";
        c.point = p;
        c.residual_abs = fit.decay_ratio;
        c.residual_rel = std::abs(fit.decay_ratio - 4.0);
        c.tolerance = 0.5;
        c.passed = c.residual_rel <= c.tolerance;
        out.push_back(c);
    }
    if (fit_out)
        *fit_out = fit;
    return out;
}

// ------------------------------------------------- twist and gauge chain

/// The conjugation chain in long double: S-twisted = F S F21^{-1},
/// R-cal-twisted = F R-cal F21^{-1}, R_trig = G1 G2 R-cal-twisted G1^{-1} G2^{-1};
/// plus F P F21^{-1} = P, F J1J2P F21^{-1} = J1J2P and F in Q(N) (x) Q(N).
inline std::vector<IdentityCheck> twist_relation(const Superspace& s, const SpectralPoint& p,
                                                 double tol = tolerances::conjugation) {
    using L = long double;
    const Cx<L> h(p.hbar.real(), p.hbar.imag()), u(p.u.real(), p.u.imag()),
        v(p.v.real(), p.v.imag());
    const double m = p.pole_margin;
    std::vector<IdentityCheck> out;
    auto rec = [&](std::string family, std::string label, const GradedOp<L>& a,
                   const GradedOp<L>& b, double t) {
        const L scale = std::max(op_norm_max(a), op_norm_max(b));
        const L diff = max_abs_diff(a, b);
        IdentityCheck c;
        c.tag = IdentityTag::twist_rel;
        c.family = std::move(family);
        c.label = std::move(label);
        c.point = p;
        c.residual_abs = static_cast<double>(diff);
        c.residual_rel = static_cast<double>(scale > 0 ? diff / scale : diff);
        c.tolerance = t;
        c.passed = c.residual_rel <= t;
        out.push_back(c);
    };
    const auto sc = s_const<L>(s, h, m);
    rec("s-twisted", "s-twisted", s_twisted<L>(s, h, m), twist_conjugate(sc, h), tol);
    rec("rcal-twisted", "rcal-twisted", rcal_twisted<L>(s, h, u, v, m),
        twist_conjugate(rcal<L>(s, h, u, v, m, false), h), tol);
    const auto P = superpermutation<L>(s);
    const auto JJP = jj_p<L>(s);
    rec("f-twist", "f-conj-p", twist_conjugate(P, h), P, tolerances::exact_conjugation);
    rec("f-twist", "f-conj-jjp", twist_conjugate(JJP, h), JJP, tolerances::exact_conjugation);
    {
        const auto F = f_twist<double>(s, p.hbar);
        IdentityCheck c;
        c.tag = IdentityTag::twist_rel;
        c.family = "f-twist";
        c.label = "f-in-qn2";
        c.point = p;
        c.residual_abs = std::max(j_supercommutator_norm(F, 1), j_supercommutator_norm(F, 2));
        c.residual_rel = c.residual_abs / op_norm_max(F);
        c.tolerance = kQnTolerance;
        c.passed = c.residual_rel <= c.tolerance;
        out.push_back(c);
    }
    return out;
}

inline std::vector<IdentityCheck> gauge_relation(const Superspace& s, const SpectralPoint& p,
                                                 double tol = tolerances::conjugation) {
    using L = long double;
    const Cx<L> h(p.hbar.real(), p.hbar.imag()), u(p.u.real(), p.u.imag()),
        v(p.v.real(), p.v.imag());
    const auto lit = r_trig<L>(s, h, u, v, p.pole_margin);
    const auto route = r_trig_via_gauge<L>(s, h, u, v, p.pole_margin);
    const L scale = std::max(op_norm_max(lit), op_norm_max(route));
    const L diff = max_abs_diff(lit, route);
    IdentityCheck c;
    c.tag = IdentityTag::gauge_rel;
    c.family = "trig-literal";
    c.label = "gauge";
    c.point = p;
    c.residual_abs = static_cast<double>(diff);
    c.residual_rel = static_cast<double>(diff / scale);
    c.tolerance = tol;
    c.passed = c.residual_rel <= tol;
    // the literal D + Q split reassembles the same operator
    const auto dq = d_part<double>(s, p.hbar, p.pole_margin) +
                    q_part<double>(s, p.u, p.v, p.pole_margin);
    const auto rd = r_trig<double>(s, p.hbar, p.u, p.v, p.pole_margin);
    auto split_check = detail::finish_check(IdentityTag::gauge_rel, "trig-literal",
                                            "d-plus-q", p, rd - dq, {&rd, &dq}, tol);
    return {c, split_check};
}

// ------------------------------------------------------- constant level

inline IdentityCheck const_qybe(RFamily f, const Superspace& s, const SpectralPoint& p,
                                double tol = tolerances::trig) {
    return qybe_check_fn(family_fn(f, s, p.pole_margin), std::string(family_name(f)), p, tol,
                         Expectation::holds, IdentityTag::const_qybe_s, "const-qybe");
}

/// Constant AYBE (spectral arguments ignored). S-twisted satisfies it; S does
/// not once N >= 3, where the modified right-hand side is nonzero.
inline IdentityCheck const_aybe(RFamily f, const Superspace& s, const SpectralPoint& p,
                                double tol, Expectation expected) {
    return aybe_check_fn(family_fn(f, s, p.pole_margin), std::string(family_name(f)), p, tol,
                         expected, IdentityTag::const_aybe_stwisted, "const-aybe");
}

// ------------------------------------------------------------------ Fay

inline std::vector<IdentityCheck> fay_checks(const SpectralPoint& p) {
    const double m = p.pole_margin;
    std::vector<IdentityCheck> out;
    auto rec = [&](std::string family, std::string label, FayValue<double> fv, double tol,
                   Expectation e) {
        IdentityCheck c;
        c.tag = IdentityTag::fay;
        c.family = std::move(family);
        c.label = std::move(label);
        c.point = p;
        c.residual_abs = std::abs(fv.residual);
        c.residual_rel = fv.scale > 0 ? c.residual_abs / fv.scale : c.residual_abs;
        c.tolerance = tol;
        c.expected = e;
        c.passed = c.residual_rel <= tol;
        out.push_back(c);
    };
    rec("trig-literal", "phi-trig",
        fay_residual<double>([m](Complex a, Complex b) { return phi_trig<double>(a, b, m); },
                             p.x, p.y, p.u, p.v),
        tolerances::fay, Expectation::holds);
    rec("rational", "phi-rational",
        fay_residual<double>(
            [m](Complex a, Complex b) { return phi_rational<double>(a, b, m); }, p.x, p.y,
            p.u, p.v),
        tolerances::fay, Expectation::holds);
    rec("rational", "wrong-kernel-1/u^2",
        fay_residual<double>(
            [m](Complex a, Complex b) {
                const auto r = phi_rational<double>(a, b, m);
                return r * r;
            },
            p.x, p.y, p.u, p.v),
        tolerances::fay, Expectation::violated);
    return out;
}

// ------------------------------------------------------ negative controls

/// R with one entry shifted by 1e-3 times its largest entry. The entry is
/// chosen among the stored nonzeros by `which` (modulo nnz).
inline TwoParamFn perturbed(TwoParamFn base, std::size_t which, double rel = 1e-3) {
    return [base = std::move(base), which, rel](Complex h, Complex u, Complex v) {
        const auto r = base(h, u, v);
        auto t = r.triplets();
        if (t.empty())
            return r;
        auto& e = t[which % t.size()];
        e.value += rel * op_norm_max(r);
        return Op::from_triplets(r.space(), r.legs(), std::move(t));
    };
}

inline std::vector<IdentityCheck> negative_controls(RFamily f, const Superspace& s,
                                                    const SpectralPoint& p, std::size_t which) {
    const auto fn = perturbed(family_fn(f, s, p.pole_margin), which);
    const std::string fam = std::string(family_name(f)) + "+perturbed";
    return {aybe_check_fn(fn, fam, p, tolerances::negative_control, Expectation::violated,
                          IdentityTag::aybe, "negative-control-aybe"),
            qybe_check_fn(fn, fam, p, tolerances::negative_control, Expectation::violated,
                          IdentityTag::qybe, "negative-control-qybe")};
}

} // namespace qaybe
