// families.hpp: parameter-dependent operator families.
//
// Every constructor is templated on the real type. The double instantiation
// is the default everywhere; a few cross-checks run the conjugation chain in
// long double because the twisted/gauged entries go through cancellations of
// order 1e-4 followed by gauge factors up to ~1e5.

#pragma once

#include "qaybe/errors.hpp"
#include "qaybe/graded_op.hpp"
#include "qaybe/kernels.hpp"
#include "qaybe/operators.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qaybe {

inline constexpr double kDefaultPoleMargin = 0.05;
inline constexpr double kCrossCheckTolerance = 1e-12;

namespace detail {

inline int sign_of(int x) {
    if (x == 0)
        throw std::logic_error("sign(0) reached: index condition should exclude it");
    return x > 0 ? 1 : -1;
}

/// (a - b) - N sign(a - b); callers guarantee a != b.
inline int wrapped_difference(int a, int b, int n) {
    return (a - b) - n * sign_of(a - b);
}

template <class Real>
Real relative_gap(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    const Real scale = std::max(op_norm_max(a), op_norm_max(b));
    const Real diff = max_abs_diff(a, b);
    return scale > 0 ? diff / scale : diff;
}

} // namespace detail

template <class Real>
using Cx = std::complex<Real>;

// ---------------------------------------------------------------- rational

template <class Real = double>
GradedOp<Real> r_rational(const Superspace& s, Cx<Real> h, Cx<Real> u, Cx<Real> v,
                          double margin = kDefaultPoleMargin) {
    guard_nonzero(h, margin, "hbar");
    guard_nonzero(u - v, margin, "u-v");
    guard_nonzero(u + v, margin, "u+v");
    const Cx<Real> one(1);
    return op_scale(identity_op<Real>(s, 2), one / h) +
           op_scale(superpermutation<Real>(s), one / (u - v)) +
           op_scale(jj_p<Real>(s), one / (u + v));
}

/// Same operator rendered as the index sum
/// sum (-1)^{p_j} [e_ij (x) e_ji / (u-v) + e_ij (x) e_{-j,-i} / (u+v)] + Id/hbar.
template <class Real = double>
GradedOp<Real> r_rational_index_form(const Superspace& s, Cx<Real> h, Cx<Real> u,
                                     Cx<Real> v, double margin = kDefaultPoleMargin) {
    guard_nonzero(h, margin, "hbar");
    guard_nonzero(u - v, margin, "u-v");
    guard_nonzero(u + v, margin, "u+v");
    TwoLegBuilder<Real> b(s);
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis())
            b.add_diag(Cx<Real>(1) / h, i, j);
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis()) {
            const Real sg = Superspace::parity(j) ? -1 : 1;
            b.add(sg / (u - v), i, j, j, i);
            b.add(sg / (u + v), i, j, -j, -i);
        }
    return std::move(b).build();
}

template <class Real = double>
GradedOp<Real> classical_r_rational(const Superspace& s, Cx<Real> u, Cx<Real> v,
                                    double margin = kDefaultPoleMargin) {
    guard_nonzero(u - v, margin, "u-v");
    guard_nonzero(u + v, margin, "u+v");
    const Cx<Real> one(1);
    return op_scale(superpermutation<Real>(s), one / (u - v)) +
           op_scale(jj_p<Real>(s), one / (u + v));
}

/// P/(u-v) + (Id (x) eta) P/(u+v)
template <class Real = double>
GradedOp<Real> classical_r_rational_eta_form(const Superspace& s, Cx<Real> u,
                                             Cx<Real> v,
                                             double margin = kDefaultPoleMargin) {
    guard_nonzero(u - v, margin, "u-v");
    guard_nonzero(u + v, margin, "u+v");
    const auto p = superpermutation<Real>(s);
    const Cx<Real> one(1);
    return op_scale(p, one / (u - v)) + op_scale(eta_on_leg(p, 2), one / (u + v));
}

// ---------------------------------------------------------- constant level

enum class SReading { corrected, swapped_rows };

/// S = 2 pi i/(q - 1/q) sum_{i<=j} e_ij (x) s_ij with q = exp(pi i hbar).
///
/// Off-diagonal components use s_ij = (-1)^{p_j}(q - 1/q)(e_ji + e_{-j,-i}) for
/// i < j in the order -N < ... < -1 < 1 < ... < N. `swapped_rows` is the other
/// reading of the table, which differs in the s_{-a,b} and s_{-b,-a} rows and does not
/// solve the constant QYBE; it is kept for diagnostics only.
template <class Real = double>
GradedOp<Real> s_const(const Superspace& s, Cx<Real> h,
                       double margin = kDefaultPoleMargin,
                       SReading reading = SReading::corrected) {
    guard_off_integers(h, margin, "hbar");
    const Real pi = pi_v<Real>;
    const Cx<Real> q = std::exp(Cx<Real>(0, pi) * h);
    const Cx<Real> qi = Cx<Real>(1) / q;
    const Cx<Real> dq = q - qi;
    const Cx<Real> pref = Cx<Real>(0, 2 * pi) / dq;
    const int n = s.half_dim();
    TwoLegBuilder<Real> b(s);
    for (int a = 1; a <= n; ++a) {
        for (SignedIndex k : s.basis()) {
            b.add(pref, a, a, k, k);
            b.add(pref, -a, -a, k, k);
        }
        for (SignedIndex k : {a, -a}) {
            b.add(pref * (q - Real(1)), a, a, k, k);
            b.add(pref * (qi - Real(1)), -a, -a, k, k);
        }
    }
    // signed indices compare in the order -N < ... < -1 < 1 < ... < N
    const auto basis = s.basis();
    for (SignedIndex i : basis)
        for (SignedIndex j : basis) {
            if (!(i < j))
                continue;
            Cx<Real> c = pref * dq * Real(Superspace::parity(j) ? -1 : 1);
            SignedIndex k1 = j, l1 = i, k2 = -j, l2 = -i;
            if (reading == SReading::swapped_rows) {
                if (i < 0 && j > 0) {
                    // swapped: s_{-a,b} = -(q - 1/q)(e_{b,-a} + e_{-b,a})
                    c = -pref * dq;
                } else if (i < 0 && j < 0) {
                    // swapped: s_{-b,-a} = -(q - 1/q)(e_{ba} + e_{-b,-a})
                    c = -pref * dq;
                    k1 = -i, l1 = -j, k2 = i, l2 = j;
                }
            }
            b.add(c, i, j, k1, l1);
            b.add(c, i, j, k2, l2);
        }
    return std::move(b).build();
}

/// F = sum_{a,b} exp(pi i hbar ((a-b) - N sign(a-b)) / 2N) pi_a (x) pi_b,
/// pi_a = e_aa + e_{-a,-a}; the exponent is 0 for a = b.
template <class Real = double>
GradedOp<Real> f_twist(const Superspace& s, Cx<Real> h, int power = 1) {
    const int n = s.half_dim();
    const Real pi = pi_v<Real>;
    TwoLegBuilder<Real> b(s);
    for (int a = 1; a <= n; ++a)
        for (int c = 1; c <= n; ++c) {
            const int e = a == c ? 0 : detail::wrapped_difference(a, c, n);
            const Cx<Real> val =
                std::exp(Cx<Real>(0, pi) * h * Real(power * e) / Real(2 * n));
            for (SignedIndex i : {a, -a})
                for (SignedIndex j : {c, -c})
                    b.add_diag(val, i, j);
        }
    return std::move(b).build();
}

template <class Real = double>
GradedOp<Real> f_twist_inverse(const Superspace& s, Cx<Real> h) {
    return f_twist<Real>(s, h, -1);
}

/// F12 X F21^{-1}
template <class Real>
GradedOp<Real> twist_conjugate(const GradedOp<Real>& x, Cx<Real> h) {
    const auto& s = x.space();
    return compose(compose(f_twist<Real>(s, h), x), flip(f_twist_inverse<Real>(s, h)));
}

template <class Real = double>
GradedOp<Real> s_twisted(const Superspace& s, Cx<Real> h,
                         double margin = kDefaultPoleMargin) {
    return twist_conjugate(s_const<Real>(s, h, margin), h);
}

// ------------------------------------------------------------- R-cal forms

namespace detail {
template <class Real>
GradedOp<Real> rcal_from(const GradedOp<Real>& s_part, Cx<Real> u, Cx<Real> v,
                         double margin) {
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    const auto& s = s_part.space();
    const Real pi = pi_v<Real>;
    const Cx<Real> mi(0, -pi);
    const auto cp = pi * std::exp(mi * (u - v)) / std::sin(pi * (u - v));
    const auto cj = pi * std::exp(mi * (u + v)) / std::sin(pi * (u + v));
    return s_part + op_scale(superpermutation<Real>(s), cp) + op_scale(jj_p<Real>(s), cj);
}
} // namespace detail

enum class CotReading { cot, coth };

/// The index-sum rendering of R-cal; `coth` is the hyperbolic
/// function in the diagonal term (diagnostic only).
template <class Real = double>
GradedOp<Real> rcal_literal(const Superspace& s, Cx<Real> h, Cx<Real> u, Cx<Real> v,
                            double margin = kDefaultPoleMargin,
                            CotReading reading = CotReading::cot) {
    guard_off_integers(h, margin, "hbar");
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    const Real pi = pi_v<Real>;
    const Cx<Real> i_pi(0, pi);
    const auto csc_h = Real(1) / std::sin(pi * h);
    const auto ch = reading == CotReading::cot ? cot(pi * h) : coth(pi * h);
    const auto cm = cot(pi * (u - v)), cpl = cot(pi * (u + v));
    const auto sm = std::sin(pi * (u - v)), sp = std::sin(pi * (u + v));
    TwoLegBuilder<Real> b(s);
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis())
            b.add_diag(pi * csc_h, i, j);
    for (SignedIndex a : s.basis()) {
        const Real sa = Superspace::parity(a) ? -1 : 1;
        b.add_diag(pi * (sa * cm + ch - csc_h), a, a);
        b.add_diag(pi * (sa * cpl + ch - csc_h), a, -a);
        for (SignedIndex c : s.basis()) {
            if (!(a < c))
                continue;
            const Real sc = Superspace::parity(c) ? -1 : 1;
            b.add(pi / sm * sc * std::exp(i_pi * (u - v)), a, c, c, a);
            b.add(pi / sm * sa * std::exp(-i_pi * (u - v)), c, a, a, c);
            b.add(pi / sp * sc * std::exp(i_pi * (u + v)), a, c, -c, -a);
            b.add(pi / sp * sa * std::exp(-i_pi * (u + v)), c, a, -a, -c);
        }
    }
    return std::move(b).build();
}

/// S + pi e^{-pi i(u-v)}/sin(pi(u-v)) P + pi e^{-pi i(u+v)}/sin(pi(u+v)) J1J2P,
/// checked against the index-sum rendering.
template <class Real = double>
GradedOp<Real> rcal(const Superspace& s, Cx<Real> h, Cx<Real> u, Cx<Real> v,
                    double margin = kDefaultPoleMargin, bool cross_check = true) {
    auto out = detail::rcal_from(s_const<Real>(s, h, margin), u, v, margin);
    if (cross_check) {
        const Real gap = detail::relative_gap(out, rcal_literal<Real>(s, h, u, v, margin));
        if (!(gap <= static_cast<Real>(kCrossCheckTolerance)))
            throw CrossCheckError("rcal: compositional and index-sum forms disagree",
                                  static_cast<double>(gap));
    }
    return out;
}

template <class Real = double>
GradedOp<Real> rcal_twisted(const Superspace& s, Cx<Real> h, Cx<Real> u, Cx<Real> v,
                            double margin = kDefaultPoleMargin) {
    return detail::rcal_from(s_twisted<Real>(s, h, margin), u, v, margin);
}

// ------------------------------------------------------------------- gauge

/// G(u) = sum_j exp(pi i u (j-1)/N) e_jj over all signed j.
template <class Real = double>
GradedOp<Real> g_gauge(const Superspace& s, Cx<Real> u, int power = 1) {
    const Real pi = pi_v<Real>;
    const int n = s.half_dim();
    std::vector<typename GradedOp<Real>::Triplet> t;
    for (SignedIndex j : s.basis()) {
        const auto p = static_cast<std::uint64_t>(s.position(j));
        t.push_back({p, p, std::exp(Cx<Real>(0, pi) * u * Real(power * (j - 1)) / Real(n))});
    }
    return GradedOp<Real>::from_triplets(s, 1, std::move(t));
}

template <class Real = double>
GradedOp<Real> g_gauge_inverse(const Superspace& s, Cx<Real> u) {
    return g_gauge<Real>(s, u, -1);
}

/// G1(u) G2(v) X G1(u)^{-1} G2(v)^{-1}
template <class Real>
GradedOp<Real> gauge_conjugate(const GradedOp<Real>& x, Cx<Real> u, Cx<Real> v) {
    const auto& s = x.space();
    const auto g = graded_tensor(g_gauge<Real>(s, u), g_gauge<Real>(s, v));
    const auto gi = graded_tensor(g_gauge_inverse<Real>(s, u), g_gauge_inverse<Real>(s, v));
    return compose(compose(g, x), gi);
}

template <class Real = double>
GradedOp<Real> r_trig_via_gauge(const Superspace& s, Cx<Real> h, Cx<Real> u, Cx<Real> v,
                                double margin = kDefaultPoleMargin) {
    return gauge_conjugate(rcal_twisted<Real>(s, h, u, v, margin), u, v);
}

// --------------------------------------------------------- trigonometric R

/// Which pairs enter the two exchange sums of the trigonometric formula.
enum class ExchangeRange {
    signed_distinct,   // i != j as signed indices (includes j = -i)
    distinct_absolute, // |i| != |j|
};

namespace detail {

/// D(hbar): the hbar-only part.
template <class Real>
void add_d_terms(TwoLegBuilder<Real>& b, const Superspace& s, Cx<Real> h) {
    const Real pi = pi_v<Real>;
    const int n = s.half_dim();
    const auto ch = pi * cot(pi * h);
    const auto csc = pi / std::sin(pi * h);
    for (SignedIndex i : s.basis()) {
        b.add_diag(ch, i, i);
        b.add_diag(ch, i, -i);
        for (SignedIndex j : s.basis()) {
            if (std::abs(i) == std::abs(j))
                continue;
            const int c = wrapped_difference(std::abs(i), std::abs(j), n);
            b.add_diag(csc * std::exp(Cx<Real>(0, pi) * h * Real(c) / Real(n)), i, j);
        }
    }
}

/// Q(u,v): the spectral part.
template <class Real>
void add_q_terms(TwoLegBuilder<Real>& b, const Superspace& s, Cx<Real> u, Cx<Real> v,
                 ExchangeRange range) {
    const Real pi = pi_v<Real>;
    const int n = s.half_dim();
    const Cx<Real> i_pi(0, pi);
    const auto cm = pi * cot(pi * (u - v)), cpl = pi * cot(pi * (u + v));
    const auto sm = std::sin(pi * (u - v)), sp = std::sin(pi * (u + v));
    for (SignedIndex i : s.basis()) {
        const Real si = Superspace::parity(i) ? -1 : 1;
        b.add_diag(si * cm, i, i);
        b.add_diag(si * cpl, i, -i);
        for (SignedIndex j : s.basis()) {
            if (i == j)
                continue;
            if (range == ExchangeRange::distinct_absolute && std::abs(i) == std::abs(j))
                continue;
            const Real sj = Superspace::parity(j) ? -1 : 1;
            const int c = wrapped_difference(i, j, n);
            b.add(pi * sj * std::exp(i_pi * (u - v) * Real(c) / Real(n)) / sm, i, j, j, i);
            b.add(pi * sj * std::exp(i_pi * (u + v) * Real(c) / Real(n)) / sp, i, j, -j, -i);
        }
    }
}

} // namespace detail

template <class Real = double>
GradedOp<Real> d_part(const Superspace& s, Cx<Real> h, double margin = kDefaultPoleMargin) {
    guard_off_integers(h, margin, "hbar");
    TwoLegBuilder<Real> b(s);
    detail::add_d_terms(b, s, h);
    return std::move(b).build();
}

template <class Real = double>
GradedOp<Real> q_part(const Superspace& s, Cx<Real> u, Cx<Real> v,
                      double margin = kDefaultPoleMargin,
                      ExchangeRange range = ExchangeRange::signed_distinct) {
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    TwoLegBuilder<Real> b(s);
    detail::add_q_terms(b, s, u, v, range);
    return std::move(b).build();
}

/// The trigonometric R-matrix, built term by term from its index-sum formula.
/// With `cross_check` the result is compared (in long double) against
/// G1(u)G2(v) R-cal-twisted G1^{-1}G2^{-1}.
template <class Real = double>
GradedOp<Real> r_trig(const Superspace& s, Cx<Real> h, Cx<Real> u, Cx<Real> v,
                      double margin = kDefaultPoleMargin,
                      ExchangeRange range = ExchangeRange::signed_distinct,
                      bool cross_check = false) {
    guard_off_integers(h, margin, "hbar");
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    TwoLegBuilder<Real> b(s);
    detail::add_d_terms(b, s, h);
    detail::add_q_terms(b, s, u, v, range);
    auto out = std::move(b).build();
    if (cross_check) {
        using L = long double;
        const Cx<L> hl(h.real(), h.imag()), ul(u.real(), u.imag()), vl(v.real(), v.imag());
        const auto route = r_trig_via_gauge<L>(s, hl, ul, vl, margin);
        const L gap = detail::relative_gap(op_cast<L>(out), route);
        if (!(gap <= static_cast<L>(kCrossCheckTolerance)))
            throw CrossCheckError("r_trig: index-sum form and gauge route disagree",
                                  static_cast<double>(gap));
    }
    return out;
}

/// Q(u,v) + sum_{|i|!=|j|} (pi i/N)((|i|-|j|) - N sign(|i|-|j|)) e_ii (x) e_jj
template <class Real = double>
GradedOp<Real> classical_r_trig(const Superspace& s, Cx<Real> u, Cx<Real> v,
                                double margin = kDefaultPoleMargin) {
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    const Real pi = pi_v<Real>;
    const int n = s.half_dim();
    TwoLegBuilder<Real> b(s);
    detail::add_q_terms(b, s, u, v, ExchangeRange::signed_distinct);
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis()) {
            if (std::abs(i) == std::abs(j))
                continue;
            const int c = detail::wrapped_difference(std::abs(i), std::abs(j), n);
            b.add_diag(Cx<Real>(0, pi / n) * Real(c), i, j);
        }
    return std::move(b).build();
}

/// Alternative classical r whose diagonal carries an extra factor pi.
template <class Real = double>
GradedOp<Real> classical_r_trig_pi_diagonal(const Superspace& s, Cx<Real> u, Cx<Real> v,
                                           double margin = kDefaultPoleMargin) {
    guard_off_integers(u - v, margin, "u-v");
    guard_off_integers(u + v, margin, "u+v");
    const Real pi = pi_v<Real>;
    const int n = s.half_dim();
    TwoLegBuilder<Real> b(s);
    detail::add_q_terms(b, s, u, v, ExchangeRange::signed_distinct);
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis()) {
            if (std::abs(i) == std::abs(j))
                continue;
            const int c = detail::wrapped_difference(std::abs(i), std::abs(j), n);
            b.add_diag(Cx<Real>(0, pi * pi / n) * Real(c), i, j);
        }
    return std::move(b).build();
}

template <class Real = double>
GradedOp<Real> m_trig(const Superspace& s) {
    const Real pi = pi_v<Real>;
    const int n = s.half_dim();
    TwoLegBuilder<Real> b(s);
    for (SignedIndex i : s.basis()) {
        b.add_diag(-pi * pi / 3, i, i);
        b.add_diag(-pi * pi / 3, i, -i);
        for (SignedIndex j : s.basis()) {
            if (std::abs(i) == std::abs(j))
                continue;
            const Real c = detail::wrapped_difference(std::abs(i), std::abs(j), n);
            b.add_diag(pi * pi / 6 - pi * pi * c * c / (2 * Real(n) * n), i, j);
        }
    }
    return std::move(b).build();
}

/// sum of e_ii (x) e_jj (x) e_kk over signed i,j,k with pred(|i|,|j|,|k|).
template <class Real = double, class Pred>
GradedOp<Real> diag_triple_sum(const Superspace& s, Pred&& pred) {
    std::vector<typename GradedOp<Real>::Triplet> t;
    const auto d = static_cast<std::uint64_t>(s.dim());
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis())
            for (SignedIndex k : s.basis())
                if (pred(std::abs(i), std::abs(j), std::abs(k))) {
                    const auto x = (static_cast<std::uint64_t>(s.position(i)) * d +
                                    static_cast<std::uint64_t>(s.position(j))) * d +
                                   static_cast<std::uint64_t>(s.position(k));
                    t.push_back({x, x, Cx<Real>(1)});
                }
    return GradedOp<Real>::from_triplets(s, 3, std::move(t));
}

template <class Real = double>
GradedOp<Real> triple_distinct_sum(const Superspace& s) {
    return diag_triple_sum<Real>(
        s, [](int a, int b, int c) { return a != b && b != c && a != c; });
}

template <class Real = double>
GradedOp<Real> triple_equal_sum(const Superspace& s) {
    return diag_triple_sum<Real>(s, [](int a, int b, int c) { return a == b && b == c; });
}

// ------------------------------------------------------ unitarity scalars

template <class Real>
Cx<Real> unitarity_scalar_rational(Cx<Real> h, Cx<Real> u, Cx<Real> v) {
    const Cx<Real> one(1);
    return one / (h * h) - one / ((u - v) * (u - v)) - one / ((u + v) * (u + v));
}

template <class Real>
Cx<Real> unitarity_scalar_trig(Cx<Real> h, Cx<Real> u, Cx<Real> v) {
    const Real pi = pi_v<Real>;
    auto sq = [](Cx<Real> z) { return z * z; };
    return pi * pi / sq(std::sin(pi * h)) - pi * pi / sq(std::sin(pi * (u - v))) -
           pi * pi / sq(std::sin(pi * (u + v)));
}

// ---------------------------------------------------------------- registry

enum class RFamily {
    rational,
    trig_literal,
    trig_via_gauge,
    s_const,
    s_twisted,
    rcal,
    rcal_twisted,
    classical_rational,
    classical_trig,
    d_part,
    q_part,
    f_twist,
    g_gauge,
    m_trig,
};

inline constexpr std::array<RFamily, 14> kAllFamilies = {
    RFamily::rational,       RFamily::trig_literal, RFamily::trig_via_gauge,
    RFamily::s_const,        RFamily::s_twisted,    RFamily::rcal,
    RFamily::rcal_twisted,   RFamily::classical_rational,
    RFamily::classical_trig, RFamily::d_part,       RFamily::q_part,
    RFamily::f_twist,        RFamily::g_gauge,      RFamily::m_trig,
};

inline std::string_view family_name(RFamily f) {
    switch (f) {
    case RFamily::rational: return "rational";
    case RFamily::trig_literal: return "trig-literal";
    case RFamily::trig_via_gauge: return "trig-via-gauge";
    case RFamily::s_const: return "s-const";
    case RFamily::s_twisted: return "s-twisted";
    case RFamily::rcal: return "rcal";
    case RFamily::rcal_twisted: return "rcal-twisted";
    case RFamily::classical_rational: return "classical-rational";
    case RFamily::classical_trig: return "classical-trig";
    case RFamily::d_part: return "d-part";
    case RFamily::q_part: return "q-part";
    case RFamily::f_twist: return "f-twist";
    case RFamily::g_gauge: return "g-gauge";
    case RFamily::m_trig: return "m-trig";
    }
    return "?";
}

inline std::optional<RFamily> parse_family(std::string_view name) {
    std::string norm(name);
    for (auto& c : norm)
        c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (norm == "trig")
        return RFamily::trig_literal;
    for (auto f : kAllFamilies)
        if (family_name(f) == norm)
            return f;
    return std::nullopt;
}

/// Families of the form X(hbar, u, v) on two legs.
inline bool is_two_parameter_family(RFamily f) {
    switch (f) {
    case RFamily::rational:
    case RFamily::trig_literal:
    case RFamily::trig_via_gauge:
    case RFamily::rcal:
    case RFamily::rcal_twisted:
        return true;
    default:
        return false;
    }
}

inline bool is_trigonometric(RFamily f) { return f != RFamily::rational && f != RFamily::classical_rational; }

/// Builds any family at (hbar, u, v). Constant families ignore u, v; the gauge
/// is the one-leg G(u); classical families ignore hbar.
template <class Real = double>
GradedOp<Real> build_family(RFamily f, const Superspace& s, Cx<Real> h, Cx<Real> u,
                            Cx<Real> v, double margin = kDefaultPoleMargin) {
    switch (f) {
    case RFamily::rational: return r_rational<Real>(s, h, u, v, margin);
    case RFamily::trig_literal:
        return r_trig<Real>(s, h, u, v, margin, ExchangeRange::signed_distinct, false);
    case RFamily::trig_via_gauge: return r_trig_via_gauge<Real>(s, h, u, v, margin);
    case RFamily::s_const: return s_const<Real>(s, h, margin);
    case RFamily::s_twisted: return s_twisted<Real>(s, h, margin);
    case RFamily::rcal: return rcal<Real>(s, h, u, v, margin);
    case RFamily::rcal_twisted: return rcal_twisted<Real>(s, h, u, v, margin);
    case RFamily::classical_rational: return classical_r_rational<Real>(s, u, v, margin);
    case RFamily::classical_trig: return classical_r_trig<Real>(s, u, v, margin);
    case RFamily::d_part: return d_part<Real>(s, h, margin);
    case RFamily::q_part: return q_part<Real>(s, u, v, margin);
    case RFamily::f_twist: return f_twist<Real>(s, h);
    case RFamily::g_gauge: return g_gauge<Real>(s, u);
    case RFamily::m_trig: return m_trig<Real>(s);
    }
    throw std::invalid_argument("build_family: unknown family");
}

/// The unitarity scalar f(hbar,u,v) of a two-parameter family.
template <class Real>
Cx<Real> unitarity_scalar(RFamily f, Cx<Real> h, Cx<Real> u, Cx<Real> v) {
    return f == RFamily::rational ? unitarity_scalar_rational(h, u, v)
                                  : unitarity_scalar_trig(h, u, v);
}

} // namespace qaybe
