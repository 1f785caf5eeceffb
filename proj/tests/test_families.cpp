#include "test_util.hpp"

#include <numbers>

using namespace qaybe;
using qtest::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

Op unit2(const Superspace& s, SignedIndex i, SignedIndex j, SignedIndex k, SignedIndex l) {
    return graded_tensor(matrix_unit<double>(s, i, j), matrix_unit<double>(s, k, l));
}

int sgn(int x) { return (x > 0) - (x < 0); }
double par_sign(SignedIndex i) { return i < 0 ? -1.0 : 1.0; }

// Term-by-term oracle for the trigonometric R, assembled from graded tensor
// products of matrix units (no shared code with the library's builder).
Op r_trig_oracle(const Superspace& s, Complex h, Complex u, Complex v) {
    const int n = s.half_dim();
    const Complex I(0, 1);
    auto cotz = [](Complex z) { return std::cos(z) / std::sin(z); };
    Op out(s, 2);
    auto add = [&](Complex c, SignedIndex i, SignedIndex j, SignedIndex k, SignedIndex l) {
        out = out + op_scale(unit2(s, i, j, k, l), c);
    };
    for (auto i : s.basis()) {
        add(kPi * cotz(kPi * h), i, i, i, i);
        add(kPi * cotz(kPi * h), i, i, -i, -i);
        add(par_sign(i) * kPi * cotz(kPi * (u - v)), i, i, i, i);
        add(par_sign(i) * kPi * cotz(kPi * (u + v)), i, i, -i, -i);
        for (auto j : s.basis()) {
            const int ai = std::abs(i), aj = std::abs(j);
            if (ai != aj) {
                const int c = (ai - aj) - n * sgn(ai - aj);
                add(kPi / std::sin(kPi * h) * std::exp(I * kPi * h * double(c) / double(n)), i, i,
                    j, j);
            }
            if (i != j) {
                const int c = (i - j) - n * sgn(i - j);
                add(kPi * par_sign(j) * std::exp(I * kPi * (u - v) * double(c) / double(n)) /
                        std::sin(kPi * (u - v)),
                    i, j, j, i);
                add(kPi * par_sign(j) * std::exp(I * kPi * (u + v) * double(c) / double(n)) /
                        std::sin(kPi * (u + v)),
                    i, j, -j, -i);
            }
        }
    }
    return out;
}

// Constant S: diagonal part plus s_ij for i < j in the order -N..-1,1..N.
Op s_oracle(const Superspace& s, Complex h) {
    const Complex q = std::exp(Complex(0, kPi) * h), dq = q - 1.0 / q;
    const Complex pref = Complex(0, 2 * kPi) / dq;
    Op out(s, 2);
    const auto id = identity_op<double>(s);
    for (int a = 1; a <= s.half_dim(); ++a) {
        const auto pa = matrix_unit<double>(s, a, a) + matrix_unit<double>(s, -a, -a);
        out = out + graded_tensor(matrix_unit<double>(s, a, a), id + op_scale(pa, q - 1.0));
        out = out + graded_tensor(matrix_unit<double>(s, -a, -a), id + op_scale(pa, 1.0 / q - 1.0));
    }
    for (auto i : s.basis())
        for (auto j : s.basis())
            if (i < j)
                out = out + op_scale(graded_tensor(matrix_unit<double>(s, i, j),
                                                   matrix_unit<double>(s, j, i) +
                                                       matrix_unit<double>(s, -j, -i)),
                                     par_sign(j) * dq);
    return op_scale(out, pref);
}

const Complex H(0.31, 0.17), U(0.23, -0.41), V(-0.37, 0.12);

} // namespace

TEST(Rational, FormsAgree) {
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        const auto r = r_rational<double>(s, H, U, V);
        EXPECT_LT(rel_diff(r, r_rational_index_form<double>(s, H, U, V)), 1e-15);
        const auto ref = op_scale(identity_op<double>(s, 2), 1.0 / H) +
                         op_scale(superpermutation<double>(s), 1.0 / (U - V)) +
                         op_scale(jj_p<double>(s), 1.0 / (U + V));
        EXPECT_LT(rel_diff(r, ref), 1e-15);
        EXPECT_LT(rel_diff(classical_r_rational<double>(s, U, V),
                           classical_r_rational_eta_form<double>(s, U, V)),
                  1e-15);
    }
}

TEST(Rational, PoleGuard) {
    Superspace s(1);
    EXPECT_THROW(r_rational<double>(s, {0.01, 0}, U, V), PoleProximityError);
    EXPECT_THROW(r_rational<double>(s, H, U, U + 0.01), PoleProximityError);
    EXPECT_THROW(r_rational<double>(s, H, U, -U), PoleProximityError);
}

TEST(Trig, MatchesTermByTermOracle) {
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        EXPECT_LT(rel_diff(r_trig<double>(s, H, U, V), r_trig_oracle(s, H, U, V)), 1e-14)
            << "N=" << n;
    }
}

TEST(Trig, NonzeroCount) {
    for (int n : {1, 2, 3, 4, 6}) {
        Superspace s(n);
        EXPECT_EQ(r_trig<double>(s, H, U, V).nnz(), static_cast<std::size_t>(12 * n * n - 4 * n));
    }
}

TEST(Trig, SplitsIntoDAndQ) {
    Superspace s(3);
    EXPECT_LT(rel_diff(d_part<double>(s, H) + q_part<double>(s, U, V), r_trig<double>(s, H, U, V)),
              1e-15);
}

TEST(Trig, GaugeRouteAgrees) {
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        EXPECT_NO_THROW(r_trig<double>(s, H, U, V, kDefaultPoleMargin,
                                       ExchangeRange::signed_distinct, true));
        EXPECT_LT(rel_diff(r_trig<double>(s, H, U, V), r_trig_via_gauge<double>(s, H, U, V)),
                  1e-13);
    }
}

TEST(Trig, OtherIndexRangeDisagrees) {
    Superspace s(2);
    EXPECT_THROW(
        r_trig<double>(s, H, U, V, kDefaultPoleMargin, ExchangeRange::distinct_absolute, true),
        CrossCheckError);
}

TEST(Trig, AllEven) {
    Superspace s(3);
    for (const auto& r : {r_trig<double>(s, H, U, V), classical_r_trig<double>(s, U, V),
                          r_rational<double>(s, H, U, V), rcal<double>(s, H, U, V),
                          m_trig<double>(s)})
        EXPECT_EQ(r.degree(), 0);
}

TEST(ConstantS, MatchesOracle) {
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        EXPECT_LT(rel_diff(s_const<double>(s, H), s_oracle(s, H)), 1e-15) << "N=" << n;
        // S lies in End (x) Q(N): only its second leg commutes with J
        EXPECT_TRUE(commutes_with_j_on_leg(s_const<double>(s, H), 2));
    }
}

TEST(ConstantS, SwappedRowsDiffer) {
    Superspace s(2);
    EXPECT_GT(rel_diff(s_const<double>(s, H), s_const<double>(s, H, kDefaultPoleMargin,
                                                             SReading::swapped_rows)),
              0.1);
}

TEST(Twist, InverseAndQn) {
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        const auto f = f_twist<double>(s, H);
        EXPECT_LT(rel_diff(compose(f, f_twist_inverse<double>(s, H)), identity_op<double>(s, 2)),
                  1e-15);
        EXPECT_TRUE(is_in_qn(f));
        // diagonal with the entry of pi_a (x) pi_b given by the wrapped difference
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b) {
                const int c = (a - b) - n * sgn(a - b);
                const Complex want = std::exp(Complex(0, kPi) * H * double(c) / double(2 * n));
                EXPECT_LT(std::abs(f.at({-a, b}, {-a, b}) - want), 1e-15);
            }
    }
    EXPECT_EQ(max_abs_diff(f_twist<double>(Superspace(1), H), identity_op<double>(Superspace(1), 2)),
              0.0);
}

TEST(Gauge, IdentityAtZeroAndInverse) {
    Superspace s(3);
    EXPECT_EQ(max_abs_diff(g_gauge<double>(s, {0, 0}), identity_op<double>(s)), 0.0);
    EXPECT_LT(rel_diff(compose(g_gauge<double>(s, U), g_gauge_inverse<double>(s, U)),
                       identity_op<double>(s)),
              1e-15);
    // G(u) weights j and -j differently, so it is not in Q(N)
    EXPECT_FALSE(is_in_qn(g_gauge<double>(s, U)));
}

TEST(Rcal, CompositionalMatchesCotIndexSum) {
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        const auto a = rcal<double>(s, H, U, V);
        EXPECT_LT(rel_diff(a, rcal_literal<double>(s, H, U, V)), 1e-13);
        EXPECT_GT(rel_diff(a, rcal_literal<double>(s, H, U, V, kDefaultPoleMargin,
                                                   CotReading::coth)),
                  1e-3);
        const auto ref = s_const<double>(s, H) +
                         op_scale(superpermutation<double>(s),
                                  kPi * std::exp(Complex(0, -kPi) * (U - V)) / std::sin(kPi * (U - V))) +
                         op_scale(jj_p<double>(s),
                                  kPi * std::exp(Complex(0, -kPi) * (U + V)) / std::sin(kPi * (U + V)));
        EXPECT_LT(rel_diff(a, ref), 1e-14);
    }
}

TEST(Rcal, TwistedIsConjugate) {
    Superspace s(2);
    const auto f = f_twist<double>(s, H);
    const auto finv21 = flip(f_twist_inverse<double>(s, H));
    EXPECT_LT(rel_diff(rcal_twisted<double>(s, H, U, V), compose(compose(f, rcal<double>(s, H, U, V)), finv21)),
              1e-14);
}

TEST(TripleSums, Counts) {
    for (int n : {1, 2, 3, 4}) {
        Superspace s(n);
        EXPECT_EQ(triple_distinct_sum<double>(s).nnz(),
                  static_cast<std::size_t>(8 * n * std::max(0, n - 1) * std::max(0, n - 2)));
        EXPECT_EQ(triple_equal_sum<double>(s).nnz(), static_cast<std::size_t>(8 * n));
    }
}

TEST(UnitarityScalars, ClosedForms) {
    const Complex want_rat = 1.0 / (H * H) - 1.0 / ((U - V) * (U - V)) - 1.0 / ((U + V) * (U + V));
    EXPECT_LT(std::abs(unitarity_scalar_rational<double>(H, U, V) - want_rat), 1e-13);
    auto s2 = [](Complex z) { return std::sin(kPi * z) * std::sin(kPi * z); };
    const Complex want_trig = kPi * kPi / s2(H) - kPi * kPi / s2(U - V) - kPi * kPi / s2(U + V);
    EXPECT_LT(std::abs(unitarity_scalar_trig<double>(H, U, V) - want_trig), 1e-12 * std::abs(want_trig));
}

TEST(Registry, NamesRoundTrip) {
    for (auto f : kAllFamilies) {
        EXPECT_EQ(parse_family(family_name(f)), f);
    }
    EXPECT_EQ(parse_family("trig_literal"), RFamily::trig_literal);
    EXPECT_FALSE(parse_family("nope"));
}

TEST(Registry, BuildEveryFamily) {
    Superspace s(2);
    for (auto f : kAllFamilies) {
        const auto op = build_family<double>(f, s, H, U, V, kDefaultPoleMargin);
        EXPECT_EQ(op.legs(), f == RFamily::g_gauge ? 1 : 2);
        EXPECT_GT(op.nnz(), 0u) << family_name(f);
    }
}
