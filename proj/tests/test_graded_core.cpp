#include "test_util.hpp"

using namespace qaybe;
using qtest::random_mixed;
using qtest::random_op;
using qtest::rel_diff;

TEST(Superspace, BasisOrderAndParity) {
    Superspace s(3);
    EXPECT_EQ(s.dim(), 6);
    EXPECT_EQ(s.basis(), (std::vector<SignedIndex>{1, 2, 3, -1, -2, -3}));
    for (int pos = 0; pos < s.dim(); ++pos) {
        EXPECT_EQ(s.position(s.index_at(pos)), pos);
        EXPECT_EQ(s.parity_at(pos), Superspace::parity(s.index_at(pos)));
    }
    EXPECT_THROW(s.position(0), std::out_of_range);
    EXPECT_THROW(s.position(4), std::out_of_range);
    EXPECT_THROW(Superspace(0), std::invalid_argument);
}

TEST(Superspace, FlattenRoundTrip) {
    Superspace s(2);
    for (std::uint64_t x = 0; x < flat_dim(s, 3); ++x) {
        const auto m = unflatten(s, x, 3);
        EXPECT_EQ(flatten(s, m), x);
        int p = 0;
        for (auto i : m)
            p ^= Superspace::parity(i);
        EXPECT_EQ(flat_parity(s, x, 3), p);
    }
    // leg 1 is the most significant digit
    EXPECT_EQ(flatten(s, {-1, 1}), 2u * 4u + 0u);
}

TEST(GradedOp, TripletsSumDuplicatesAndDropZeros) {
    Superspace s(1);
    using T = Op::Triplet;
    auto a = Op::from_triplets(s, 1, {T{0, 0, {1, 0}}, T{0, 0, {2, 0}}, T{1, 1, {1, 0}},
                                      T{1, 1, {-1, 0}}});
    EXPECT_EQ(a.nnz(), 1u);
    EXPECT_EQ(a.at(0, 0), Complex(3, 0));
    EXPECT_EQ(a.at(1, 1), Complex(0, 0));
    EXPECT_EQ(a.degree(), 0);
}

TEST(GradedOp, DegreeOfHomogeneousAndMixed) {
    Superspace s(2);
    EXPECT_EQ(matrix_unit<double>(s, 1, -2).degree(), 1);
    EXPECT_EQ(matrix_unit<double>(s, -1, -2).degree(), 0);
    EXPECT_FALSE((matrix_unit<double>(s, 1, -2) + matrix_unit<double>(s, 1, 2)).degree());
    EXPECT_EQ(Op(s, 2).degree(), 0);
}

TEST(GradedOp, LegLimits) {
    Superspace s(2);
    EXPECT_THROW(Op(s, 0), std::invalid_argument);
    EXPECT_NO_THROW(Op(s, 4));
}

TEST(GradedOp, ComposeMatchesDense) {
    std::mt19937_64 rng(1);
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        for (int rep = 0; rep < 5; ++rep) {
            const auto a = random_mixed(s, 2, 30, rng), b = random_mixed(s, 2, 30, rng);
            const DenseMatrix<double> ref = to_dense(a) * to_dense(b);
            EXPECT_LT((to_dense(compose(a, b)) - ref).cwiseAbs().maxCoeff(), 1e-13);
        }
    }
}

TEST(GradedOp, AddSubScale) {
    std::mt19937_64 rng(2);
    Superspace s(2);
    const auto a = random_mixed(s, 2, 20, rng), b = random_mixed(s, 2, 20, rng);
    const Complex c(0.3, -1.2);
    const DenseMatrix<double> ref = to_dense(a) + c * to_dense(b);
    EXPECT_LT((to_dense(a + op_scale(b, c)) - ref).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ((a - a).nnz(), 0u);
    EXPECT_EQ(op_norm_max(-a), op_norm_max(a));
}

TEST(GradedOp, ComposeIsAssociative) {
    std::mt19937_64 rng(3);
    Superspace s(2);
    const auto a = random_mixed(s, 2, 25, rng), b = random_mixed(s, 2, 25, rng),
               c = random_mixed(s, 2, 25, rng);
    EXPECT_LT(rel_diff(compose(compose(a, b), c), compose(a, compose(b, c))), 1e-14);
}

// Defining property: (A (x) B)(e_c1 (x) e_c2) = (-1)^{deg B * p(c1)} A e_c1 (x) B e_c2.
TEST(GradedTensor, MatchesActionOnBasisVectors) {
    std::mt19937_64 rng(4);
    for (int n : {1, 2}) {
        Superspace s(n);
        const int d = s.dim();
        for (int da : {0, 1})
            for (int db : {0, 1}) {
                const auto a = random_op(s, 1, da, 6, rng), b = random_op(s, 1, db, 6, rng);
                const auto A = to_dense(a), B = to_dense(b);
                DenseMatrix<double> ref = DenseMatrix<double>::Zero(d * d, d * d);
                for (int c1 = 0; c1 < d; ++c1)
                    for (int c2 = 0; c2 < d; ++c2) {
                        const double sign = (db & s.parity_at(c1)) ? -1.0 : 1.0;
                        for (int r1 = 0; r1 < d; ++r1)
                            for (int r2 = 0; r2 < d; ++r2)
                                ref(r1 * d + r2, c1 * d + c2) = sign * A(r1, c1) * B(r2, c2);
                    }
                EXPECT_LT((to_dense(graded_tensor(a, b)) - ref).cwiseAbs().maxCoeff(), 1e-15);
            }
    }
}

// (a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd
TEST(GradedTensor, ProductRule) {
    std::mt19937_64 rng(5);
    Superspace s(2);
    for (int db : {0, 1})
        for (int dc : {0, 1}) {
            const auto a = random_op(s, 1, 1, 6, rng), b = random_op(s, 1, db, 6, rng);
            const auto c = random_op(s, 1, dc, 6, rng), d = random_op(s, 1, 0, 6, rng);
            auto rhs = graded_tensor(compose(a, c), compose(b, d));
            if (db & dc)
                rhs = -rhs;
            EXPECT_LT(rel_diff(compose(graded_tensor(a, b), graded_tensor(c, d)), rhs), 1e-14);
        }
}

TEST(GradedTensor, AssociativeAndDegreeAdditive) {
    std::mt19937_64 rng(6);
    Superspace s(1);
    const auto a = random_op(s, 1, 1, 2, rng), b = random_op(s, 1, 1, 2, rng),
               c = random_op(s, 1, 0, 2, rng);
    EXPECT_LT(rel_diff(graded_tensor(graded_tensor(a, b), c), graded_tensor(a, graded_tensor(b, c))),
              1e-15);
    EXPECT_EQ(graded_tensor(a, b).degree(), 0);
    EXPECT_EQ(graded_tensor(a, c).degree(), 1);
    EXPECT_EQ(compose(a, b).nnz() == 0 ? 0 : *compose(a, b).degree(), 0);
}

TEST(Embed, AdjacentLegsAreTensorWithIdentity) {
    std::mt19937_64 rng(7);
    Superspace s(2);
    const auto id = identity_op<double>(s);
    const auto x = random_mixed(s, 2, 20, rng);
    EXPECT_EQ(max_abs_diff(embed(x, {1, 2}, 3), graded_tensor(x, id)), 0.0);
    EXPECT_EQ(max_abs_diff(embed(x, {2, 3}, 3), graded_tensor(id, x)), 0.0);
    EXPECT_EQ(max_abs_diff(embed(x, {1, 2}, 2), x), 0.0);
}

// X13 = P23 X12 P23
TEST(Embed, OuterLegsViaSuperpermutation) {
    std::mt19937_64 rng(8);
    for (int n : {1, 2, 3}) {
        Superspace s(n);
        const auto x = random_mixed(s, 2, 40, rng);
        const auto p23 = embed(superpermutation<double>(s), {2, 3}, 3);
        EXPECT_LT(rel_diff(embed(x, {1, 3}, 3), compose(compose(p23, embed(x, {1, 2}, 3)), p23)),
                  1e-15);
    }
}

TEST(Embed, SingleLegSign) {
    // an odd operator on leg 2 passes an odd filler on leg 1
    Superspace s(1);
    const auto e = matrix_unit<double>(s, 1, -1);
    const auto e2 = embed(e, {2}, 2);
    EXPECT_EQ(e2.at({1, 1}, {1, -1}), Complex(1));
    EXPECT_EQ(e2.at({-1, 1}, {-1, -1}), Complex(-1));
}

TEST(Embed, RejectsBadPositions) {
    Superspace s(1);
    const auto p = superpermutation<double>(s);
    EXPECT_THROW(embed(p, {2, 1}, 3), std::invalid_argument);
    EXPECT_THROW(embed(p, {1, 4}, 3), std::out_of_range);
    EXPECT_THROW(embed(p, {1}, 3), std::invalid_argument);
}

TEST(Split, EvenPlusOdd) {
    std::mt19937_64 rng(9);
    Superspace s(2);
    const auto a = random_mixed(s, 2, 30, rng);
    const auto parts = split(a);
    EXPECT_EQ(parts.even.degree(), 0);
    EXPECT_EQ(parts.odd.degree(), 1);
    EXPECT_EQ(max_abs_diff(parts.even + parts.odd, a), 0.0);
}

TEST(OpCast, LongDoubleRoundTrip) {
    std::mt19937_64 rng(10);
    Superspace s(2);
    const auto a = random_mixed(s, 2, 30, rng);
    EXPECT_EQ(max_abs_diff(op_cast<double>(op_cast<long double>(a)), a), 0.0);
}

TEST(Dense, RoundTrip) {
    std::mt19937_64 rng(11);
    Superspace s(2);
    const auto a = random_mixed(s, 2, 30, rng);
    EXPECT_EQ(max_abs_diff(from_dense(s, 2, to_dense(a)), a), 0.0);
}

TEST(Kernels, ParseComplex) {
    EXPECT_EQ(parse_complex("1.5"), Complex(1.5, 0));
    EXPECT_EQ(parse_complex("-2i"), Complex(0, -2));
    EXPECT_EQ(parse_complex("0.3+0.1i"), Complex(0.3, 0.1));
    EXPECT_EQ(parse_complex("1e-3-2e+1i"), Complex(1e-3, -20));
    EXPECT_EQ(parse_complex("i"), Complex(0, 1));
    EXPECT_EQ(parse_complex("-i"), Complex(0, -1));
    EXPECT_FALSE(parse_complex("1+2j"));
    EXPECT_FALSE(parse_complex(""));
    EXPECT_FALSE(parse_complex("abc"));
    const Complex z(0.1234567890123, -9.87e-7);
    EXPECT_EQ(parse_complex(format_complex(z)), z);
}

TEST(Kernels, PoleGuards) {
    EXPECT_THROW(guard_off_integers<double>({2.01, 0}, 0.05, "z"), PoleProximityError);
    EXPECT_NO_THROW(guard_off_integers<double>({2.01, 0.2}, 0.05, "z"));
    EXPECT_THROW(guard_off_odd_integers<double>({-0.98, 0}, 0.05, "z"), PoleProximityError);
    EXPECT_NO_THROW(guard_off_odd_integers<double>({2.0, 0}, 0.05, "z"));
    EXPECT_THROW(phi_trig<double>({0.3, 0}, {1.0, 0}, 0.05), PoleProximityError);
}

TEST(Kernels, CotAgainstDefinition) {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 20; ++k) {
        const auto z = qtest::rand_complex(rng);
        EXPECT_LT(std::abs(cot(z) - std::cos(z) / std::sin(z)), 1e-12 * std::abs(cot(z)) + 1e-14);
    }
}
