// operators.hpp: superpermutation, J, the automorphism eta, Q(N).

#pragma once

#include "qaybe/graded_op.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaybe {

/// Accumulates c * e_ij (x) e_kl without going through graded_tensor.
/// The sign is the module convention specialised to matrix units,
/// (-1)^{(p_k + p_l) p_j}; tests compare it against graded_tensor.
template <class Real = double>
class TwoLegBuilder {
  public:
    using Scalar = std::complex<Real>;

    explicit TwoLegBuilder(const Superspace& s) : s_(s) {}

    void add(Scalar c, SignedIndex i, SignedIndex j, SignedIndex k, SignedIndex l) {
        if (c == Scalar{})
            return;
        const auto d = static_cast<std::uint64_t>(s_.dim());
        const int sign = (Superspace::parity(k) ^ Superspace::parity(l)) &
                         Superspace::parity(j);
        trips_.push_back({static_cast<std::uint64_t>(s_.position(i)) * d +
                              static_cast<std::uint64_t>(s_.position(k)),
                          static_cast<std::uint64_t>(s_.position(j)) * d +
                              static_cast<std::uint64_t>(s_.position(l)),
                          sign ? -c : c});
    }

    /// c * e_ii (x) e_jj; diagonal, so never signed.
    void add_diag(Scalar c, SignedIndex i, SignedIndex j) { add(c, i, i, j, j); }

    GradedOp<Real> build() && {
        return GradedOp<Real>::from_triplets(s_, 2, std::move(trips_), Prune::exact_zeros);
    }

  private:
    Superspace s_;
    std::vector<typename GradedOp<Real>::Triplet> trips_;
};

/// P12 = sum_{i,j} (-1)^{p_j} e_ij (x) e_ji, assembled through graded_tensor.
template <class Real = double>
GradedOp<Real> superpermutation(const Superspace& s) {
    std::vector<typename GradedOp<Real>::Triplet> trips;
    for (SignedIndex i : s.basis())
        for (SignedIndex j : s.basis()) {
            auto t = graded_tensor(matrix_unit<Real>(s, i, j), matrix_unit<Real>(s, j, i));
            const Real sign = Superspace::parity(j) ? -1 : 1;
            t.for_each([&](auto r, auto c, const auto& v) { trips.push_back({r, c, sign * v}); });
        }
    return GradedOp<Real>::from_triplets(s, 2, std::move(trips));
}

/// J = sum_i (-1)^{p_i} e_{i,-i}
template <class Real = double>
GradedOp<Real> j_operator(const Superspace& s) {
    std::vector<typename GradedOp<Real>::Triplet> trips;
    for (SignedIndex i : s.basis())
        trips.push_back({static_cast<std::uint64_t>(s.position(i)),
                         static_cast<std::uint64_t>(s.position(-i)),
                         std::complex<Real>(Superspace::parity(i) ? -1 : 1)});
    return GradedOp<Real>::from_triplets(s, 1, std::move(trips));
}

/// J_a = Id^{(a-1)} (x) J (x) Id^{(m-a)}
template <class Real = double>
GradedOp<Real> j_leg(const Superspace& s, int a, int m) {
    if (a < 1 || a > m)
        throw std::out_of_range("j_leg: leg " + std::to_string(a) + " outside 1.." +
                                std::to_string(m));
    return embed(j_operator<Real>(s), {a}, m);
}

/// J1 J2 P12
template <class Real = double>
GradedOp<Real> jj_p(const Superspace& s) {
    return compose(compose(j_leg<Real>(s, 1, 2), j_leg<Real>(s, 2, 2)),
                   superpermutation<Real>(s));
}

/// P on legs (a, a+1) of an m-leg space.
template <class Real = double>
GradedOp<Real> superpermutation_on(const Superspace& s, int a, int m) {
    return embed(superpermutation<Real>(s), {a, a + 1}, m);
}

/// X_21 := P12 X12 P12.
template <class Real>
GradedOp<Real> flip(const GradedOp<Real>& x) {
    if (x.legs() != 2)
        throw std::invalid_argument("flip: expects a 2-leg operator");
    const auto p = superpermutation<Real>(x.space());
    return compose(compose(p, x), p);
}

/// Swaps legs a and a+1 of an m-leg operator by P-conjugation.
template <class Real>
GradedOp<Real> swap_adjacent_legs(const GradedOp<Real>& x, int a) {
    if (a < 1 || a >= x.legs())
        throw std::out_of_range("swap_adjacent_legs: no leg pair at " + std::to_string(a));
    const auto p = superpermutation_on<Real>(x.space(), a, x.legs());
    return compose(compose(p, x), p);
}

/// The 2-leg operator X placed so that its first leg acts on leg i and its
/// second on leg j of m legs; i > j goes through the flip.
template <class Real>
GradedOp<Real> place(const GradedOp<Real>& x, int i, int j, int m) {
    if (x.legs() != 2)
        throw std::invalid_argument("place: expects a 2-leg operator");
    if (i == j)
        throw std::invalid_argument("place: legs must differ");
    return i < j ? embed(x, {i, j}, m) : embed(flip(x), {j, i}, m);
}

/// Relabels i -> -i on one leg. The column parity of that leg flips, so every
/// later leg carrying an odd component picks up a sign.
template <class Real>
GradedOp<Real> eta_on_leg(const GradedOp<Real>& a, int leg) {
    const int k = a.legs();
    if (leg < 1 || leg > k)
        throw std::out_of_range("eta_on_leg: leg " + std::to_string(leg) +
                                " outside 1.." + std::to_string(k));
    const auto& s = a.space();
    const std::uint64_t d = static_cast<std::uint64_t>(s.dim());
    const std::uint64_t n = static_cast<std::uint64_t>(s.half_dim());
    std::uint64_t stride = 1;
    for (int t = leg; t < k; ++t)
        stride *= d;
    std::vector<typename GradedOp<Real>::Triplet> out;
    out.reserve(a.nnz());
    a.for_each([&](std::uint64_t r, std::uint64_t c, const auto& v) {
        const std::uint64_t rd = (r / stride) % d, cd = (c / stride) % d;
        const std::uint64_t r2 = r + (((rd + n) % d) - rd) * stride;
        const std::uint64_t c2 = c + (((cd + n) % d) - cd) * stride;
        // parity of entries on the legs after `leg`
        int later = 0;
        std::uint64_t rr = r % stride, cc = c % stride;
        for (int t = leg; t < k; ++t) {
            later ^= (rr % d >= n) ^ (cc % d >= n);
            rr /= d;
            cc /= d;
        }
        out.push_back({r2, c2, later ? -v : v});
    });
    return GradedOp<Real>::from_triplets(s, k, std::move(out));
}

/// Spanning set of Q(N): e_ab + e_{-a,-b} and e_{a,-b} + e_{-a,b}.
template <class Real = double>
std::vector<GradedOp<Real>> qn_basis(const Superspace& s) {
    std::vector<GradedOp<Real>> out;
    const int n = s.half_dim();
    auto pair = [&](SignedIndex i, SignedIndex j, SignedIndex k, SignedIndex l) {
        using T = typename GradedOp<Real>::Triplet;
        std::vector<T> t{{static_cast<std::uint64_t>(s.position(i)),
                          static_cast<std::uint64_t>(s.position(j)), 1},
                         {static_cast<std::uint64_t>(s.position(k)),
                          static_cast<std::uint64_t>(s.position(l)), 1}};
        return GradedOp<Real>::from_triplets(s, 1, std::move(t));
    };
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            out.push_back(pair(a, b, -a, -b));
            out.push_back(pair(a, -b, -a, b));
        }
    return out;
}

/// Max entry of the supercommutator [A, J_leg] = A J - (-1)^{deg A} J A,
/// taken per homogeneous component.
template <class Real>
Real j_supercommutator_norm(const GradedOp<Real>& a, int leg) {
    const auto j = j_leg<Real>(a.space(), leg, a.legs());
    const auto parts = split(a);
    const auto even = op_sub(compose(parts.even, j), compose(j, parts.even));
    const auto odd = op_add(compose(parts.odd, j), compose(j, parts.odd));
    return op_norm_max(op_add(even, odd));
}

inline constexpr double kQnTolerance = 1e-12;

template <class Real>
bool commutes_with_j_on_leg(const GradedOp<Real>& a, int leg) {
    return j_supercommutator_norm(a, leg) <=
           static_cast<Real>(kQnTolerance) * op_norm_max(a);
}

/// Membership in Q(N)^{(x) k}: J commutes (graded) with every leg.
template <class Real>
bool is_in_qn(const GradedOp<Real>& a) {
    for (int leg = 1; leg <= a.legs(); ++leg)
        if (!commutes_with_j_on_leg(a, leg))
            return false;
    return true;
}

} // namespace qaybe
