// graded_op.hpp: sparse operators on k tensor legs of C^{N|N}.
//
// Storage is CSR over flattened multi-indices (radix 2N, leg 1 most
// significant). All Koszul signs are applied when operators are built or
// tensored, so composition is the plain matrix product.

#pragma once

#include "qaybe/superspace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qaybe {

/// Relative drop tolerance for the results of arithmetic.
inline constexpr double kDropTolerance = 1e-14;

enum class Prune {
    exact_zeros, // constructions: only literal zeros are removed
    relative,    // arithmetic: |v| < kDropTolerance * max|v| is removed
};

namespace detail {
template <class Real>
inline std::complex<Real> mul(const std::complex<Real>& a,
                              const std::complex<Real>& b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}
} // namespace detail

template <class Real = double>
class GradedOp {
  public:
    using real_type = Real;
    using Scalar = std::complex<Real>;
    using Index = std::uint64_t;

    struct Triplet {
        Index row;
        Index col;
        Scalar value;
    };

    GradedOp(Superspace space, int legs)
        : space_(space), legs_(legs), dim_(checked_dim(space, legs)),
          row_ptr_(static_cast<std::size_t>(dim_) + 1, 0), degree_(0) {}

    /// Duplicates are summed.
    static GradedOp from_triplets(Superspace space, int legs,
                                  std::vector<Triplet> trips,
                                  Prune prune = Prune::exact_zeros) {
        GradedOp op(space, legs);
        std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        std::vector<Index> cols;
        std::vector<Scalar> vals;
        cols.reserve(trips.size());
        vals.reserve(trips.size());
        std::vector<std::size_t> counts(static_cast<std::size_t>(op.dim_) + 1, 0);
        for (std::size_t k = 0; k < trips.size();) {
            const auto& t = trips[k];
            if (t.row >= op.dim_ || t.col >= op.dim_)
                throw std::out_of_range("GradedOp: triplet index out of range");
            Scalar sum = t.value;
            std::size_t k2 = k + 1;
            while (k2 < trips.size() && trips[k2].row == t.row &&
                   trips[k2].col == t.col)
                sum += trips[k2++].value;
            cols.push_back(t.col);
            vals.push_back(sum);
            ++counts[static_cast<std::size_t>(t.row) + 1];
            k = k2;
        }
        for (std::size_t r = 0; r < static_cast<std::size_t>(op.dim_); ++r)
            counts[r + 1] += counts[r];
        op.row_ptr_ = std::move(counts);
        op.cols_ = std::move(cols);
        op.vals_ = std::move(vals);
        op.finish(prune);
        return op;
    }

    /// Adopts already-sorted CSR arrays.
    static GradedOp from_csr(Superspace space, int legs,
                             std::vector<std::size_t> row_ptr,
                             std::vector<Index> cols, std::vector<Scalar> vals,
                             Prune prune) {
        GradedOp op(space, legs);
        if (row_ptr.size() != static_cast<std::size_t>(op.dim_) + 1 ||
            cols.size() != vals.size() || row_ptr.back() != cols.size())
            throw std::invalid_argument("GradedOp: inconsistent CSR arrays");
        op.row_ptr_ = std::move(row_ptr);
        op.cols_ = std::move(cols);
        op.vals_ = std::move(vals);
        op.finish(prune);
        return op;
    }

    const Superspace& space() const noexcept { return space_; }
    int legs() const noexcept { return legs_; }
    Index dim() const noexcept { return dim_; }
    std::size_t nnz() const noexcept { return vals_.size(); }

    /// Present only when every nonzero entry has the same parity.
    std::optional<int> degree() const noexcept { return degree_; }

    std::span<const Index> row_cols(Index r) const {
        return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    std::span<const Scalar> row_values(Index r) const {
        return {vals_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }

    Scalar at(Index r, Index c) const {
        if (r >= dim_ || c >= dim_)
            throw std::out_of_range("GradedOp::at: index out of range");
        auto cs = row_cols(r);
        auto it = std::lower_bound(cs.begin(), cs.end(), c);
        if (it == cs.end() || *it != c)
            return Scalar{};
        return vals_[row_ptr_[r] + static_cast<std::size_t>(it - cs.begin())];
    }

    Scalar at(const std::vector<SignedIndex>& row,
              const std::vector<SignedIndex>& col) const {
        if (static_cast<int>(row.size()) != legs_ ||
            static_cast<int>(col.size()) != legs_)
            throw std::invalid_argument("GradedOp::at: multi-index length != legs");
        return at(flatten(space_, row), flatten(space_, col));
    }

    template <class F>
    void for_each(F&& f) const {
        for (Index r = 0; r < dim_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                f(r, cols_[k], vals_[k]);
    }

    std::vector<Triplet> triplets() const {
        std::vector<Triplet> out;
        out.reserve(nnz());
        for_each([&](Index r, Index c, const Scalar& v) { out.push_back({r, c, v}); });
        return out;
    }

  private:
    static Index checked_dim(const Superspace& s, int legs) {
        if (legs < 1)
            throw std::invalid_argument("GradedOp: legs must be >= 1");
        const double approx = std::pow(static_cast<double>(s.dim()), legs);
        if (approx > static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
            throw std::invalid_argument("GradedOp: (2N)^legs exceeds index range");
        return flat_dim(s, legs);
    }

    void finish(Prune prune) {
        Real cut = 0;
        if (prune == Prune::relative) {
            Real mx = 0;
            for (const auto& v : vals_)
                mx = std::max(mx, std::abs(v));
            cut = static_cast<Real>(kDropTolerance) * mx;
        }
        bool dropped = false;
        for (const auto& v : vals_)
            if (v == Scalar{} || std::abs(v) < cut) {
                dropped = true;
                break;
            }
        if (dropped) {
            std::size_t w = 0;
            std::vector<std::size_t> rp(row_ptr_.size(), 0);
            for (Index r = 0; r < dim_; ++r) {
                for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                    if (vals_[k] == Scalar{} || std::abs(vals_[k]) < cut)
                        continue;
                    cols_[w] = cols_[k];
                    vals_[w] = vals_[k];
                    ++w;
                }
                rp[r + 1] = w;
            }
            cols_.resize(w);
            vals_.resize(w);
            row_ptr_ = std::move(rp);
        }
        std::optional<int> deg;
        bool homogeneous = true;
        for (Index r = 0; r < dim_ && homogeneous; ++r) {
            const int pr = flat_parity(space_, r, legs_);
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                const int p = pr ^ flat_parity(space_, cols_[k], legs_);
                if (!deg)
                    deg = p;
                else if (*deg != p) {
                    homogeneous = false;
                    break;
                }
            }
        }
        degree_ = homogeneous ? std::optional<int>(deg.value_or(0)) : std::nullopt;
    }

    Superspace space_;
    int legs_;
    Index dim_;
    std::vector<std::size_t> row_ptr_;
    std::vector<Index> cols_;
    std::vector<Scalar> vals_;
    std::optional<int> degree_;
};

template <class Real>
struct HomogeneousSplit {
    GradedOp<Real> even;
    GradedOp<Real> odd;
};

namespace detail {
template <class Real>
void require_same_shape(const GradedOp<Real>& a, const GradedOp<Real>& b,
                        const char* what) {
    if (!(a.space() == b.space()))
        throw std::invalid_argument(std::string(what) + ": operators live on different spaces");
    if (a.legs() != b.legs())
        throw std::invalid_argument(std::string(what) + ": leg-count mismatch (" +
                                    std::to_string(a.legs()) + " vs " +
                                    std::to_string(b.legs()) + ")");
}
} // namespace detail

template <class Real = double>
GradedOp<Real> identity_op(const Superspace& s, int legs = 1) {
    using Op = GradedOp<Real>;
    const auto d = flat_dim(s, legs);
    std::vector<std::size_t> rp(static_cast<std::size_t>(d) + 1);
    std::vector<typename Op::Index> cols(static_cast<std::size_t>(d));
    for (std::uint64_t r = 0; r < d; ++r) {
        rp[r + 1] = r + 1;
        cols[r] = r;
    }
    return Op::from_csr(s, legs, std::move(rp), std::move(cols),
                        std::vector<typename Op::Scalar>(static_cast<std::size_t>(d), 1),
                        Prune::exact_zeros);
}

/// e_{ij}: the one-leg operator with e_{ij} e_k = delta_{jk} e_i.
template <class Real = double>
GradedOp<Real> matrix_unit(const Superspace& s, SignedIndex i, SignedIndex j) {
    using Op = GradedOp<Real>;
    return Op::from_triplets(
        s, 1,
        {{static_cast<typename Op::Index>(s.position(i)),
          static_cast<typename Op::Index>(s.position(j)), typename Op::Scalar(1)}});
}

template <class Real>
Real op_norm_max(const GradedOp<Real>& a) {
    Real mx = 0;
    a.for_each([&](auto, auto, const auto& v) { mx = std::max(mx, std::abs(v)); });
    return mx;
}

template <class Real>
GradedOp<Real> op_scale(const GradedOp<Real>& a, std::complex<Real> c) {
    auto t = a.triplets();
    for (auto& x : t)
        x.value = detail::mul(x.value, c);
    return GradedOp<Real>::from_triplets(a.space(), a.legs(), std::move(t),
                                         Prune::exact_zeros);
}

namespace detail {
template <class Real>
GradedOp<Real> merge(const GradedOp<Real>& a, const GradedOp<Real>& b, Real sb,
                     Prune prune) {
    using Op = GradedOp<Real>;
    std::vector<std::size_t> rp(static_cast<std::size_t>(a.dim()) + 1, 0);
    std::vector<typename Op::Index> cols;
    std::vector<typename Op::Scalar> vals;
    cols.reserve(a.nnz() + b.nnz());
    vals.reserve(a.nnz() + b.nnz());
    for (typename Op::Index r = 0; r < a.dim(); ++r) {
        auto ac = a.row_cols(r), bc = b.row_cols(r);
        auto av = a.row_values(r), bv = b.row_values(r);
        std::size_t i = 0, j = 0;
        while (i < ac.size() || j < bc.size()) {
            if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
                cols.push_back(ac[i]);
                vals.push_back(av[i++]);
            } else if (i == ac.size() || bc[j] < ac[i]) {
                cols.push_back(bc[j]);
                vals.push_back(sb * bv[j++]);
            } else {
                cols.push_back(ac[i]);
                vals.push_back(av[i++] + sb * bv[j++]);
            }
        }
        rp[r + 1] = cols.size();
    }
    return Op::from_csr(a.space(), a.legs(), std::move(rp), std::move(cols),
                        std::move(vals), prune);
}
} // namespace detail

template <class Real>
GradedOp<Real> op_add(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    detail::require_same_shape(a, b, "op_add");
    return detail::merge(a, b, Real(1), Prune::relative);
}

template <class Real>
GradedOp<Real> op_sub(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    detail::require_same_shape(a, b, "op_sub");
    return detail::merge(a, b, Real(-1), Prune::relative);
}

/// max |a_e - b_e| over all entries, without pruning.
template <class Real>
Real max_abs_diff(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    detail::require_same_shape(a, b, "max_abs_diff");
    return op_norm_max(detail::merge(a, b, Real(-1), Prune::exact_zeros));
}

/// Upper bound on nnz(a*b); used to guard memory before multiplying.
template <class Real>
std::uint64_t product_nnz_bound(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    std::uint64_t total = 0;
    for (typename GradedOp<Real>::Index r = 0; r < a.dim(); ++r)
        for (auto c : a.row_cols(r))
            total += b.row_cols(c).size();
    return total;
}

/// Plain matrix product (row-by-row with a dense accumulator).
template <class Real>
GradedOp<Real> compose(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    detail::require_same_shape(a, b, "compose");
    using Op = GradedOp<Real>;
    using Index = typename Op::Index;
    const Index d = a.dim();
    constexpr Index unmarked = std::numeric_limits<Index>::max();
    std::vector<typename Op::Scalar> acc(static_cast<std::size_t>(d));
    std::vector<Index> mark(static_cast<std::size_t>(d), unmarked);
    std::vector<Index> touched;
    std::vector<std::size_t> rp(static_cast<std::size_t>(d) + 1, 0);
    std::vector<Index> cols;
    std::vector<typename Op::Scalar> vals;
    cols.reserve(std::max(a.nnz(), b.nnz()));
    vals.reserve(std::max(a.nnz(), b.nnz()));
    for (Index r = 0; r < d; ++r) {
        touched.clear();
        auto ac = a.row_cols(r);
        auto av = a.row_values(r);
        for (std::size_t k = 0; k < ac.size(); ++k) {
            auto bc = b.row_cols(ac[k]);
            auto bv = b.row_values(ac[k]);
            for (std::size_t kk = 0; kk < bc.size(); ++kk) {
                const Index j = bc[kk];
                const auto p = detail::mul(av[k], bv[kk]);
                if (mark[j] != r) {
                    mark[j] = r;
                    acc[j] = p;
                    touched.push_back(j);
                } else {
                    acc[j] += p;
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (Index j : touched) {
            cols.push_back(j);
            vals.push_back(acc[j]);
        }
        rp[r + 1] = cols.size();
    }
    return Op::from_csr(a.space(), a.legs(), std::move(rp), std::move(cols),
                        std::move(vals), Prune::relative);
}

/// Graded tensor product A (x) B with the module convention
/// (a (x) b)(v1 (x) v2) = (-1)^{deg b * deg v1} a v1 (x) b v2.
/// The sign is taken entry by entry, so inhomogeneous B needs no special casing.
template <class Real>
GradedOp<Real> graded_tensor(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    if (!(a.space() == b.space()))
        throw std::invalid_argument("graded_tensor: operators live on different spaces");
    using Op = GradedOp<Real>;
    using Index = typename Op::Index;
    const auto& s = a.space();
    const int legs = a.legs() + b.legs();
    const Index db = b.dim();
    const Index d = a.dim() * db;
    std::vector<std::size_t> rp(static_cast<std::size_t>(d) + 1, 0);
    std::vector<Index> cols;
    std::vector<typename Op::Scalar> vals;
    cols.reserve(a.nnz() * b.nnz());
    vals.reserve(a.nnz() * b.nnz());
    std::vector<int> b_row_parity(static_cast<std::size_t>(db));
    for (Index r = 0; r < db; ++r)
        b_row_parity[r] = flat_parity(s, r, b.legs());
    for (Index ra = 0; ra < a.dim(); ++ra) {
        auto ac = a.row_cols(ra);
        auto av = a.row_values(ra);
        for (Index rb = 0; rb < db; ++rb) {
            auto bc = b.row_cols(rb);
            auto bv = b.row_values(rb);
            for (std::size_t i = 0; i < ac.size(); ++i) {
                const int pa = flat_parity(s, ac[i], a.legs());
                for (std::size_t j = 0; j < bc.size(); ++j) {
                    const int degb = b_row_parity[rb] ^ flat_parity(s, bc[j], b.legs());
                    auto v = detail::mul(av[i], bv[j]);
                    if (pa & degb)
                        v = -v;
                    cols.push_back(ac[i] * db + bc[j]);
                    vals.push_back(v);
                }
            }
            rp[ra * db + rb + 1] = cols.size();
        }
    }
    return Op::from_csr(s, legs, std::move(rp), std::move(cols), std::move(vals),
                        Prune::exact_zeros);
}

template <class Real>
HomogeneousSplit<Real> split(const GradedOp<Real>& a) {
    std::vector<typename GradedOp<Real>::Triplet> ev, od;
    a.for_each([&](auto r, auto c, const auto& v) {
        const int p = flat_parity(a.space(), r, a.legs()) ^
                      flat_parity(a.space(), c, a.legs());
        (p ? od : ev).push_back({r, c, v});
    });
    return {GradedOp<Real>::from_triplets(a.space(), a.legs(), std::move(ev)),
            GradedOp<Real>::from_triplets(a.space(), a.legs(), std::move(od))};
}

/// Places a k-leg operator on legs `positions` (1-based, strictly ascending)
/// of an m-leg space, identity elsewhere. A component of degree deg acting on
/// leg q picks up (-1)^{deg * (parity of the identity legs before q)}.
template <class Real>
GradedOp<Real> embed(const GradedOp<Real>& a, const std::vector<int>& positions,
                     int m) {
    using Op = GradedOp<Real>;
    using Index = typename Op::Index;
    const int k = a.legs();
    if (static_cast<int>(positions.size()) != k)
        throw std::invalid_argument("embed: need one position per leg");
    for (std::size_t b = 0; b < positions.size(); ++b) {
        if (positions[b] < 1 || positions[b] > m)
            throw std::out_of_range("embed: position " + std::to_string(positions[b]) +
                                    " outside 1.." + std::to_string(m));
        if (b > 0 && positions[b] <= positions[b - 1])
            throw std::invalid_argument(
                "embed: positions must be distinct and ascending");
    }
    const auto& s = a.space();
    const Index d = static_cast<Index>(s.dim());
    const int n = s.half_dim();
    std::vector<int> slot_of_leg(static_cast<std::size_t>(m), -1);
    for (int b = 0; b < k; ++b)
        slot_of_leg[static_cast<std::size_t>(positions[static_cast<std::size_t>(b)] - 1)] = b;
    const Index fillers = flat_dim(s, std::max(1, m - k)) / (m == k ? d : 1);
    std::vector<typename Op::Triplet> out;
    out.reserve(a.nnz() * static_cast<std::size_t>(fillers));
    std::vector<int> rd(static_cast<std::size_t>(k)), cd(static_cast<std::size_t>(k)),
        deg(static_cast<std::size_t>(k));
    std::vector<int> fd(static_cast<std::size_t>(std::max(0, m - k)));
    a.for_each([&](Index r, Index c, const auto& v) {
        Index rr = r, cc = c;
        for (int b = k - 1; b >= 0; --b) {
            rd[b] = static_cast<int>(rr % d);
            cd[b] = static_cast<int>(cc % d);
            rr /= d;
            cc /= d;
            deg[b] = (rd[b] >= n) ^ (cd[b] >= n);
        }
        for (Index f = 0; f < fillers; ++f) {
            Index ff = f;
            for (int t = m - k - 1; t >= 0; --t) {
                fd[t] = static_cast<int>(ff % d);
                ff /= d;
            }
            Index row = 0, col = 0;
            int filler_parity = 0, sign = 0, next_filler = 0;
            for (int leg = 0; leg < m; ++leg) {
                const int b = slot_of_leg[static_cast<std::size_t>(leg)];
                if (b < 0) {
                    const int x = fd[next_filler++];
                    row = row * d + x;
                    col = col * d + x;
                    filler_parity ^= x >= n;
                } else {
                    row = row * d + rd[b];
                    col = col * d + cd[b];
                    sign ^= deg[b] & filler_parity;
                }
            }
            out.push_back({row, col, sign ? -v : v});
        }
    });
    return Op::from_triplets(s, m, std::move(out), Prune::exact_zeros);
}

template <class To, class From>
GradedOp<To> op_cast(const GradedOp<From>& a) {
    std::vector<typename GradedOp<To>::Triplet> t;
    t.reserve(a.nnz());
    a.for_each([&](auto r, auto c, const auto& v) {
        t.push_back({r, c, std::complex<To>(static_cast<To>(v.real()),
                                            static_cast<To>(v.imag()))});
    });
    return GradedOp<To>::from_triplets(a.space(), a.legs(), std::move(t));
}

template <class Real>
GradedOp<Real> operator+(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    return op_add(a, b);
}
template <class Real>
GradedOp<Real> operator-(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    return op_sub(a, b);
}
template <class Real>
GradedOp<Real> operator-(const GradedOp<Real>& a) {
    return op_scale(a, std::complex<Real>(-1));
}
template <class Real>
GradedOp<Real> operator*(const GradedOp<Real>& a, const GradedOp<Real>& b) {
    return compose(a, b);
}
template <class Real>
GradedOp<Real> operator*(std::complex<Real> c, const GradedOp<Real>& a) {
    return op_scale(a, c);
}
template <class Real>
GradedOp<Real> operator*(const GradedOp<Real>& a, std::complex<Real> c) {
    return op_scale(a, c);
}

} // namespace qaybe
