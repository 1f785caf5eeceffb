// superspace.hpp: the Z2-graded space C^{N|N} and its signed basis.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaybe {

/// Basis label of C^{N|N}: +1..+N are even, -1..-N are odd.
using SignedIndex = int;

/// The graded space C^{N|N}.
///
/// Basis positions put the even vectors first, then the odd ones, each block
/// ascending by absolute value:
///
///   +1 -> 0, ..., +N -> N-1, -1 -> N, ..., -N -> 2N-1
///
/// so the parity of a position is simply `pos >= N`.
class Superspace {
  public:
    explicit Superspace(int half_dim) : n_(half_dim) {
        if (half_dim < 1)
            throw std::invalid_argument("Superspace: N must be >= 1, got " +
                                        std::to_string(half_dim));
    }

    int half_dim() const noexcept { return n_; }
    int dim() const noexcept { return 2 * n_; }

    bool valid(SignedIndex i) const noexcept {
        return i != 0 && i >= -n_ && i <= n_;
    }

    static int parity(SignedIndex i) noexcept { return i < 0 ? 1 : 0; }
    int parity_at(int pos) const noexcept { return pos >= n_ ? 1 : 0; }

    int position(SignedIndex i) const {
        if (!valid(i))
            throw std::out_of_range("Superspace: invalid signed index " +
                                    std::to_string(i) + " for N=" +
                                    std::to_string(n_));
        return i > 0 ? i - 1 : n_ - i - 1;
    }

    SignedIndex index_at(int pos) const {
        if (pos < 0 || pos >= dim())
            throw std::out_of_range("Superspace: position out of range");
        return pos < n_ ? pos + 1 : -(pos - n_ + 1);
    }

    std::vector<SignedIndex> basis() const {
        std::vector<SignedIndex> out;
        out.reserve(static_cast<std::size_t>(dim()));
        for (int pos = 0; pos < dim(); ++pos)
            out.push_back(index_at(pos));
        return out;
    }

    friend bool operator==(const Superspace&, const Superspace&) = default;

  private:
    int n_;
};

inline Superspace make_space(int half_dim) { return Superspace(half_dim); }

/// Flattened multi-index over `legs` tensor factors, leg 1 most significant.
inline std::uint64_t flat_dim(const Superspace& s, int legs) {
    std::uint64_t d = 1;
    for (int a = 0; a < legs; ++a)
        d *= static_cast<std::uint64_t>(s.dim());
    return d;
}

inline std::uint64_t flatten(const Superspace& s,
                             const std::vector<SignedIndex>& multi) {
    std::uint64_t x = 0;
    for (SignedIndex i : multi)
        x = x * static_cast<std::uint64_t>(s.dim()) +
            static_cast<std::uint64_t>(s.position(i));
    return x;
}

inline std::vector<SignedIndex> unflatten(const Superspace& s, std::uint64_t x,
                                          int legs) {
    std::vector<SignedIndex> out(static_cast<std::size_t>(legs));
    const auto d = static_cast<std::uint64_t>(s.dim());
    for (int a = legs - 1; a >= 0; --a) {
        out[static_cast<std::size_t>(a)] = s.index_at(static_cast<int>(x % d));
        x /= d;
    }
    return out;
}

/// Sum of basis parities of a flattened multi-index, mod 2.
inline int flat_parity(const Superspace& s, std::uint64_t x, int legs) {
    const auto d = static_cast<std::uint64_t>(s.dim());
    const auto n = static_cast<std::uint64_t>(s.half_dim());
    int p = 0;
    for (int a = 0; a < legs; ++a) {
        p ^= (x % d) >= n ? 1 : 0;
        x /= d;
    }
    return p;
}

} // namespace qaybe
