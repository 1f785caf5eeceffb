// sampling.hpp: reproducible spectral points.

#pragma once

#include "qaybe/identities.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace qaybe {

inline constexpr std::uint64_t kDefaultSeed = 20240611;
inline constexpr int kMaxAttemptsPerSample = 10000;

/// Values the user fixed on the command line; everything else is drawn.
struct PinnedParameters {
    std::optional<Complex> hbar, x, y, u, v, w;
};

/// Uniform draws from the box [-1,1] x [-1,1]i. The double is formed from the
/// top 53 bits of mt19937_64 by hand so the sequence does not depend on the
/// standard library's distribution implementation.
class Sampler {
  public:
    explicit Sampler(std::uint64_t seed, PinnedParameters pinned = {}, double margin = kDefaultPoleMargin)
        : rng_(seed), pinned_(pinned), margin_(margin) {}

    SpectralPoint draw() {
        SpectralPoint p;
        p.hbar = pick(pinned_.hbar);
        p.x = pick(pinned_.x);
        p.y = pick(pinned_.y);
        p.u = pick(pinned_.u);
        p.v = pick(pinned_.v);
        p.w = pick(pinned_.w);
        p.pole_margin = margin_;
        return p;
    }

  private:
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }
    Complex pick(const std::optional<Complex>& fixed) {
        const double re = unit(), im = unit(); // always consume, so pinning one value
                                               // leaves the others unchanged
        return fixed ? *fixed : Complex(re, im);
    }

    std::mt19937_64 rng_;
    PinnedParameters pinned_;
    double margin_;
};

} // namespace qaybe
