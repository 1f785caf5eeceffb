// kernels.hpp: scalar kernels, pole guards, complex parsing.

#pragma once

#include "qaybe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qaybe {

template <class Real>
inline constexpr Real pi_v = std::numbers::pi_v<Real>;

template <class Real>
std::complex<Real> cot(std::complex<Real> z) {
    return std::cos(z) / std::sin(z);
}

template <class Real>
std::complex<Real> coth(std::complex<Real> z) {
    return std::cosh(z) / std::sinh(z);
}

/// Distance from z to the nearest integer (complex plane).
template <class Real>
Real distance_to_integer(std::complex<Real> z) {
    return std::abs(z - std::complex<Real>(std::round(z.real()), 0));
}

template <class Real>
Real distance_to_odd_integer(std::complex<Real> z) {
    const Real k = std::round((z.real() - 1) / 2);
    return std::abs(z - std::complex<Real>(2 * k + 1, 0));
}

template <class Real>
void guard_nonzero(std::complex<Real> z, double margin, const char* what) {
    if (std::abs(z) < static_cast<Real>(margin))
        throw PoleProximityError(std::string(what) + " is within " +
                                 std::to_string(margin) + " of 0");
}

template <class Real>
void guard_off_integers(std::complex<Real> z, double margin, const char* what) {
    if (distance_to_integer(z) < static_cast<Real>(margin))
        throw PoleProximityError(std::string(what) + " is within " +
                                 std::to_string(margin) + " of an integer");
}

template <class Real>
void guard_off_odd_integers(std::complex<Real> z, double margin, const char* what) {
    if (distance_to_odd_integer(z) < static_cast<Real>(margin))
        throw PoleProximityError(std::string(what) + " is within " +
                                 std::to_string(margin) + " of an odd integer");
}

/// pi cot(pi h) + pi cot(pi u)
template <class Real>
std::complex<Real> phi_trig(std::complex<Real> h, std::complex<Real> u,
                            double margin = 0.05) {
    guard_off_integers(h, margin, "hbar");
    guard_off_integers(u, margin, "u");
    const Real pi = pi_v<Real>;
    return pi * cot(pi * h) + pi * cot(pi * u);
}

/// 1/u; the first argument is ignored.
template <class Real>
std::complex<Real> phi_rational(std::complex<Real>, std::complex<Real> u,
                                double margin = 0.05) {
    guard_nonzero(u, margin, "u");
    return Real(1) / u;
}

template <class Real>
struct FayValue {
    std::complex<Real> residual;
    Real scale; // largest of the three products
};

/// phi(x,u)phi(y,v) - phi(y,u+v)phi(x-y,u) - phi(y-x,v)phi(x,u+v)
template <class Real, class Phi>
FayValue<Real> fay_residual(Phi&& phi, std::complex<Real> x, std::complex<Real> y,
                            std::complex<Real> u, std::complex<Real> v) {
    const auto t1 = phi(x, u) * phi(y, v);
    const auto t2 = phi(y, u + v) * phi(x - y, u);
    const auto t3 = phi(y - x, v) * phi(x, u + v);
    return {t1 - t2 - t3, std::max({std::abs(t1), std::abs(t2), std::abs(t3)})};
}

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i" (exponents allowed).
inline std::optional<std::complex<double>> parse_complex(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != ' ')
            s.push_back(c);
    if (s.empty())
        return std::nullopt;
    auto parse_real = [](const std::string& t) -> std::optional<double> {
        if (t.empty())
            return std::nullopt;
        try {
            std::size_t used = 0;
            double v = std::stod(t, &used);
            if (used != t.size())
                return std::nullopt;
            return v;
        } catch (...) {
            return std::nullopt;
        }
    };
    if (s.back() != 'i') {
        auto re = parse_real(s);
        if (!re)
            return std::nullopt;
        return std::complex<double>(*re, 0);
    }
    s.pop_back();
    std::size_t cut = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    std::string re_part = cut == std::string::npos ? "" : s.substr(0, cut);
    std::string im_part = cut == std::string::npos ? s : s.substr(cut);
    if (im_part.empty() || im_part == "+")
        im_part = "1";
    else if (im_part == "-")
        im_part = "-1";
    auto im = parse_real(im_part);
    if (!im)
        return std::nullopt;
    double re = 0;
    if (!re_part.empty()) {
        auto r = parse_real(re_part);
        if (!r)
            return std::nullopt;
        re = *r;
    }
    return std::complex<double>(re, *im);
}

/// Round-trippable "a+bi" rendering.
inline std::string format_complex(std::complex<double> z, int digits = 17) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*g%+.*gi", digits, z.real(), digits, z.imag());
    return buf;
}

} // namespace qaybe
