// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/probit.hpp"

#include <cmath>
#include <stdexcept>

namespace thzce::probit {

namespace {

constexpr double inv_sqrt2 = 0.7071067811865475244;
constexpr double half_log_two_pi = 0.9189385332046727418; // log(2*pi)/2

} // namespace

double erfcx(double x) {
    if (x < 0.0) throw std::invalid_argument("erfcx: negative argument");
    if (x <= 25.0) {
        // erfc(x) stays normal down to ~1e-273 here and exp(x^2) <= e^625,
        // so the direct product is accurate.
        return std::exp(x * x) * std::erfc(x);
    }
    // Asymptotic branch: erfcx(x) ~ 1/(x sqrt(pi)) * sum (-1)^n (2n-1)!!/(2x^2)^n
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 8; ++n) {
        term *= -static_cast<double>(2 * n - 1) * inv2x2;
        sum += term;
    }
    return sum / (x * 1.7724538509055160273); // sqrt(pi)
}

double norm_cdf(double t) { return 0.5 * std::erfc(-t * inv_sqrt2); }

double log_norm_cdf(double t) {
    if (t >= 0.0) {
        // log(1 - Phi(-t)); Phi(-t) <= 1/2 so log1p is exact
        return std::log1p(-0.5 * std::erfc(t * inv_sqrt2));
    }
    // Phi(t) = erfcx(-t/sqrt(2)) * e^{-t^2/2} / 2
    return std::log(0.5 * erfcx(-t * inv_sqrt2)) - 0.5 * t * t;
}

double norm_pdf_over_cdf(double t) {
    if (t >= 0.0) {
        const double pdf = std::exp(-0.5 * t * t - half_log_two_pi);
        return pdf / norm_cdf(t);
    }
    // phi(t)/Phi(t) = sqrt(2/pi) / erfcx(-t/sqrt(2)); the e^{-t^2/2} factors cancel
    return 0.7978845608028653559 / erfcx(-t * inv_sqrt2);
}

} // namespace thzce::probit
