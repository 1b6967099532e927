// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

namespace thzce::probit {

// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
double erfcx(double x);

// Standard normal CDF.
double norm_cdf(double t);

// log Phi(t), stable for arbitrarily negative t (no underflow to -inf
// before t^2/2 overflows the log).
double log_norm_cdf(double t);

// phi(t) / Phi(t), the inverse Mills ratio; ~ -t as t -> -inf.
double norm_pdf_over_cdf(double t);

} // namespace thzce::probit
