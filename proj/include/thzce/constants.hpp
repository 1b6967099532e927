// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <cmath>

namespace thzce::constants {

// SI 2019 exact values.
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double boltzmann = 1.380649e-23;       // J/K

inline constexpr double pi = 3.14159265358979323846;

// Power quantities: linear factors are the canonical representation,
// dB is always 10*log10.
inline double db_from_linear(double factor) { return 10.0 * std::log10(factor); }
inline double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace thzce::constants
