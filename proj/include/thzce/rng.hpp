// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "thzce/constants.hpp"

namespace thzce {

// Finalizer of the splitmix64 generator; used to derive independent
// stream seeds from a master seed without shared state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed derivation scheme: hash the master seed, fold in a stream tag,
// then an index. Documented so datasets can be reproduced externally.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ stream);
    return splitmix64(h ^ index);
}

// Deterministic random stream. Gaussian variates are produced by an
// explicit Box-Muller transform (fixed draw count per variate) so the
// byte-level output does not depend on the standard library's
// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, two uniforms per variate
    double gaussian() {
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
    }

    double gaussian(double stddev) { return stddev * gaussian(); }

    // circularly-symmetric complex normal with E|z|^2 = variance
    std::complex<double> complex_gaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = gaussian(s);
        const double im = gaussian(s);
        return {re, im};
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace thzce
