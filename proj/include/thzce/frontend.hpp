// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "thzce/rng.hpp"

namespace thzce::frontend {

enum class PilotScheme { Dft, Zc };

struct PilotMatrix {
    Eigen::MatrixXcd X; // Mt x Np, unit-norm columns
    PilotScheme scheme = PilotScheme::Dft;
    int root = 1; // ZC only
};

// Columns are the unit-norm DFT basis vectors of size Mt, cycled to fill Np.
PilotMatrix dft_pilots(int m_t, int n_p);

// Cyclic shifts of the Zadoff-Chu base sequence (n(n+1) exponent for odd Mt,
// n^2 for even Mt), normalized and cycled to fill Np. Requires gcd(root, Mt) = 1.
PilotMatrix zc_pilots(int m_t, int n_p, int root = 1);

PilotMatrix make_pilots(PilotScheme scheme, int m_t, int n_p, int root = 1);

// R = H X + Z, Z i.i.d. circularly-symmetric complex Gaussian with
// E|z|^2 = noise_power.
Eigen::MatrixXcd transmit(const Eigen::MatrixXcd& H, const PilotMatrix& pilots,
                          double noise_power, Rng& rng);

// N0 such that ||H X||_F^2 / (Mr Np N0) = 10^{snr_db/10}.
double noise_power_for_snr(const Eigen::MatrixXcd& H, const PilotMatrix& pilots,
                           double target_snr_db);

struct ObservationBlock {
    Eigen::MatrixXcd Y; // Mr x Np, entries in {+-1 +- j}
    double noise_power = 0.0;
    std::uint64_t seed = 0;
};

// Elementwise Sign(Re) + j Sign(Im); sign(0) = +1. Throws on non-finite input.
ObservationBlock quantize(const Eigen::MatrixXcd& R);

// transmit + quantize from a fresh stream, recording N0 and the seed
ObservationBlock observe(const Eigen::MatrixXcd& H, const PilotMatrix& pilots,
                         double noise_power, std::uint64_t seed);

// Complex-to-real conversions. The realified pilot is laid out so that
// realify_channel(H) * realify_pilot(x) = [Re(Hx), Im(Hx)] columnwise.
Eigen::MatrixXd realify_channel(const Eigen::MatrixXcd& H);  // Mr x 2Mt, [Re, Im]
Eigen::MatrixXcd derealify_channel(const Eigen::MatrixXd& H);
Eigen::MatrixXd realify_pilot(const Eigen::VectorXcd& x);    // 2Mt x 2
Eigen::MatrixXd realify_samples(const Eigen::VectorXcd& v);  // M x 2, [Re, Im]
Eigen::VectorXcd derealify_samples(const Eigen::MatrixXd& v);

// Pilot-wise stacks used by the trainers: columns n of the complex
// matrices occupy columns 2n, 2n+1 of the realified stacks.
Eigen::MatrixXd stack_realified_pilots(const Eigen::MatrixXcd& X);  // 2Mt x 2Np
Eigen::MatrixXd stack_realified_targets(const Eigen::MatrixXcd& Y); // Mr x 2Np

} // namespace thzce::frontend
