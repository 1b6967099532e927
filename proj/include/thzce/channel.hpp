// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "thzce/rng.hpp"

namespace thzce::channel {

struct ArrayGeometry {
    enum class Layout { Linear, Planar };
    Layout layout = Layout::Linear;
    int elements = 1;
    int rows = 1; // planar only, rows * cols == elements
    int cols = 1;
    double spacing_wavelengths = 0.5;

    static ArrayGeometry linear(int elements, double spacing = 0.5);
    static ArrayGeometry planar(int rows, int cols, double spacing = 0.5);
};

// Unit-norm steering vector. Linear arrays respond to azimuth only;
// planar arrays are the separable product of a row response (azimuth)
// and a column response (elevation).
Eigen::VectorXcd array_response(const ArrayGeometry& geom, double azimuth_rad,
                                double elevation_rad = 0.0);

// Smooth-surface TE reflection coefficient,
// (cos t - sqrt(n^2 - sin^2 t)) / (cos t + sqrt(n^2 - sin^2 t)).
std::complex<double> fresnel_coefficient(double incidence_rad,
                                         std::complex<double> refractive_index);

// Full complex LoS ray coefficient: magnitude (L_spread * L_abs)^{-1/2},
// phase -2 pi f d / c.
std::complex<double> los_gain(double frequency_hz, double distance_m, double k_per_m);

// Full complex reflected-ray coefficient over path d1 + d2: reflection
// magnitude and phase from the Fresnel coefficient, delay phase
// -2 pi f (d1+d2)/c folded in.
std::complex<double> nlos_gain(double frequency_hz, double d1_m, double d2_m,
                               double k_per_m, std::complex<double> fresnel);

struct Ray {
    enum class Kind { Los, Nlos };
    Kind kind = Kind::Los;
    double aod_azimuth_rad = 0.0;
    double aod_elevation_rad = 0.0;
    double aoa_azimuth_rad = 0.0;
    double aoa_elevation_rad = 0.0;
    double delay_s = 0.0;
    double d1_m = 0.0; // tx-to-reflector (NLoS only)
    double d2_m = 0.0; // reflector-to-rx (NLoS only)
    std::complex<double> gain; // full coefficient, propagation phase included
};

struct ChannelConfig {
    ArrayGeometry tx = ArrayGeometry::linear(16);
    ArrayGeometry rx = ArrayGeometry::linear(16);
    double frequency_hz = 0.3e12;
    double distance_m = 1.0;
    double absorption_k_per_m = 0.0; // k(f) at the carrier
    int cluster_count = 3;           // N_clu
    int rays_per_cluster = 2;        // L_ray
    double tx_antenna_gain = 1.0;
    double rx_antenna_gain = 1.0;
    std::complex<double> reflector_index{2.24, 0.0};
};

// One LoS ray plus cluster_count * rays_per_cluster reflected rays.
// All four angles i.i.d. uniform on [-pi/2, pi/2]; reflected path lengths
// d1+d2 uniform on [d, 3d] with a uniform split point; incidence angle at
// the reflector uniform on [0, pi/2). Deterministic given the stream.
std::vector<Ray> draw_rays(Rng& rng, const ChannelConfig& cfg);

struct ChannelRealization {
    Eigen::MatrixXcd H; // Mr x Mt
    std::vector<Ray> rays;
    std::uint64_t seed = 0;
    double frequency_hz = 0.0;
    double distance_m = 0.0;
};

// H = sum over rays of gain * G_t * G_r * a_r(aoa) a_t(aod)^T.
// Ray gains already carry the per-path delay phase, so the stored rays
// reproduce H exactly by this same sum.
ChannelRealization synthesize_channel(const std::vector<Ray>& rays,
                                      const ChannelConfig& cfg,
                                      std::uint64_t seed = 0);

// Seeded draw + synthesis in one step.
ChannelRealization make_channel(std::uint64_t seed, const ChannelConfig& cfg);

} // namespace thzce::channel
