// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "thzce/constants.hpp"
#include "thzce/propagation.hpp"

namespace thzce::channel {

using std::complex;

ArrayGeometry ArrayGeometry::linear(int elements, double spacing) {
    if (elements < 1) throw std::invalid_argument("array: need at least 1 element");
    if (!(spacing > 0.0)) throw std::invalid_argument("array: spacing must be positive");
    ArrayGeometry g;
    g.layout = Layout::Linear;
    g.elements = elements;
    g.rows = elements;
    g.cols = 1;
    g.spacing_wavelengths = spacing;
    return g;
}

ArrayGeometry ArrayGeometry::planar(int rows, int cols, double spacing) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("array: need at least 1x1 elements");
    if (!(spacing > 0.0)) throw std::invalid_argument("array: spacing must be positive");
    ArrayGeometry g;
    g.layout = Layout::Planar;
    g.elements = rows * cols;
    g.rows = rows;
    g.cols = cols;
    g.spacing_wavelengths = spacing;
    return g;
}

Eigen::VectorXcd array_response(const ArrayGeometry& geom, double azimuth, double elevation) {
    const double two_pi_d = 2.0 * constants::pi * geom.spacing_wavelengths;
    Eigen::VectorXcd a(geom.elements);
    if (geom.layout == ArrayGeometry::Layout::Linear) {
        const double step = two_pi_d * std::sin(azimuth);
        for (int m = 0; m < geom.elements; ++m)
            a(m) = std::polar(1.0, step * m);
    } else {
        const double step_r = two_pi_d * std::sin(azimuth);
        const double step_c = two_pi_d * std::sin(elevation);
        for (int r = 0; r < geom.rows; ++r)
            for (int c = 0; c < geom.cols; ++c)
                a(r * geom.cols + c) = std::polar(1.0, step_r * r + step_c * c);
    }
    return a / std::sqrt(static_cast<double>(geom.elements));
}

complex<double> fresnel_coefficient(double incidence, complex<double> n) {
    const double ct = std::cos(incidence);
    const double st = std::sin(incidence);
    const complex<double> root = std::sqrt(n * n - st * st);
    return (ct - root) / (ct + root);
}

complex<double> los_gain(double f, double d, double k) {
    const double loss = propagation::spreading_loss(f, d) * propagation::absorption_loss(k, d);
    const double phase = -2.0 * constants::pi * f * d / constants::speed_of_light;
    return std::polar(1.0 / std::sqrt(loss), phase);
}

complex<double> nlos_gain(double f, double d1, double d2, double k, complex<double> fresnel) {
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw std::invalid_argument("nlos_gain: reflector distances must be positive");
    const double path = d1 + d2;
    const double loss = propagation::spreading_loss(f, path) * propagation::absorption_loss(k, path);
    const double delay_phase = -2.0 * constants::pi * f * path / constants::speed_of_light;
    return fresnel / std::sqrt(loss) * std::polar(1.0, delay_phase);
}

std::vector<Ray> draw_rays(Rng& rng, const ChannelConfig& cfg) {
    if (cfg.cluster_count < 0) throw std::invalid_argument("draw_rays: cluster count must be >= 0");
    if (cfg.rays_per_cluster < 1) throw std::invalid_argument("draw_rays: rays per cluster must be >= 1");

    constexpr double half_pi = constants::pi / 2.0;
    auto draw_angle = [&] { return rng.uniform(-half_pi, half_pi); };

    std::vector<Ray> rays;
    rays.reserve(1 + static_cast<std::size_t>(cfg.cluster_count) * cfg.rays_per_cluster);

    Ray los;
    los.kind = Ray::Kind::Los;
    los.aod_azimuth_rad = draw_angle();
    los.aod_elevation_rad = draw_angle();
    los.aoa_azimuth_rad = draw_angle();
    los.aoa_elevation_rad = draw_angle();
    los.delay_s = cfg.distance_m / constants::speed_of_light;
    los.gain = los_gain(cfg.frequency_hz, cfg.distance_m, cfg.absorption_k_per_m);
    rays.push_back(los);

    for (int i = 0; i < cfg.cluster_count * cfg.rays_per_cluster; ++i) {
        Ray r;
        r.kind = Ray::Kind::Nlos;
        r.aod_azimuth_rad = draw_angle();
        r.aod_elevation_rad = draw_angle();
        r.aoa_azimuth_rad = draw_angle();
        r.aoa_elevation_rad = draw_angle();
        // reflected path length in [d, 3d], split uniformly between the legs
        const double path = rng.uniform(cfg.distance_m, 3.0 * cfg.distance_m);
        const double split = rng.uniform();
        r.d1_m = std::max(path * split, 1e-12);
        r.d2_m = std::max(path - r.d1_m, 1e-12);
        const double incidence = rng.uniform(0.0, half_pi);
        r.delay_s = (r.d1_m + r.d2_m) / constants::speed_of_light;
        r.gain = nlos_gain(cfg.frequency_hz, r.d1_m, r.d2_m, cfg.absorption_k_per_m,
                           fresnel_coefficient(incidence, cfg.reflector_index));
        rays.push_back(r);
    }
    return rays;
}

ChannelRealization synthesize_channel(const std::vector<Ray>& rays, const ChannelConfig& cfg,
                                      std::uint64_t seed) {
    const int mr = cfg.rx.elements;
    const int mt = cfg.tx.elements;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(mr, mt);
    const double gains = cfg.tx_antenna_gain * cfg.rx_antenna_gain;
    for (const Ray& r : rays) {
        const Eigen::VectorXcd ar = array_response(cfg.rx, r.aoa_azimuth_rad, r.aoa_elevation_rad);
        const Eigen::VectorXcd at = array_response(cfg.tx, r.aod_azimuth_rad, r.aod_elevation_rad);
        h.noalias() += (r.gain * gains) * (ar * at.transpose());
    }
    ChannelRealization out;
    out.H = std::move(h);
    out.rays = rays;
    out.seed = seed;
    out.frequency_hz = cfg.frequency_hz;
    out.distance_m = cfg.distance_m;
    return out;
}

ChannelRealization make_channel(std::uint64_t seed, const ChannelConfig& cfg) {
    Rng rng(seed);
    return synthesize_channel(draw_rays(rng, cfg), cfg, seed);
}

} // namespace thzce::channel
