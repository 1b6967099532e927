// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include <doctest.h>

#include <cmath>
#include <complex>

#include "thzce/constants.hpp"
#include "thzce/frontend.hpp"

using namespace thzce;
using namespace thzce::frontend;
using std::complex;

namespace {

Eigen::MatrixXcd random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = {rng.gaussian(), rng.gaussian()};
    return m;
}

} // namespace

TEST_CASE("dft pilots: 2-point block") {
    const auto p = dft_pilots(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(p.X(0, 0) - complex<double>(s, 0)) < 1e-14);
    CHECK(std::abs(p.X(1, 0) - complex<double>(s, 0)) < 1e-14);
    CHECK(std::abs(p.X(0, 1) - complex<double>(s, 0)) < 1e-14);
    CHECK(std::abs(p.X(1, 1) - complex<double>(-s, 0)) < 1e-14);
}

TEST_CASE("pilot blocks are unitary") {
    for (int m : {2, 3, 8, 16}) {
        const auto dft = dft_pilots(m, m);
        CHECK((dft.X * dft.X.adjoint() - Eigen::MatrixXcd::Identity(m, m)).norm() < 1e-10);
    }
    for (int m : {3, 5, 16}) {
        const auto zc = zc_pilots(m, m, 1);
        CHECK((zc.X * zc.X.adjoint() - Eigen::MatrixXcd::Identity(m, m)).norm() < 1e-10);
    }
    // ZC with a larger coprime root
    const auto zc = zc_pilots(16, 16, 5);
    CHECK((zc.X * zc.X.adjoint() - Eigen::MatrixXcd::Identity(16, 16)).norm() < 1e-10);
}

TEST_CASE("pilot columns cycle with period Mt") {
    const auto dft = dft_pilots(4, 8);
    const auto zc = zc_pilots(4, 8, 1);
    for (int n = 0; n < 4; ++n) {
        CHECK(dft.X.col(n) == dft.X.col(n + 4));
        CHECK(zc.X.col(n) == zc.X.col(n + 4));
    }
}

TEST_CASE("zc pilots: base sequence and constant amplitude") {
    const auto p = zc_pilots(3, 3, 1);
    const double s = 1.0 / std::sqrt(3.0);
    // base: [1, e^{-j 2 pi / 3}, e^{-j 2 pi}] = [1, e^{-j 2 pi / 3}, 1]
    CHECK(std::abs(p.X(0, 0) - complex<double>(s, 0)) < 1e-14);
    CHECK(std::abs(p.X(1, 0) - s * std::polar(1.0, -2.0 * constants::pi / 3.0)) < 1e-14);
    CHECK(std::abs(p.X(2, 0) - complex<double>(s, 0)) < 1e-14);

    for (int m : {3, 4, 16}) {
        const auto q = zc_pilots(m, m, 1);
        for (Eigen::Index c = 0; c < q.X.cols(); ++c)
            for (Eigen::Index r = 0; r < q.X.rows(); ++r)
                CHECK(std::abs(q.X(r, c)) ==
                      doctest::Approx(1.0 / std::sqrt(static_cast<double>(m))).epsilon(1e-12));
    }
}

TEST_CASE("pilot validation") {
    CHECK_THROWS_AS(dft_pilots(8, 4), std::invalid_argument);  // underdetermined block
    CHECK_THROWS_AS(zc_pilots(16, 16, 2), std::invalid_argument); // gcd(2,16) != 1
    CHECK_THROWS_AS(zc_pilots(16, 16, 4), std::invalid_argument);
    CHECK_NOTHROW(zc_pilots(16, 16, 3));
}

TEST_CASE("transmit: noiseless and deterministic") {
    Rng chan_rng(5);
    const auto h = random_complex(3, 4, chan_rng);
    const auto pilots = dft_pilots(4, 8);

    Rng r0(1);
    CHECK((transmit(h, pilots, 0.0, r0) - h * pilots.X).norm() == 0.0);

    Rng r1(42), r2(42);
    const auto a = transmit(h, pilots, 0.5, r1);
    const auto b = transmit(h, pilots, 0.5, r2);
    CHECK(a == b);
}

TEST_CASE("transmit: noise variance matches N0") {
    const Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(10, 4);
    const auto pilots = dft_pilots(4, 10000); // 1e5 complex samples
    Rng rng(99);
    const auto r = transmit(h, pilots, 1.0, rng);
    const double sample_var = r.squaredNorm() / static_cast<double>(r.size());
    CHECK(sample_var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("noise power calibration") {
    Rng rng(17);
    const auto h = random_complex(4, 4, rng);
    const auto pilots = zc_pilots(4, 16, 1);
    const double signal = (h * pilots.X).squaredNorm();
    const double n0_0db = noise_power_for_snr(h, pilots, 0.0);
    CHECK(n0_0db == doctest::Approx(signal / (4.0 * 16.0)).epsilon(1e-12));
    CHECK(noise_power_for_snr(h, pilots, 10.0) == doctest::Approx(n0_0db / 10.0).epsilon(1e-12));

    // round-trip identity
    const double target = -7.3;
    const double n0 = noise_power_for_snr(h, pilots, target);
    const double measured =
        constants::db_from_linear(signal / (static_cast<double>(h.rows()) * 16.0 * n0));
    CHECK(measured == doctest::Approx(target).epsilon(1e-12));

    CHECK_THROWS_AS(noise_power_for_snr(Eigen::MatrixXcd::Zero(4, 4), pilots, 0.0),
                    std::invalid_argument);
}

TEST_CASE("noise calibration: empirical snr within 0.1 dB") {
    Rng rng(23);
    const auto h = random_complex(4, 4, rng);
    const auto pilots = dft_pilots(4, 64);
    const double target = 3.0;
    const double n0 = noise_power_for_snr(h, pilots, target);
    // measure noise power over many draws
    double noise_energy = 0.0;
    std::size_t count = 0;
    const Eigen::MatrixXcd clean = h * pilots.X;
    for (int trial = 0; trial < 400; ++trial) {
        Rng noise_rng(1000 + trial);
        const auto r = transmit(h, pilots, n0, noise_rng);
        noise_energy += (r - clean).squaredNorm();
        count += static_cast<std::size_t>(r.size());
    }
    const double measured_db = constants::db_from_linear(
        clean.squaredNorm() / static_cast<double>(clean.size()) /
        (noise_energy / static_cast<double>(count)));
    CHECK(std::abs(measured_db - target) < 0.1);
}

TEST_CASE("quantize: definition-1 mappings") {
    Eigen::MatrixXcd r(1, 2);
    r(0, 0) = {0.5, -0.0}; // sign(-0.0) = +1: -0.0 >= 0
    r(0, 1) = {-3.0, 2.0};
    const auto obs = quantize(r);
    CHECK(obs.Y(0, 0) == complex<double>(1.0, 1.0));
    CHECK(obs.Y(0, 1) == complex<double>(-1.0, 1.0));

    // zero maps to +1 in both dimensions
    Eigen::MatrixXcd zero(1, 1);
    zero(0, 0) = {0.0, 0.0};
    CHECK(quantize(zero).Y(0, 0) == complex<double>(1.0, 1.0));
}

TEST_CASE("quantize: alphabet, idempotence, scale invariance") {
    Rng rng(3);
    const auto r = random_complex(6, 9, rng);
    const auto y = quantize(r).Y;
    for (Eigen::Index c = 0; c < y.cols(); ++c)
        for (Eigen::Index q = 0; q < y.rows(); ++q) {
            CHECK(std::abs(y(q, c).real()) == 1.0);
            CHECK(std::abs(y(q, c).imag()) == 1.0);
        }
    CHECK(quantize(y).Y == y);
    CHECK(quantize(Eigen::MatrixXcd(2.75 * r)).Y == y);

    Eigen::MatrixXcd bad(1, 1);
    bad(0, 0) = {std::nan(""), 0.0};
    CHECK_THROWS_AS(quantize(bad), std::invalid_argument);
}

TEST_CASE("realify: worked example") {
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = {1.0, 2.0};
    Eigen::VectorXcd x(1);
    x(0) = {3.0, 4.0};
    const Eigen::MatrixXd hr = realify_channel(h);
    const Eigen::MatrixXd xr = realify_pilot(x);
    const Eigen::MatrixXd prod = hr * xr;
    // H x = (1+2j)(3+4j) = -5 + 10j
    CHECK(prod(0, 0) == doctest::Approx(-5.0).epsilon(1e-14));
    CHECK(prod(0, 1) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("realify: real-valued channel has a zero imaginary block") {
    Eigen::MatrixXcd h(2, 2);
    h << complex<double>(1, 0), complex<double>(2, 0), complex<double>(3, 0),
        complex<double>(4, 0);
    const auto hr = realify_channel(h);
    CHECK(hr.leftCols(2) == h.real());
    CHECK(hr.rightCols(2).norm() == 0.0);
}

TEST_CASE("realify/derealify round trip") {
    Rng rng(8);
    const auto h = random_complex(5, 7, rng);
    CHECK((derealify_channel(realify_channel(h)) - h).norm() == 0.0);
    const Eigen::VectorXcd v = random_complex(6, 1, rng);
    CHECK((derealify_samples(realify_samples(v)) - v).norm() == 0.0);
}

TEST_CASE("realification homomorphism up to dimension 32") {
    Rng rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const int mr = 1 + static_cast<int>(rng.uniform(0.0, 32.0));
        const int mt = 1 + static_cast<int>(rng.uniform(0.0, 32.0));
        const auto h = random_complex(mr, mt, rng);
        const Eigen::VectorXcd x = random_complex(mt, 1, rng);
        const Eigen::VectorXcd hx = h * x;
        const Eigen::MatrixXd real_route = realify_channel(h) * realify_pilot(x);
        CHECK((real_route.col(0) - hx.real()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((real_route.col(1) - hx.imag()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("stacked layouts agree with the per-pilot forms") {
    Rng rng(55);
    const auto x = random_complex(3, 5, rng);
    const auto y = random_complex(4, 5, rng);
    const auto xs = stack_realified_pilots(x);
    const auto ys = stack_realified_targets(y);
    REQUIRE(xs.rows() == 6);
    REQUIRE(xs.cols() == 10);
    REQUIRE(ys.rows() == 4);
    REQUIRE(ys.cols() == 10);
    for (int n = 0; n < 5; ++n) {
        CHECK((xs.middleCols(2 * n, 2) - realify_pilot(x.col(n))).norm() == 0.0);
        CHECK((ys.middleCols(2 * n, 2) - realify_samples(y.col(n))).norm() == 0.0);
    }
}
