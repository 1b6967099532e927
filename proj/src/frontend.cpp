// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/frontend.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "thzce/constants.hpp"

namespace thzce::frontend {

namespace {

void check_block_args(int m_t, int n_p) {
    if (m_t < 1) throw std::invalid_argument("pilots: Mt must be >= 1");
    if (n_p < m_t)
        throw std::invalid_argument("pilots: Np < Mt would leave the training block underdetermined");
}

} // namespace

PilotMatrix dft_pilots(int m_t, int n_p) {
    check_block_args(m_t, n_p);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m_t));
    Eigen::MatrixXcd base(m_t, m_t);
    for (int k = 0; k < m_t; ++k)
        for (int m = 0; m < m_t; ++m)
            base(m, k) = std::polar(norm, -2.0 * constants::pi * m * k / m_t);
    PilotMatrix p;
    p.scheme = PilotScheme::Dft;
    p.X.resize(m_t, n_p);
    for (int n = 0; n < n_p; ++n)
        p.X.col(n) = base.col(n % m_t);
    return p;
}

PilotMatrix zc_pilots(int m_t, int n_p, int root) {
    check_block_args(m_t, n_p);
    if (root < 1 || std::gcd(root, m_t) != 1)
        throw std::invalid_argument("zc_pilots: root must be positive and coprime with Mt");
    const double norm = 1.0 / std::sqrt(static_cast<double>(m_t));
    Eigen::VectorXcd base(m_t);
    for (int n = 0; n < m_t; ++n) {
        const double quad = (m_t % 2 == 1) ? static_cast<double>(n) * (n + 1)
                                           : static_cast<double>(n) * n;
        base(n) = std::polar(1.0, -constants::pi * root * quad / m_t);
    }
    PilotMatrix p;
    p.scheme = PilotScheme::Zc;
    p.root = root;
    p.X.resize(m_t, n_p);
    for (int n = 0; n < n_p; ++n) {
        const int shift = n % m_t;
        for (int m = 0; m < m_t; ++m)
            p.X(m, n) = norm * base((m - shift + m_t) % m_t);
    }
    return p;
}

PilotMatrix make_pilots(PilotScheme scheme, int m_t, int n_p, int root) {
    return scheme == PilotScheme::Dft ? dft_pilots(m_t, n_p) : zc_pilots(m_t, n_p, root);
}

Eigen::MatrixXcd transmit(const Eigen::MatrixXcd& H, const PilotMatrix& pilots,
                          double noise_power, Rng& rng) {
    if (H.cols() != pilots.X.rows())
        throw std::invalid_argument("transmit: channel/pilot dimension mismatch");
    if (noise_power < 0.0) throw std::invalid_argument("transmit: noise power must be >= 0");
    Eigen::MatrixXcd r = H * pilots.X;
    if (noise_power > 0.0) {
        // column-major draw order, fixed by the storage layout
        for (Eigen::Index n = 0; n < r.cols(); ++n)
            for (Eigen::Index m = 0; m < r.rows(); ++m)
                r(m, n) += rng.complex_gaussian(noise_power);
    }
    return r;
}

double noise_power_for_snr(const Eigen::MatrixXcd& H, const PilotMatrix& pilots,
                           double target_snr_db) {
    const Eigen::MatrixXcd s = H * pilots.X;
    const double signal = s.squaredNorm();
    if (!(signal > 0.0))
        throw std::invalid_argument("noise_power_for_snr: zero signal, H X vanishes");
    return signal / (static_cast<double>(s.size()) * constants::linear_from_db(target_snr_db));
}

ObservationBlock quantize(const Eigen::MatrixXcd& R) {
    ObservationBlock out;
    out.Y.resize(R.rows(), R.cols());
    for (Eigen::Index n = 0; n < R.cols(); ++n) {
        for (Eigen::Index m = 0; m < R.rows(); ++m) {
            const auto v = R(m, n);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("quantize: non-finite sample");
            out.Y(m, n) = {v.real() >= 0.0 ? 1.0 : -1.0, v.imag() >= 0.0 ? 1.0 : -1.0};
        }
    }
    return out;
}

ObservationBlock observe(const Eigen::MatrixXcd& H, const PilotMatrix& pilots,
                         double noise_power, std::uint64_t seed) {
    Rng rng(seed);
    ObservationBlock out = quantize(transmit(H, pilots, noise_power, rng));
    out.noise_power = noise_power;
    out.seed = seed;
    return out;
}

Eigen::MatrixXd realify_channel(const Eigen::MatrixXcd& H) {
    Eigen::MatrixXd out(H.rows(), 2 * H.cols());
    out.leftCols(H.cols()) = H.real();
    out.rightCols(H.cols()) = H.imag();
    return out;
}

Eigen::MatrixXcd derealify_channel(const Eigen::MatrixXd& H) {
    if (H.cols() % 2 != 0)
        throw std::invalid_argument("derealify_channel: odd column count");
    const Eigen::Index mt = H.cols() / 2;
    Eigen::MatrixXcd out(H.rows(), mt);
    out.real() = H.leftCols(mt);
    out.imag() = H.rightCols(mt);
    return out;
}

Eigen::MatrixXd realify_pilot(const Eigen::VectorXcd& x) {
    const Eigen::Index mt = x.size();
    Eigen::MatrixXd out(2 * mt, 2);
    out.col(0).head(mt) = x.real();
    out.col(0).tail(mt) = -x.imag();
    out.col(1).head(mt) = x.imag();
    out.col(1).tail(mt) = x.real();
    return out;
}

Eigen::MatrixXd realify_samples(const Eigen::VectorXcd& v) {
    Eigen::MatrixXd out(v.size(), 2);
    out.col(0) = v.real();
    out.col(1) = v.imag();
    return out;
}

Eigen::VectorXcd derealify_samples(const Eigen::MatrixXd& v) {
    if (v.cols() != 2)
        throw std::invalid_argument("derealify_samples: expected two columns");
    Eigen::VectorXcd out(v.rows());
    out.real() = v.col(0);
    out.imag() = v.col(1);
    return out;
}

Eigen::MatrixXd stack_realified_pilots(const Eigen::MatrixXcd& X) {
    Eigen::MatrixXd out(2 * X.rows(), 2 * X.cols());
    for (Eigen::Index n = 0; n < X.cols(); ++n)
        out.middleCols(2 * n, 2) = realify_pilot(X.col(n));
    return out;
}

Eigen::MatrixXd stack_realified_targets(const Eigen::MatrixXcd& Y) {
    Eigen::MatrixXd out(Y.rows(), 2 * Y.cols());
    for (Eigen::Index n = 0; n < Y.cols(); ++n)
        out.middleCols(2 * n, 2) = realify_samples(Y.col(n));
    return out;
}

} // namespace thzce::frontend
