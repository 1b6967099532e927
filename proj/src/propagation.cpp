// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "thzce/constants.hpp"

namespace thzce::propagation {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

} // namespace

AbsorptionSpectrum::AbsorptionSpectrum(std::vector<double> frequency_hz,
                                       std::vector<double> k_per_m)
    : frequency_hz_(std::move(frequency_hz)), k_per_m_(std::move(k_per_m)) {
    if (frequency_hz_.size() != k_per_m_.size())
        throw std::invalid_argument("absorption table: frequency/coefficient length mismatch");
    if (frequency_hz_.size() < 2)
        throw std::invalid_argument("absorption table: need at least 2 points");
    for (std::size_t i = 0; i < frequency_hz_.size(); ++i) {
        if (!std::isfinite(frequency_hz_[i]) || frequency_hz_[i] <= 0.0)
            throw std::invalid_argument("absorption table: non-positive frequency at row " +
                                        std::to_string(i + 1));
        if (!std::isfinite(k_per_m_[i]) || k_per_m_[i] < 0.0)
            throw std::invalid_argument("absorption table: negative coefficient at row " +
                                        std::to_string(i + 1));
        if (i > 0 && frequency_hz_[i] <= frequency_hz_[i - 1])
            throw std::invalid_argument("absorption table: frequencies not strictly increasing at row " +
                                        std::to_string(i + 1));
    }
}

double AbsorptionSpectrum::lookup(double f) const {
    if (frequency_hz_.empty())
        throw std::logic_error("absorption table: empty spectrum");
    if (f < frequency_hz_.front() || f > frequency_hz_.back())
        throw std::out_of_range("absorption lookup: frequency " + std::to_string(f) +
                                " Hz outside tabulated range [" +
                                std::to_string(frequency_hz_.front()) + ", " +
                                std::to_string(frequency_hz_.back()) + "]");
    auto hi = std::lower_bound(frequency_hz_.begin(), frequency_hz_.end(), f);
    if (hi == frequency_hz_.begin())
        return k_per_m_.front();
    const auto i = static_cast<std::size_t>(hi - frequency_hz_.begin());
    const double f0 = frequency_hz_[i - 1], f1 = frequency_hz_[i];
    const double k0 = k_per_m_[i - 1], k1 = k_per_m_[i];
    const double t = (f - f0) / (f1 - f0);
    return k0 + t * (k1 - k0);
}

AbsorptionSpectrum load_absorption_table(std::istream& source) {
    std::string line;
    if (!std::getline(source, line))
        throw std::invalid_argument("absorption table: empty stream");
    // tolerate a UTF-8 BOM and trailing CR
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "frequency_hz,k_per_m")
        throw std::invalid_argument("absorption table: expected header 'frequency_hz,k_per_m', got '" +
                                    line + "'");

    std::vector<double> fs, ks;
    std::size_t row = 1;
    while (std::getline(source, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("absorption table: malformed row " + std::to_string(row));
        std::size_t pos_f = 0, pos_k = 0;
        double f = 0.0, k = 0.0;
        try {
            f = std::stod(line.substr(0, comma), &pos_f);
            k = std::stod(line.substr(comma + 1), &pos_k);
        } catch (const std::exception&) {
            throw std::invalid_argument("absorption table: malformed row " + std::to_string(row));
        }
        if (pos_f != comma || comma + 1 + pos_k != line.size())
            throw std::invalid_argument("absorption table: malformed row " + std::to_string(row));
        if (!std::isfinite(f) || f <= 0.0)
            throw std::invalid_argument("absorption table: non-positive frequency at row " +
                                        std::to_string(row));
        if (!std::isfinite(k) || k < 0.0)
            throw std::invalid_argument("absorption table: negative coefficient at row " +
                                        std::to_string(row));
        if (!fs.empty() && f <= fs.back())
            throw std::invalid_argument("absorption table: frequencies not strictly increasing at row " +
                                        std::to_string(row));
        fs.push_back(f);
        ks.push_back(k);
    }
    return AbsorptionSpectrum(std::move(fs), std::move(ks));
}

AbsorptionSpectrum load_absorption_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("absorption table: cannot open '" + path + "'");
    return load_absorption_table(in);
}

double absorption_loss(double k_per_m, double distance_m) {
    if (k_per_m < 0.0) throw std::invalid_argument("absorption_loss: k must be >= 0");
    check_positive(distance_m, "absorption_loss: distance");
    return std::exp(k_per_m * distance_m);
}

double spreading_loss(double frequency_hz, double distance_m) {
    check_positive(frequency_hz, "spreading_loss: frequency");
    check_positive(distance_m, "spreading_loss: distance");
    const double x = 4.0 * constants::pi * frequency_hz * distance_m / constants::speed_of_light;
    return x * x;
}

double received_psd(const LinkBudget& lb) {
    check_positive(lb.tx_psd_w_per_hz, "received_psd: tx psd");
    const double k = lb.medium.absorption.lookup(lb.frequency_hz);
    return lb.tx_psd_w_per_hz /
           (spreading_loss(lb.frequency_hz, lb.distance_m) * absorption_loss(k, lb.distance_m));
}

double molecular_noise_psd(const LinkBudget& lb) {
    check_positive(lb.tx_psd_w_per_hz, "molecular_noise_psd: tx psd");
    const double k = lb.medium.absorption.lookup(lb.frequency_hz);
    return lb.tx_psd_w_per_hz / spreading_loss(lb.frequency_hz, lb.distance_m) *
           (-std::expm1(-k * lb.distance_m));
}

double jn_noise_psd(double frequency_hz, double temperature_k, JnModel model) {
    check_positive(frequency_hz, "jn_noise_psd: frequency");
    check_positive(temperature_k, "jn_noise_psd: temperature");
    if (model == JnModel::FirstOrder)
        return constants::boltzmann * temperature_k;
    const double x = constants::planck * frequency_hz / (constants::boltzmann * temperature_k);
    return constants::planck * frequency_hz / std::expm1(x);
}

double total_noise_psd(const LinkBudget& lb) {
    return jn_noise_psd(lb.frequency_hz, lb.medium.temperature_k, JnModel::FirstOrder) +
           molecular_noise_psd(lb);
}

double snr(const LinkBudget& lb) { return received_psd(lb) / total_noise_psd(lb); }

double snr_db(const LinkBudget& lb) { return constants::db_from_linear(snr(lb)); }

} // namespace thzce::propagation
