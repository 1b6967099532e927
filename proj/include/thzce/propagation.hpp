// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace thzce::propagation {

// Tabulated medium absorption coefficient k(f) with linear interpolation.
// Lookups outside the tabulated range throw: absorption varies by orders
// of magnitude between spectral lines, so extrapolation is meaningless.
class AbsorptionSpectrum {
  public:
    AbsorptionSpectrum() = default;

    // Validates: frequencies strictly increasing, length >= 2, k >= 0.
    AbsorptionSpectrum(std::vector<double> frequency_hz, std::vector<double> k_per_m);

    double lookup(double frequency_hz) const; // m^-1

    double min_frequency() const { return frequency_hz_.front(); }
    double max_frequency() const { return frequency_hz_.back(); }
    std::size_t size() const { return frequency_hz_.size(); }

    const std::vector<double>& frequencies() const { return frequency_hz_; }
    const std::vector<double>& coefficients() const { return k_per_m_; }

  private:
    std::vector<double> frequency_hz_;
    std::vector<double> k_per_m_;
};

// CSV with header `frequency_hz,k_per_m`, rows ascending in frequency.
// Malformed rows are rejected with their 1-based row index.
AbsorptionSpectrum load_absorption_table(std::istream& source);
AbsorptionSpectrum load_absorption_table(const std::string& path);

struct Medium {
    double temperature_k = 296.0;
    double pressure_atm = 1.0;
    // Gas fractions are metadata recorded with datasets; they do not enter
    // any computation here (k(f) is taken from the table directly).
    std::map<std::string, double> mixing_ratios;
    AbsorptionSpectrum absorption;
};

struct LinkBudget {
    double tx_psd_w_per_hz = 1.0;
    double frequency_hz = 0.3e12;
    double distance_m = 1.0;
    Medium medium;
};

// e^{k d}, dimensionless >= 1
double absorption_loss(double k_per_m, double distance_m);

// (4 pi f d / c)^2
double spreading_loss(double frequency_hz, double distance_m);

// P_Tx * C * f^-2 * d^-2 * e^{-k(f) d},  C = c^2/(16 pi^2)
double received_psd(const LinkBudget& lb);

// (P_Tx / L_spread) * (1 - e^{-k(f) d})
double molecular_noise_psd(const LinkBudget& lb);

enum class JnModel {
    Exact,      // h f / (e^{h f / (k_B T)} - 1)
    FirstOrder, // k_B T
};

double jn_noise_psd(double frequency_hz, double temperature_k,
                    JnModel model = JnModel::Exact);

// k_B T + molecular noise (first-order JN term, per the link-budget model)
double total_noise_psd(const LinkBudget& lb);

double snr(const LinkBudget& lb);
double snr_db(const LinkBudget& lb);

} // namespace thzce::propagation
