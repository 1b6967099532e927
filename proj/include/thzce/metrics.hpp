// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace thzce::metrics {

// Floor applied to exact recoveries so records stay finite.
inline constexpr double nmse_floor_db = -300.0;

// beta = ||H_hat^* H||_1 / ||H_hat^* H_hat||_1 with ||.||_1 the entrywise
// absolute sum of the product. Throws if the estimate is degenerate (zero).
double beta_scale(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& H_hat);

// 10 log10( ||H - beta H_hat||_F^2 / ||H||_F^2 ), floored at -300 dB.
double nmse_db(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& H_hat);

struct NmseRecord {
    std::string algorithm;
    std::string pilot_scheme;
    double snr_db = 0.0;
    int n_pilots = 0;
    int realization = 0;
    std::uint64_t realization_seed = 0;
    double nmse_db = 0.0;
    double wall_time_s = 0.0;
    bool failed = false;
    std::string error;
};

struct Aggregate {
    double mean_db = 0.0; // dB of the mean linear NMSE
    double min_db = 0.0;
    double max_db = 0.0;
    double stddev_db = 0.0; // spread of the per-realization dB values
    int count = 0;
};

// (algorithm, pilot scheme, snr_db, n_pilots)
using ConfigKey = std::tuple<std::string, std::string, double, int>;

// Mean taken in the linear domain then converted to dB; failed records are
// excluded. Throws if the input is empty.
std::map<ConfigKey, Aggregate> aggregate(const std::vector<NmseRecord>& records);

} // namespace thzce::metrics
