// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace thzce::metrics {

double beta_scale(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& H_hat) {
    if (H.rows() != H_hat.rows() || H.cols() != H_hat.cols())
        throw std::invalid_argument("beta_scale: shape mismatch");
    const double denom = (H_hat.adjoint() * H_hat).cwiseAbs().sum();
    if (!(denom > 0.0)) throw std::invalid_argument("beta_scale: estimate degenerate (zero)");
    return (H_hat.adjoint() * H).cwiseAbs().sum() / denom;
}

double nmse_db(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& H_hat) {
    const double ref = H.squaredNorm();
    if (!(ref > 0.0)) throw std::invalid_argument("nmse_db: reference channel is zero");
    const double beta = beta_scale(H, H_hat);
    const double err = (H - beta * H_hat).squaredNorm() / ref;
    if (!(err > 0.0)) return nmse_floor_db;
    return std::max(10.0 * std::log10(err), nmse_floor_db);
}

std::map<ConfigKey, Aggregate> aggregate(const std::vector<NmseRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    struct Accum {
        double linear_sum = 0.0;
        double db_sum = 0.0;
        double db_sq_sum = 0.0;
        double min_db = 0.0;
        double max_db = 0.0;
        int count = 0;
    };
    std::map<ConfigKey, Accum> acc;
    for (const auto& r : records) {
        if (r.failed) continue;
        auto& a = acc[{r.algorithm, r.pilot_scheme, r.snr_db, r.n_pilots}];
        const double lin = std::pow(10.0, r.nmse_db / 10.0);
        if (a.count == 0) {
            a.min_db = r.nmse_db;
            a.max_db = r.nmse_db;
        } else {
            a.min_db = std::min(a.min_db, r.nmse_db);
            a.max_db = std::max(a.max_db, r.nmse_db);
        }
        a.linear_sum += lin;
        a.db_sum += r.nmse_db;
        a.db_sq_sum += r.nmse_db * r.nmse_db;
        ++a.count;
    }
    if (acc.empty()) throw std::invalid_argument("aggregate: all records failed");
    std::map<ConfigKey, Aggregate> out;
    for (const auto& [key, a] : acc) {
        Aggregate g;
        g.count = a.count;
        g.mean_db = 10.0 * std::log10(a.linear_sum / a.count);
        g.min_db = a.min_db;
        g.max_db = a.max_db;
        const double mean_db = a.db_sum / a.count;
        g.stddev_db = std::sqrt(std::max(0.0, a.db_sq_sum / a.count - mean_db * mean_db));
        out.emplace(key, g);
    }
    return out;
}

} // namespace thzce::metrics
