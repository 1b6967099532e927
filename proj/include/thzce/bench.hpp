// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "thzce/channel.hpp"
#include "thzce/estimators.hpp"
#include "thzce/frontend.hpp"
#include "thzce/metrics.hpp"

namespace thzce::bench {

struct ExperimentConfig {
    // system
    int m_t = 16;
    int m_r = 16;
    double frequency_hz = 0.3e12;
    double distance_m = 1.0;
    double temperature_k = 296.0;
    std::string absorption_table; // empty: lossless medium (k = 0)

    // channel
    int cluster_count = 3;
    int rays_per_cluster = 2;
    double reflector_index = 2.24;
    double element_spacing = 0.5;
    bool planar_arrays = false; // 4x4-style planar instead of uniform linear
    double tx_antenna_gain = 1.0;
    double rx_antenna_gain = 1.0;

    // experiment protocol
    int realizations = 10;
    std::uint64_t master_seed = 1;
    std::vector<std::string> algorithms{"LR", "NN", "PGA", "FW"};
    std::vector<std::string> pilot_schemes{"ZC", "DFT"};
    int zc_root = 1;

    enum class SweepAxis { Pilots, Snr };
    SweepAxis sweep_axis = SweepAxis::Pilots;
    std::vector<int> pilot_counts{16, 32, 64, 128, 240};
    std::vector<double> snr_points_db{-10.0, -5.0, 0.0, 5.0, 10.0};
    int fixed_pilots = 240;   // used when sweeping SNR
    double fixed_snr_db = 0.0; // used when sweeping pilots

    // noise calibration: per-sample target SNR by default, or the physical
    // link budget (total noise psd times bandwidth) for end-to-end demos
    enum class NoiseMode { TargetSnr, Physical };
    NoiseMode noise_mode = NoiseMode::TargetSnr;
    double bandwidth_hz = 1e9;
    double tx_psd_w_per_hz = 1e-12;

    // estimator overrides (0 keeps the per-algorithm defaults)
    estimators::EstimatorConfig estimator;

    // execution
    std::string output_dir = ".";
    int threads = 0;          // 0: hardware concurrency
    bool record_timing = true; // false writes 0 wall time (deterministic output)
    std::string preset;        // config echo only

    static ExperimentConfig preset_fig4(); // pilot sweep at SNR 0 dB
    static ExperimentConfig preset_fig5(); // SNR sweep at Np = 240
    static ExperimentConfig from_preset(const std::string& name);

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

// Seed tags for the documented derivation scheme
// derive_seed(master, stream, index):
//   stream 1, index = realization            -> channel draw
//   stream 2, index = encode(realization, sweep, scheme) -> noise draw
inline constexpr std::uint64_t seed_stream_channel = 1;
inline constexpr std::uint64_t seed_stream_noise = 2;

std::uint64_t channel_seed(std::uint64_t master, int realization);
std::uint64_t noise_seed(std::uint64_t master, int realization, int sweep_index,
                         int scheme_index);

// One record per realization x sweep point x algorithm x scheme, emitted in
// that nesting order regardless of the thread count. Stage failures mark
// the record failed and the run continues.
std::vector<metrics::NmseRecord> run_experiment(const ExperimentConfig& cfg);

// CSV with header algorithm,pilot_scheme,snr_db,n_pilots,realization,nmse_db,wall_time_s
void emit_csv(const std::vector<metrics::NmseRecord>& records, const std::string& path);
void write_csv(const std::vector<metrics::NmseRecord>& records, std::ostream& out);
std::vector<metrics::NmseRecord> parse_csv(std::istream& in);
std::vector<metrics::NmseRecord> parse_csv_file(const std::string& path);

// SVG with one mean-NMSE curve per algorithm x scheme over the sweep axis.
void emit_plot(const std::vector<metrics::NmseRecord>& records, const std::string& path);

// Self-contained dataset: config echo plus, per realization x sweep point x
// scheme, the channel (H and its rays), the pilot matrix and the quantized
// observations, with every seed recorded.
void gen_dataset(const ExperimentConfig& cfg, const std::string& path);

struct DatasetEntry {
    int realization = 0;
    int sweep_index = 0;
    double snr_db = 0.0;
    channel::ChannelRealization channel;
    frontend::PilotMatrix pilots;
    frontend::ObservationBlock observations;
};

struct Dataset {
    ExperimentConfig config;
    std::vector<DatasetEntry> entries;
};

Dataset load_dataset(const std::string& path);

// Runs the configured estimators over a stored dataset; equivalent to the
// in-memory path of run_experiment for the same config.
std::vector<metrics::NmseRecord> run_from_dataset(const Dataset& ds);

} // namespace thzce::bench
