// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "thzce/bench.hpp"

namespace {

using thzce::bench::ExperimentConfig;

struct Overrides {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<int> realizations;
    std::optional<int> threads;
    std::optional<std::string> output_dir;
    std::optional<std::string> absorption_table;
    std::optional<std::vector<std::string>> algorithms;
    std::optional<std::vector<std::string>> schemes;
    std::optional<std::vector<int>> pilot_counts;
    std::optional<std::vector<double>> snr_points;
    std::optional<int> fixed_pilots;
    std::optional<double> fixed_snr;
    std::optional<int> m_t, m_r;
    std::optional<double> frequency_hz, distance_m;
    std::optional<int> epochs, rank;
    std::optional<double> budget, lambda;
    std::optional<bool> record_timing;
    std::string csv_name;
    std::string plot_name;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "master seed");
    cmd->add_option("--realizations", ov.realizations, "channel realizations per point");
    cmd->add_option("--threads", ov.threads, "worker threads (0 = hardware)");
    cmd->add_option("--output-dir", ov.output_dir, "output directory");
    cmd->add_option("--absorption-table", ov.absorption_table,
                    "absorption CSV (frequency_hz,k_per_m)");
    cmd->add_option("--algorithms", ov.algorithms, "algorithm subset (LR NN PGA FW)");
    cmd->add_option("--schemes", ov.schemes, "pilot schemes (ZC DFT)");
    cmd->add_option("--pilot-counts", ov.pilot_counts, "pilot sweep grid");
    cmd->add_option("--snr-points", ov.snr_points, "SNR sweep grid (dB)");
    cmd->add_option("--fixed-pilots", ov.fixed_pilots, "pilot count for SNR sweeps");
    cmd->add_option("--fixed-snr", ov.fixed_snr, "SNR (dB) for pilot sweeps");
    cmd->add_option("--mt", ov.m_t, "transmit antennas");
    cmd->add_option("--mr", ov.m_r, "receive antennas");
    cmd->add_option("--frequency", ov.frequency_hz, "carrier frequency (Hz)");
    cmd->add_option("--distance", ov.distance_m, "link distance (m)");
    cmd->add_option("--epochs", ov.epochs, "training epochs");
    cmd->add_option("--rank", ov.rank, "projection rank (0 = simulated ray count)");
    cmd->add_option("--budget", ov.budget, "nuclear-norm budget (0 = data-driven)");
    cmd->add_option("--lambda", ov.lambda, "L2 regularization weight");
    cmd->add_flag("--record-timing,!--no-record-timing", ov.record_timing,
                  "capture wall time per training run");
    cmd->add_option("--csv", ov.csv_name, "records CSV filename");
    cmd->add_option("--plot", ov.plot_name, "plot SVG filename");
}

ExperimentConfig build_config(const Overrides& ov, const std::string& default_preset) {
    ExperimentConfig cfg;
    if (!ov.config_path.empty()) {
        std::ifstream in(ov.config_path);
        if (!in) throw std::runtime_error("cannot open config '" + ov.config_path + "'");
        cfg = ExperimentConfig::from_json(nlohmann::json::parse(in));
    } else if (!ov.preset.empty()) {
        cfg = ExperimentConfig::from_preset(ov.preset);
    } else if (!default_preset.empty()) {
        cfg = ExperimentConfig::from_preset(default_preset);
    }
    if (ov.seed) cfg.master_seed = *ov.seed;
    if (ov.realizations) cfg.realizations = *ov.realizations;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.absorption_table) cfg.absorption_table = *ov.absorption_table;
    if (ov.algorithms) cfg.algorithms = *ov.algorithms;
    if (ov.schemes) cfg.pilot_schemes = *ov.schemes;
    if (ov.pilot_counts) cfg.pilot_counts = *ov.pilot_counts;
    if (ov.snr_points) cfg.snr_points_db = *ov.snr_points;
    if (ov.fixed_pilots) cfg.fixed_pilots = *ov.fixed_pilots;
    if (ov.fixed_snr) cfg.fixed_snr_db = *ov.fixed_snr;
    if (ov.m_t) cfg.m_t = *ov.m_t;
    if (ov.m_r) cfg.m_r = *ov.m_r;
    if (ov.frequency_hz) cfg.frequency_hz = *ov.frequency_hz;
    if (ov.distance_m) cfg.distance_m = *ov.distance_m;
    if (ov.epochs) cfg.estimator.epochs = *ov.epochs;
    if (ov.rank) cfg.estimator.rank = *ov.rank;
    if (ov.budget) cfg.estimator.budget = *ov.budget;
    if (ov.lambda) cfg.estimator.regularization = *ov.lambda;
    if (ov.record_timing) cfg.record_timing = *ov.record_timing;
    if (const char* env = std::getenv("THZCE_OUTPUT_DIR"); env && *env)
        cfg.output_dir = env;
    cfg.validate();
    return cfg;
}

void print_summary(const std::vector<thzce::metrics::NmseRecord>& records) {
    const auto aggregates = thzce::metrics::aggregate(records);
    std::printf("%-5s %-6s %9s %9s %10s %8s %6s\n", "alg", "scheme", "snr(dB)", "pilots",
                "nmse(dB)", "std(dB)", "n");
    for (const auto& [key, agg] : aggregates) {
        const auto& [alg, scheme, snr, np] = key;
        std::printf("%-5s %-6s %9.2f %9d %10.2f %8.2f %6d\n", alg.c_str(), scheme.c_str(), snr,
                    np, agg.mean_db, agg.stddev_db, agg.count);
    }
}

int run_and_emit(const ExperimentConfig& cfg, const std::string& csv_name,
                 const std::string& plot_name) {
    const auto records = thzce::bench::run_experiment(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto base = cfg.preset.empty() ? std::string("results") : cfg.preset;
    const auto csv_path =
        (std::filesystem::path(cfg.output_dir) / (csv_name.empty() ? base + ".csv" : csv_name))
            .string();
    const auto svg_path =
        (std::filesystem::path(cfg.output_dir) / (plot_name.empty() ? base + ".svg" : plot_name))
            .string();
    thzce::bench::emit_csv(records, csv_path);
    thzce::bench::emit_plot(records, svg_path);
    print_summary(records);
    std::size_t failed = 0;
    for (const auto& r : records)
        if (r.failed) ++failed;
    if (failed > 0) {
        std::fprintf(stderr, "%zu record(s) failed:\n", failed);
        for (const auto& r : records)
            if (r.failed)
                std::fprintf(stderr, "  %s/%s np=%d snr=%.1f realization=%d: %s\n",
                             r.algorithm.c_str(), r.pilot_scheme.c_str(), r.n_pilots, r.snr_db,
                             r.realization, r.error.c_str());
    }
    std::printf("wrote %s and %s\n", csv_path.c_str(), svg_path.c_str());
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"THz MIMO one-bit channel estimation benchmark"};
    app.require_subcommand(1);

    Overrides ov_run, ov_pilots, ov_snr, ov_dataset;

    auto* cmd_run = app.add_subcommand("run", "run an experiment from a JSON config");
    cmd_run->add_option("--config", ov_run.config_path, "JSON config path");
    cmd_run->add_option("--preset", ov_run.preset, "preset name (fig4, fig5)");
    add_override_flags(cmd_run, ov_run);

    auto* cmd_pilots =
        app.add_subcommand("sweep-pilots", "NMSE vs pilot count (preset fig4)");
    cmd_pilots->add_option("--preset", ov_pilots.preset, "preset name");
    cmd_pilots->add_option("--config", ov_pilots.config_path, "JSON config path");
    add_override_flags(cmd_pilots, ov_pilots);

    auto* cmd_snr = app.add_subcommand("sweep-snr", "NMSE vs SNR (preset fig5)");
    cmd_snr->add_option("--preset", ov_snr.preset, "preset name");
    cmd_snr->add_option("--config", ov_snr.config_path, "JSON config path");
    add_override_flags(cmd_snr, ov_snr);

    auto* cmd_dataset = app.add_subcommand("gen-dataset", "persist channels/pilots/observations");
    std::string dataset_out = "dataset.json";
    cmd_dataset->add_option("--config", ov_dataset.config_path, "JSON config path");
    cmd_dataset->add_option("--preset", ov_dataset.preset, "preset name");
    cmd_dataset->add_option("--out", dataset_out, "dataset output path");
    add_override_flags(cmd_dataset, ov_dataset);

    auto* cmd_plot = app.add_subcommand("plot", "render a records CSV as SVG curves");
    std::string plot_in, plot_out = "plot.svg";
    cmd_plot->add_option("--in", plot_in, "records CSV")->required();
    cmd_plot->add_option("--out", plot_out, "SVG output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed())
            return run_and_emit(build_config(ov_run, ""), ov_run.csv_name, ov_run.plot_name);
        if (cmd_pilots->parsed())
            return run_and_emit(build_config(ov_pilots, "fig4"), ov_pilots.csv_name,
                                ov_pilots.plot_name);
        if (cmd_snr->parsed())
            return run_and_emit(build_config(ov_snr, "fig5"), ov_snr.csv_name, ov_snr.plot_name);
        if (cmd_dataset->parsed()) {
            thzce::bench::gen_dataset(build_config(ov_dataset, ""), dataset_out);
            std::printf("wrote %s\n", dataset_out.c_str());
            return 0;
        }
        if (cmd_plot->parsed()) {
            const auto records = thzce::bench::parse_csv_file(plot_in);
            thzce::bench::emit_plot(records, plot_out);
            std::printf("wrote %s\n", plot_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
