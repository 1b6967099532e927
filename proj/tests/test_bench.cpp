// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "thzce/bench.hpp"
#include "thzce/constants.hpp"
#include "thzce/propagation.hpp"

using namespace thzce;
using namespace thzce::bench;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.m_t = 4;
    cfg.m_r = 4;
    cfg.realizations = 2;
    cfg.pilot_counts = {4, 8};
    cfg.sweep_axis = ExperimentConfig::SweepAxis::Pilots;
    cfg.fixed_snr_db = 5.0;
    cfg.cluster_count = 1;
    cfg.rays_per_cluster = 2;
    cfg.estimator.epochs = 15;
    cfg.record_timing = false;
    cfg.threads = 1;
    cfg.master_seed = 99;
    return cfg;
}

std::string csv_string(const std::vector<metrics::NmseRecord>& records) {
    std::ostringstream out;
    write_csv(records, out);
    return out.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("thzce_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

} // namespace

TEST_CASE("seed derivation is deterministic and collision-free across units") {
    CHECK(channel_seed(1, 0) == channel_seed(1, 0));
    CHECK(channel_seed(1, 0) != channel_seed(1, 1));
    CHECK(channel_seed(1, 0) != channel_seed(2, 0));
    CHECK(noise_seed(1, 0, 0, 0) != noise_seed(1, 0, 0, 1));
    CHECK(noise_seed(1, 0, 0, 0) != noise_seed(1, 0, 1, 0));
    CHECK(noise_seed(1, 0, 0, 0) != noise_seed(1, 1, 0, 0));
    CHECK(noise_seed(1, 3, 2, 1) == noise_seed(1, 3, 2, 1));
}

TEST_CASE("run_experiment: record count and emission order") {
    const auto cfg = tiny_config();
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 2u * 2u * 4u * 2u);
    // nesting: realization, sweep point, algorithm, scheme
    CHECK(records[0].realization == 0);
    CHECK(records[0].n_pilots == 4);
    CHECK(records[0].algorithm == "LR");
    CHECK(records[0].pilot_scheme == "ZC");
    CHECK(records[1].pilot_scheme == "DFT");
    CHECK(records[2].algorithm == "NN");
    CHECK(records[8].n_pilots == 8);
    CHECK(records[16].realization == 1);
    for (const auto& r : records) {
        CHECK_FALSE(r.failed);
        CHECK(std::isfinite(r.nmse_db));
        CHECK(r.wall_time_s == 0.0); // timing disabled
    }
}

TEST_CASE("run_experiment: single algorithm/sweep config emits one record per scheme") {
    auto cfg = tiny_config();
    cfg.realizations = 1;
    cfg.pilot_counts = {4};
    cfg.algorithms = {"PGA"};
    const auto records = run_experiment(cfg);
    CHECK(records.size() == cfg.pilot_schemes.size());
}

TEST_CASE("run_experiment: byte-identical CSV across runs and thread counts") {
    auto cfg = tiny_config();
    const auto a = csv_string(run_experiment(cfg));
    const auto b = csv_string(run_experiment(cfg));
    CHECK(a == b);
    cfg.threads = 4;
    const auto c = csv_string(run_experiment(cfg));
    CHECK(a == c);
}

TEST_CASE("csv: round trip preserves records exactly") {
    const auto records = run_experiment(tiny_config());
    const auto text = csv_string(records);
    std::istringstream in(text);
    const auto parsed = parse_csv(in);
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(parsed[i].algorithm == records[i].algorithm);
        CHECK(parsed[i].pilot_scheme == records[i].pilot_scheme);
        CHECK(parsed[i].snr_db == records[i].snr_db);
        CHECK(parsed[i].n_pilots == records[i].n_pilots);
        CHECK(parsed[i].realization == records[i].realization);
        CHECK(parsed[i].nmse_db == records[i].nmse_db); // bit-exact via to_chars
        CHECK(parsed[i].wall_time_s == records[i].wall_time_s);
    }
    // two lines for one record
    const auto one = csv_string({records[0]});
    CHECK(std::count(one.begin(), one.end(), '\n') == 2);
}

TEST_CASE("csv: empty records are rejected, bad paths surface") {
    CHECK_THROWS_AS(emit_csv({}, "/tmp/never_written.csv"), std::invalid_argument);
    const auto records = run_experiment(tiny_config());
    CHECK_THROWS_AS(emit_csv(records, "/nonexistent_dir_thzce/x.csv"), std::runtime_error);
    std::istringstream bad("wrong,header\n");
    CHECK_THROWS_AS(parse_csv(bad), std::invalid_argument);
}

TEST_CASE("emit_plot writes svg curves") {
    TempDir tmp;
    const auto records = run_experiment(tiny_config());
    const auto path = tmp.file("plot.svg");
    emit_plot(records, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto svg = ss.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("PGA/ZC") != std::string::npos);
    CHECK(svg.find("pilot transmissions") != std::string::npos);
    CHECK_THROWS_AS(emit_plot({}, tmp.file("none.svg")), std::invalid_argument);
}

TEST_CASE("dataset: round trip reproduces the in-memory estimates") {
    TempDir tmp;
    auto cfg = tiny_config();
    cfg.realizations = 1;
    cfg.pilot_counts = {4};
    const auto direct = run_experiment(cfg);

    const auto path = tmp.file("dataset.json");
    gen_dataset(cfg, path);
    const auto ds = load_dataset(path);
    CHECK(ds.entries.size() == 2); // 1 realization x 1 sweep x 2 schemes
    const auto replayed = run_from_dataset(ds);
    REQUIRE(replayed.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(replayed[i].algorithm == direct[i].algorithm);
        CHECK(replayed[i].nmse_db == direct[i].nmse_db); // identical estimates
    }
}

TEST_CASE("dataset: config echo supports a reproducibility audit") {
    TempDir tmp;
    auto cfg = tiny_config();
    cfg.realizations = 1;
    cfg.pilot_counts = {4};
    const auto path = tmp.file("dataset.json");
    gen_dataset(cfg, path);
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("config").at("master_seed").get<std::uint64_t>() == cfg.master_seed);
    CHECK(j.at("config").at("m_t").get<int>() == cfg.m_t);
    CHECK(j.at("entries").size() == 2);
}

TEST_CASE("dataset: tampered observation alphabet is rejected") {
    TempDir tmp;
    auto cfg = tiny_config();
    cfg.realizations = 1;
    cfg.pilot_counts = {4};
    const auto path = tmp.file("dataset.json");
    gen_dataset(cfg, path);
    std::ifstream in(path);
    auto j = nlohmann::json::parse(in);
    in.close();
    j["entries"][0]["observations"]["y"][0][0] = {0.0, 0.0};
    const auto tampered = tmp.file("tampered.json");
    std::ofstream out(tampered);
    out << j.dump();
    out.close();
    CHECK_THROWS_WITH_AS(load_dataset(tampered), doctest::Contains("alphabet"),
                         std::invalid_argument);
}

TEST_CASE("config json round trip and presets") {
    const auto fig4 = ExperimentConfig::preset_fig4();
    CHECK(fig4.sweep_axis == ExperimentConfig::SweepAxis::Pilots);
    CHECK(fig4.pilot_counts == std::vector<int>{16, 32, 64, 128, 240});
    CHECK(fig4.fixed_snr_db == 0.0);
    const auto fig5 = ExperimentConfig::preset_fig5();
    CHECK(fig5.sweep_axis == ExperimentConfig::SweepAxis::Snr);
    CHECK(fig5.fixed_pilots == 240);
    CHECK_THROWS_AS(ExperimentConfig::from_preset("fig6"), std::invalid_argument);

    auto cfg = tiny_config();
    cfg.estimator.rank = 3;
    cfg.estimator.regularization = 0.5;
    const auto j = cfg.to_json();
    const auto back = ExperimentConfig::from_json(j);
    CHECK(back.m_t == cfg.m_t);
    CHECK(back.realizations == cfg.realizations);
    CHECK(back.pilot_counts == cfg.pilot_counts);
    CHECK(back.master_seed == cfg.master_seed);
    CHECK(back.estimator.rank == 3);
    CHECK(back.estimator.regularization == 0.5);
    CHECK(back.record_timing == cfg.record_timing);

    nlohmann::json invalid = {{"m_t", 0}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(invalid), std::invalid_argument);
    nlohmann::json bad_axis = {{"sweep_axis", "sideways"}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_axis), std::invalid_argument);
}

TEST_CASE("physical noise mode uses the link budget") {
    TempDir tmp;
    const auto table = tmp.file("k.csv");
    {
        std::ofstream out(table);
        out << "frequency_hz,k_per_m\n1e11,0.0004\n1e12,0.0004\n";
    }
    auto cfg = tiny_config();
    cfg.realizations = 1;
    cfg.pilot_counts = {4};
    cfg.algorithms = {"NN"};
    cfg.noise_mode = ExperimentConfig::NoiseMode::Physical;
    cfg.absorption_table = table;
    cfg.bandwidth_hz = 1e9;
    cfg.tx_psd_w_per_hz = 1e-12;
    const auto records = run_experiment(cfg);
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        CHECK_FALSE(r.failed);
        // snr now reports the measured link-budget value, not a target
        CHECK(std::isfinite(r.snr_db));
        CHECK(r.snr_db != cfg.fixed_snr_db);
    }
}

TEST_CASE("failed units are reported and the run continues") {
    auto cfg = tiny_config();
    cfg.algorithms = {"PGA"};
    cfg.estimator.rank = 400; // invalid for a 4x4 system: every unit fails
    const auto records = run_experiment(cfg);
    REQUIRE(!records.empty());
    for (const auto& r : records) {
        CHECK(r.failed);
        CHECK(!r.error.empty());
        CHECK(std::isnan(r.nmse_db));
    }
}
