// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/bench.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "thzce/constants.hpp"
#include "thzce/propagation.hpp"

namespace thzce::bench {

using json = nlohmann::json;
using metrics::NmseRecord;

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

frontend::PilotScheme scheme_from_name(const std::string& name) {
    if (name == "ZC") return frontend::PilotScheme::Zc;
    if (name == "DFT") return frontend::PilotScheme::Dft;
    throw std::invalid_argument("unknown pilot scheme '" + name + "' (expected ZC or DFT)");
}

std::string scheme_name(frontend::PilotScheme s) {
    return s == frontend::PilotScheme::Zc ? "ZC" : "DFT";
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd complex_matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("dataset: expected a non-empty matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("dataset: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& e = row.at(static_cast<std::size_t>(c));
            m(r, c) = {e.at(0).get<double>(), e.at(1).get<double>()};
        }
    }
    return m;
}

struct SweepPoint {
    int n_pilots;
    double snr_db; // target (TargetSnr mode) or placeholder until measured
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> pts;
    if (cfg.sweep_axis == ExperimentConfig::SweepAxis::Pilots) {
        for (int np : cfg.pilot_counts) pts.push_back({np, cfg.fixed_snr_db});
    } else {
        for (double s : cfg.snr_points_db) pts.push_back({cfg.fixed_pilots, s});
    }
    return pts;
}

channel::ChannelConfig make_channel_config(const ExperimentConfig& cfg, double k_per_m) {
    channel::ChannelConfig cc;
    if (cfg.planar_arrays) {
        const int tr = static_cast<int>(std::round(std::sqrt(static_cast<double>(cfg.m_t))));
        const int rr = static_cast<int>(std::round(std::sqrt(static_cast<double>(cfg.m_r))));
        if (tr * tr != cfg.m_t || rr * rr != cfg.m_r)
            throw std::invalid_argument("planar arrays require square element counts");
        cc.tx = channel::ArrayGeometry::planar(tr, tr, cfg.element_spacing);
        cc.rx = channel::ArrayGeometry::planar(rr, rr, cfg.element_spacing);
    } else {
        cc.tx = channel::ArrayGeometry::linear(cfg.m_t, cfg.element_spacing);
        cc.rx = channel::ArrayGeometry::linear(cfg.m_r, cfg.element_spacing);
    }
    cc.frequency_hz = cfg.frequency_hz;
    cc.distance_m = cfg.distance_m;
    cc.absorption_k_per_m = k_per_m;
    cc.cluster_count = cfg.cluster_count;
    cc.rays_per_cluster = cfg.rays_per_cluster;
    cc.tx_antenna_gain = cfg.tx_antenna_gain;
    cc.rx_antenna_gain = cfg.rx_antenna_gain;
    cc.reflector_index = {cfg.reflector_index, 0.0};
    return cc;
}

// absorption coefficient at the carrier; empty table means a lossless medium
double resolve_absorption_k(const ExperimentConfig& cfg,
                            propagation::AbsorptionSpectrum* spectrum_out = nullptr) {
    if (cfg.absorption_table.empty()) return 0.0;
    auto spectrum = propagation::load_absorption_table(cfg.absorption_table);
    const double k = spectrum.lookup(cfg.frequency_hz);
    if (spectrum_out) *spectrum_out = std::move(spectrum);
    return k;
}

estimators::EstimatorConfig resolve_estimator_config(const ExperimentConfig& cfg,
                                                     estimators::Algorithm algo) {
    estimators::EstimatorConfig ec = cfg.estimator;
    ec.algorithm = algo;
    if (ec.rank == 0)
        ec.rank = std::min(1 + cfg.cluster_count * cfg.rays_per_cluster,
                           std::min(cfg.m_r, cfg.m_t));
    return ec;
}

double calibrate_noise_power(const ExperimentConfig& cfg, const Eigen::MatrixXcd& h,
                             const frontend::PilotMatrix& pilots, double target_snr_db,
                             const propagation::AbsorptionSpectrum& spectrum) {
    if (cfg.noise_mode == ExperimentConfig::NoiseMode::TargetSnr)
        return frontend::noise_power_for_snr(h, pilots, target_snr_db);
    propagation::LinkBudget lb;
    lb.tx_psd_w_per_hz = cfg.tx_psd_w_per_hz;
    lb.frequency_hz = cfg.frequency_hz;
    lb.distance_m = cfg.distance_m;
    lb.medium.temperature_k = cfg.temperature_k;
    lb.medium.absorption = spectrum;
    return propagation::total_noise_psd(lb) * cfg.bandwidth_hz;
}

} // namespace

std::uint64_t channel_seed(std::uint64_t master, int realization) {
    return derive_seed(master, seed_stream_channel, static_cast<std::uint64_t>(realization));
}

std::uint64_t noise_seed(std::uint64_t master, int realization, int sweep_index,
                         int scheme_index) {
    const std::uint64_t index = (static_cast<std::uint64_t>(realization) << 32) |
                                (static_cast<std::uint64_t>(sweep_index) << 8) |
                                static_cast<std::uint64_t>(scheme_index);
    return derive_seed(master, seed_stream_noise, index);
}

ExperimentConfig ExperimentConfig::preset_fig4() {
    ExperimentConfig cfg;
    cfg.sweep_axis = SweepAxis::Pilots;
    cfg.pilot_counts = {16, 32, 64, 128, 240};
    cfg.fixed_snr_db = 0.0;
    cfg.preset = "fig4";
    return cfg;
}

ExperimentConfig ExperimentConfig::preset_fig5() {
    ExperimentConfig cfg;
    cfg.sweep_axis = SweepAxis::Snr;
    cfg.snr_points_db = {-10.0, -5.0, 0.0, 5.0, 10.0};
    cfg.fixed_pilots = 240;
    cfg.preset = "fig5";
    return cfg;
}

ExperimentConfig ExperimentConfig::from_preset(const std::string& name) {
    if (name == "fig4") return preset_fig4();
    if (name == "fig5") return preset_fig5();
    throw std::invalid_argument("unknown preset '" + name + "' (expected fig4 or fig5)");
}

void ExperimentConfig::validate() const {
    if (m_t < 1 || m_r < 1) throw std::invalid_argument("config: antenna counts must be >= 1");
    if (!(frequency_hz > 0.0)) throw std::invalid_argument("config: frequency must be > 0");
    if (!(distance_m > 0.0)) throw std::invalid_argument("config: distance must be > 0");
    if (!(temperature_k > 0.0)) throw std::invalid_argument("config: temperature must be > 0");
    if (realizations < 1) throw std::invalid_argument("config: realizations must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("config: algorithm list is empty");
    if (pilot_schemes.empty()) throw std::invalid_argument("config: pilot scheme list is empty");
    for (const auto& a : algorithms) estimators::algorithm_from_name(a);
    for (const auto& s : pilot_schemes) scheme_from_name(s);
    if (sweep_axis == SweepAxis::Pilots && pilot_counts.empty())
        throw std::invalid_argument("config: pilot sweep list is empty");
    if (sweep_axis == SweepAxis::Snr && snr_points_db.empty())
        throw std::invalid_argument("config: snr sweep list is empty");
    for (int np : pilot_counts)
        if (np < m_t) throw std::invalid_argument("config: pilot count below Mt");
    if (sweep_axis == SweepAxis::Snr && fixed_pilots < m_t)
        throw std::invalid_argument("config: fixed pilot count below Mt");
    if (cluster_count < 0 || rays_per_cluster < 1)
        throw std::invalid_argument("config: invalid cluster geometry");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = from_preset(j.at("preset").get<std::string>());

    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("m_t", cfg.m_t);
    get("m_r", cfg.m_r);
    get("frequency_hz", cfg.frequency_hz);
    get("distance_m", cfg.distance_m);
    get("temperature_k", cfg.temperature_k);
    get("absorption_table", cfg.absorption_table);
    get("cluster_count", cfg.cluster_count);
    get("rays_per_cluster", cfg.rays_per_cluster);
    get("reflector_index", cfg.reflector_index);
    get("element_spacing", cfg.element_spacing);
    get("planar_arrays", cfg.planar_arrays);
    get("tx_antenna_gain", cfg.tx_antenna_gain);
    get("rx_antenna_gain", cfg.rx_antenna_gain);
    get("realizations", cfg.realizations);
    get("master_seed", cfg.master_seed);
    get("algorithms", cfg.algorithms);
    get("pilot_schemes", cfg.pilot_schemes);
    get("zc_root", cfg.zc_root);
    if (j.contains("sweep_axis")) {
        const auto axis = j.at("sweep_axis").get<std::string>();
        if (axis == "pilots") cfg.sweep_axis = SweepAxis::Pilots;
        else if (axis == "snr") cfg.sweep_axis = SweepAxis::Snr;
        else throw std::invalid_argument("config: sweep_axis must be 'pilots' or 'snr'");
    }
    get("pilot_counts", cfg.pilot_counts);
    get("snr_points_db", cfg.snr_points_db);
    get("fixed_pilots", cfg.fixed_pilots);
    get("fixed_snr_db", cfg.fixed_snr_db);
    if (j.contains("noise_mode")) {
        const auto mode = j.at("noise_mode").get<std::string>();
        if (mode == "target-snr") cfg.noise_mode = NoiseMode::TargetSnr;
        else if (mode == "physical") cfg.noise_mode = NoiseMode::Physical;
        else throw std::invalid_argument("config: noise_mode must be 'target-snr' or 'physical'");
    }
    get("bandwidth_hz", cfg.bandwidth_hz);
    get("tx_psd_w_per_hz", cfg.tx_psd_w_per_hz);
    get("output_dir", cfg.output_dir);
    get("threads", cfg.threads);
    get("record_timing", cfg.record_timing);
    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        auto gete = [&](const char* key, auto& field) {
            if (e.contains(key)) field = e.at(key).get<std::decay_t<decltype(field)>>();
        };
        gete("epochs", cfg.estimator.epochs);
        gete("learning_rate", cfg.estimator.learning_rate);
        gete("decay", cfg.estimator.decay);
        gete("stop_tolerance", cfg.estimator.stop_tolerance);
        gete("regularization", cfg.estimator.regularization);
        gete("rank", cfg.estimator.rank);
        gete("budget", cfg.estimator.budget);
        gete("noise_std", cfg.estimator.noise_std);
    }
    cfg.validate();
    return cfg;
}

json ExperimentConfig::to_json() const {
    json j;
    if (!preset.empty()) j["preset"] = preset;
    j["m_t"] = m_t;
    j["m_r"] = m_r;
    j["frequency_hz"] = frequency_hz;
    j["distance_m"] = distance_m;
    j["temperature_k"] = temperature_k;
    j["absorption_table"] = absorption_table;
    j["cluster_count"] = cluster_count;
    j["rays_per_cluster"] = rays_per_cluster;
    j["reflector_index"] = reflector_index;
    j["element_spacing"] = element_spacing;
    j["planar_arrays"] = planar_arrays;
    j["tx_antenna_gain"] = tx_antenna_gain;
    j["rx_antenna_gain"] = rx_antenna_gain;
    j["realizations"] = realizations;
    j["master_seed"] = master_seed;
    j["algorithms"] = algorithms;
    j["pilot_schemes"] = pilot_schemes;
    j["zc_root"] = zc_root;
    j["sweep_axis"] = sweep_axis == SweepAxis::Pilots ? "pilots" : "snr";
    j["pilot_counts"] = pilot_counts;
    j["snr_points_db"] = snr_points_db;
    j["fixed_pilots"] = fixed_pilots;
    j["fixed_snr_db"] = fixed_snr_db;
    j["noise_mode"] = noise_mode == NoiseMode::TargetSnr ? "target-snr" : "physical";
    j["bandwidth_hz"] = bandwidth_hz;
    j["tx_psd_w_per_hz"] = tx_psd_w_per_hz;
    j["estimator"] = {{"epochs", estimator.epochs},
                      {"learning_rate", estimator.learning_rate},
                      {"decay", estimator.decay},
                      {"stop_tolerance", estimator.stop_tolerance},
                      {"regularization", estimator.regularization},
                      {"rank", estimator.rank},
                      {"budget", estimator.budget},
                      {"noise_std", estimator.noise_std}};
    j["output_dir"] = output_dir;
    j["threads"] = threads;
    j["record_timing"] = record_timing;
    return j;
}

std::vector<NmseRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    propagation::AbsorptionSpectrum spectrum;
    const double k = resolve_absorption_k(cfg, &spectrum);
    const channel::ChannelConfig chan_cfg = make_channel_config(cfg, k);
    const auto points = sweep_points(cfg);

    const int n_real = cfg.realizations;
    const int n_sweep = static_cast<int>(points.size());
    const int n_alg = static_cast<int>(cfg.algorithms.size());
    const int n_scheme = static_cast<int>(cfg.pilot_schemes.size());

    std::vector<NmseRecord> records(
        static_cast<std::size_t>(n_real) * n_sweep * n_alg * n_scheme);
    auto slot = [&](int real, int sweep, int alg, int scheme) -> NmseRecord& {
        return records[static_cast<std::size_t>(
            ((real * n_sweep + sweep) * n_alg + alg) * n_scheme + scheme)];
    };

    // one work unit per (realization, sweep point); deterministic seeds per
    // unit, results merged by slot index
    const int total_units = n_real * n_sweep;
    std::atomic<int> next_unit{0};

    auto process_unit = [&](int unit) {
        const int real = unit / n_sweep;
        const int sweep = unit % n_sweep;
        const auto& point = points[static_cast<std::size_t>(sweep)];
        const std::uint64_t chan_seed = channel_seed(cfg.master_seed, real);

        for (int si = 0; si < n_scheme; ++si) {
            // fill in the record skeletons first so failures stay labelled
            for (int ai = 0; ai < n_alg; ++ai) {
                auto& rec = slot(real, sweep, ai, si);
                rec.algorithm = cfg.algorithms[static_cast<std::size_t>(ai)];
                rec.pilot_scheme = cfg.pilot_schemes[static_cast<std::size_t>(si)];
                rec.snr_db = point.snr_db;
                rec.n_pilots = point.n_pilots;
                rec.realization = real;
                rec.realization_seed = chan_seed;
                rec.nmse_db = std::nan("");
            }
            try {
                const auto realization = channel::make_channel(chan_seed, chan_cfg);
                const auto pilots = frontend::make_pilots(
                    scheme_from_name(cfg.pilot_schemes[static_cast<std::size_t>(si)]),
                    cfg.m_t, point.n_pilots, cfg.zc_root);
                const double n0 =
                    calibrate_noise_power(cfg, realization.H, pilots, point.snr_db, spectrum);
                const auto obs = frontend::observe(
                    realization.H, pilots, n0,
                    noise_seed(cfg.master_seed, real, sweep, si));
                double measured_snr = point.snr_db;
                if (cfg.noise_mode == ExperimentConfig::NoiseMode::Physical) {
                    const Eigen::MatrixXcd s = realization.H * pilots.X;
                    measured_snr = constants::db_from_linear(
                        s.squaredNorm() / (static_cast<double>(s.size()) * n0));
                }
                for (int ai = 0; ai < n_alg; ++ai) {
                    auto& rec = slot(real, sweep, ai, si);
                    rec.snr_db = measured_snr;
                    try {
                        const auto algo = estimators::algorithm_from_name(
                            cfg.algorithms[static_cast<std::size_t>(ai)]);
                        const auto est_cfg = resolve_estimator_config(cfg, algo);
                        const auto t0 = std::chrono::steady_clock::now();
                        const auto est = estimators::estimate(obs, pilots, est_cfg);
                        const auto t1 = std::chrono::steady_clock::now();
                        rec.nmse_db = metrics::nmse_db(realization.H, est.H_hat);
                        rec.wall_time_s =
                            cfg.record_timing
                                ? std::chrono::duration<double>(t1 - t0).count()
                                : 0.0;
                    } catch (const std::exception& e) {
                        rec.failed = true;
                        rec.error = e.what();
                    }
                }
            } catch (const std::exception& e) {
                for (int ai = 0; ai < n_alg; ++ai) {
                    auto& rec = slot(real, sweep, ai, si);
                    rec.failed = true;
                    rec.error = e.what();
                }
            }
        }
    };

    int n_threads = cfg.threads > 0 ? cfg.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, total_units);

    if (n_threads == 1) {
        for (int u = 0; u < total_units; ++u) process_unit(u);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (int u = next_unit.fetch_add(1); u < total_units;
                     u = next_unit.fetch_add(1))
                    process_unit(u);
            });
        }
        for (auto& t : pool) t.join();
    }
    return records;
}

void write_csv(const std::vector<NmseRecord>& records, std::ostream& out) {
    if (records.empty()) throw std::invalid_argument("emit_csv: no records");
    out << "algorithm,pilot_scheme,snr_db,n_pilots,realization,nmse_db,wall_time_s\n";
    for (const auto& r : records) {
        out << r.algorithm << ',' << r.pilot_scheme << ',' << format_double(r.snr_db) << ','
            << r.n_pilots << ',' << r.realization << ',' << format_double(r.nmse_db) << ','
            << format_double(r.wall_time_s) << '\n';
    }
}

void emit_csv(const std::vector<NmseRecord>& records, const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_csv: no records");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
    write_csv(records, out);
    if (!out.good()) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

std::vector<NmseRecord> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("parse_csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "algorithm,pilot_scheme,snr_db,n_pilots,realization,nmse_db,wall_time_s")
        throw std::invalid_argument("parse_csv: unexpected header '" + line + "'");
    std::vector<NmseRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw std::invalid_argument("parse_csv: malformed row " + std::to_string(row));
        NmseRecord r;
        r.algorithm = fields[0];
        r.pilot_scheme = fields[1];
        r.snr_db = std::stod(fields[2]);
        r.n_pilots = std::stoi(fields[3]);
        r.realization = std::stoi(fields[4]);
        r.nmse_db = std::stod(fields[5]);
        r.wall_time_s = std::stod(fields[6]);
        r.failed = std::isnan(r.nmse_db);
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<NmseRecord> parse_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_csv: cannot open '" + path + "'");
    return parse_csv(in);
}

namespace {

struct Curve {
    std::string label;
    std::vector<std::pair<double, double>> points; // x, mean nmse dB
};

// Infer the sweep axis from the records: the dimension that actually varies.
bool pilots_axis(const std::vector<NmseRecord>& records) {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].n_pilots != records[0].n_pilots) return true;
    return false;
}

std::string color_for(const std::string& algorithm) {
    if (algorithm == "LR") return "#d62728";
    if (algorithm == "NN") return "#2ca02c";
    if (algorithm == "PGA") return "#1f77b4";
    if (algorithm == "FW") return "#9467bd";
    return "#7f7f7f";
}

} // namespace

void emit_plot(const std::vector<NmseRecord>& records, const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_plot: no records");
    const bool x_is_pilots = pilots_axis(records);
    const auto aggregates = metrics::aggregate(records);

    std::map<std::pair<std::string, std::string>, Curve> curves;
    for (const auto& [key, agg] : aggregates) {
        const auto& [alg, scheme, snr, np] = key;
        auto& c = curves[{alg, scheme}];
        c.label = alg + "/" + scheme;
        c.points.emplace_back(x_is_pilots ? static_cast<double>(np) : snr, agg.mean_db);
    }
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (auto& [key, c] : curves) {
        std::sort(c.points.begin(), c.points.end());
        for (const auto& [x, y] : c.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double pad_y = 0.05 * (y_max - y_min);
    y_min -= pad_y;
    y_max += pad_y;

    const double w = 720, h = 480, ml = 70, mr = 180, mt = 40, mb = 55;
    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (w - ml - mr); };
    auto sy = [&](double y) { return h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_plot: cannot open '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes and grid
    out << "<g stroke=\"#cccccc\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 6; ++i) {
        const double y = y_min + (y_max - y_min) * i / 6.0;
        out << "<line x1=\"" << ml << "\" y1=\"" << sy(y) << "\" x2=\"" << (w - mr)
            << "\" y2=\"" << sy(y) << "\"/>\n";
        out << "<text x=\"" << (ml - 8) << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\" fill=\"black\" stroke=\"none\">";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", y);
        out << buf << "</text>\n";
    }
    out << "</g>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << (h - mb) << "\" x2=\"" << (w - mr) << "\" y2=\""
        << (h - mb) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << (h - mb)
        << "\" stroke=\"black\"/>\n";

    // x tick labels at the observed sweep values
    std::vector<double> xticks;
    for (const auto& [key, c] : curves)
        for (const auto& [x, y] : c.points)
            if (std::find(xticks.begin(), xticks.end(), x) == xticks.end()) xticks.push_back(x);
    std::sort(xticks.begin(), xticks.end());
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (double x : xticks) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", x);
        out << "<text x=\"" << sx(x) << "\" y=\"" << (h - mb + 18)
            << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    }
    out << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 14)
        << "\" text-anchor=\"middle\">"
        << (x_is_pilots ? "pilot transmissions" : "SNR (dB)") << "</text>\n";
    out << "<text transform=\"rotate(-90)\" x=\"" << -(mt + (h - mt - mb) / 2) << "\" y=\"18\" "
           "text-anchor=\"middle\">NMSE (dB)</text>\n";
    out << "</g>\n";

    // curves + legend
    int legend_row = 0;
    for (const auto& [key, c] : curves) {
        const auto& [alg, scheme] = key;
        const std::string color = color_for(alg);
        const std::string dash = scheme == "DFT" ? " stroke-dasharray=\"6,4\"" : "";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash
            << " points=\"";
        for (const auto& [x, y] : c.points) out << sx(x) << ',' << sy(y) << ' ';
        out << "\"/>\n";
        for (const auto& [x, y] : c.points)
            out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\""
                << color << "\"/>\n";
        const double ly = mt + 16 + 20 * legend_row++;
        out << "<line x1=\"" << (w - mr + 12) << "\" y1=\"" << ly << "\" x2=\"" << (w - mr + 44)
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash
            << "/>\n";
        out << "<text x=\"" << (w - mr + 50) << "\" y=\"" << (ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << c.label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out.good()) throw std::runtime_error("emit_plot: write failed for '" + path + "'");
}

namespace {

json ray_to_json(const channel::Ray& r) {
    json j;
    j["kind"] = r.kind == channel::Ray::Kind::Los ? "los" : "nlos";
    j["aod_azimuth_rad"] = r.aod_azimuth_rad;
    j["aod_elevation_rad"] = r.aod_elevation_rad;
    j["aoa_azimuth_rad"] = r.aoa_azimuth_rad;
    j["aoa_elevation_rad"] = r.aoa_elevation_rad;
    j["delay_s"] = r.delay_s;
    j["d1_m"] = r.d1_m;
    j["d2_m"] = r.d2_m;
    j["gain"] = json::array({r.gain.real(), r.gain.imag()});
    return j;
}

channel::Ray ray_from_json(const json& j) {
    channel::Ray r;
    r.kind = j.at("kind").get<std::string>() == "los" ? channel::Ray::Kind::Los
                                                      : channel::Ray::Kind::Nlos;
    r.aod_azimuth_rad = j.at("aod_azimuth_rad").get<double>();
    r.aod_elevation_rad = j.at("aod_elevation_rad").get<double>();
    r.aoa_azimuth_rad = j.at("aoa_azimuth_rad").get<double>();
    r.aoa_elevation_rad = j.at("aoa_elevation_rad").get<double>();
    r.delay_s = j.at("delay_s").get<double>();
    r.d1_m = j.at("d1_m").get<double>();
    r.d2_m = j.at("d2_m").get<double>();
    r.gain = {j.at("gain").at(0).get<double>(), j.at("gain").at(1).get<double>()};
    return r;
}

} // namespace

void gen_dataset(const ExperimentConfig& cfg, const std::string& path) {
    cfg.validate();
    propagation::AbsorptionSpectrum spectrum;
    const double k = resolve_absorption_k(cfg, &spectrum);
    const channel::ChannelConfig chan_cfg = make_channel_config(cfg, k);
    const auto points = sweep_points(cfg);

    json entries = json::array();
    for (int real = 0; real < cfg.realizations; ++real) {
        const std::uint64_t chan_seed = channel_seed(cfg.master_seed, real);
        const auto realization = channel::make_channel(chan_seed, chan_cfg);
        for (int sweep = 0; sweep < static_cast<int>(points.size()); ++sweep) {
            const auto& point = points[static_cast<std::size_t>(sweep)];
            for (int si = 0; si < static_cast<int>(cfg.pilot_schemes.size()); ++si) {
                const auto pilots = frontend::make_pilots(
                    scheme_from_name(cfg.pilot_schemes[static_cast<std::size_t>(si)]),
                    cfg.m_t, point.n_pilots, cfg.zc_root);
                const double n0 =
                    calibrate_noise_power(cfg, realization.H, pilots, point.snr_db, spectrum);
                const std::uint64_t obs_seed = noise_seed(cfg.master_seed, real, sweep, si);
                const auto obs = frontend::observe(realization.H, pilots, n0, obs_seed);

                json e;
                e["realization"] = real;
                e["sweep_index"] = sweep;
                e["snr_db"] = point.snr_db;
                e["n_pilots"] = point.n_pilots;
                e["pilot_scheme"] = cfg.pilot_schemes[static_cast<std::size_t>(si)];
                json chan;
                chan["seed"] = realization.seed;
                chan["frequency_hz"] = realization.frequency_hz;
                chan["distance_m"] = realization.distance_m;
                chan["h"] = complex_matrix_to_json(realization.H);
                json rays = json::array();
                for (const auto& r : realization.rays) rays.push_back(ray_to_json(r));
                chan["rays"] = std::move(rays);
                e["channel"] = std::move(chan);
                json pj;
                pj["scheme"] = scheme_name(pilots.scheme);
                pj["root"] = pilots.root;
                pj["x"] = complex_matrix_to_json(pilots.X);
                e["pilots"] = std::move(pj);
                json oj;
                oj["noise_power"] = obs.noise_power;
                oj["seed"] = obs.seed;
                oj["y"] = complex_matrix_to_json(obs.Y);
                e["observations"] = std::move(oj);
                entries.push_back(std::move(e));
            }
        }
    }

    json root;
    root["format"] = "thzce-dataset-v1";
    root["config"] = cfg.to_json();
    root["entries"] = std::move(entries);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("gen_dataset: cannot open '" + path + "'");
    out << root.dump(1, '\t') << '\n';
    if (!out.good()) throw std::runtime_error("gen_dataset: write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open '" + path + "'");
    json root = json::parse(in);
    if (root.value("format", "") != "thzce-dataset-v1")
        throw std::invalid_argument("load_dataset: unknown format tag");
    Dataset ds;
    ds.config = ExperimentConfig::from_json(root.at("config"));
    for (const auto& e : root.at("entries")) {
        DatasetEntry entry;
        entry.realization = e.at("realization").get<int>();
        entry.sweep_index = e.at("sweep_index").get<int>();
        entry.snr_db = e.at("snr_db").get<double>();
        const auto& chan = e.at("channel");
        entry.channel.seed = chan.at("seed").get<std::uint64_t>();
        entry.channel.frequency_hz = chan.at("frequency_hz").get<double>();
        entry.channel.distance_m = chan.at("distance_m").get<double>();
        entry.channel.H = complex_matrix_from_json(chan.at("h"));
        for (const auto& rj : chan.at("rays"))
            entry.channel.rays.push_back(ray_from_json(rj));
        const auto& pj = e.at("pilots");
        entry.pilots.scheme = scheme_from_name(pj.at("scheme").get<std::string>());
        entry.pilots.root = pj.at("root").get<int>();
        entry.pilots.X = complex_matrix_from_json(pj.at("x"));
        const auto& oj = e.at("observations");
        entry.observations.noise_power = oj.at("noise_power").get<double>();
        entry.observations.seed = oj.at("seed").get<std::uint64_t>();
        entry.observations.Y = complex_matrix_from_json(oj.at("y"));

        // observation alphabet invariant
        for (Eigen::Index c = 0; c < entry.observations.Y.cols(); ++c)
            for (Eigen::Index r = 0; r < entry.observations.Y.rows(); ++r) {
                const auto v = entry.observations.Y(r, c);
                if (std::abs(std::abs(v.real()) - 1.0) > 0.0 ||
                    std::abs(std::abs(v.imag()) - 1.0) > 0.0)
                    throw std::invalid_argument(
                        "load_dataset: observation entry outside the {+-1 +-j} alphabet");
            }
        // stored rays must reproduce the stored channel
        channel::ChannelConfig cc = make_channel_config(ds.config, 0.0);
        const auto rebuilt = channel::synthesize_channel(entry.channel.rays, cc);
        const double rel = (rebuilt.H - entry.channel.H).norm() / entry.channel.H.norm();
        if (!(rel < 1e-10))
            throw std::invalid_argument("load_dataset: stored rays do not reproduce H");
        ds.entries.push_back(std::move(entry));
    }
    return ds;
}

std::vector<NmseRecord> run_from_dataset(const Dataset& ds) {
    const auto& cfg = ds.config;
    const auto points = sweep_points(cfg);
    const int n_sweep = static_cast<int>(points.size());
    const int n_alg = static_cast<int>(cfg.algorithms.size());
    const int n_scheme = static_cast<int>(cfg.pilot_schemes.size());
    std::vector<NmseRecord> records(
        static_cast<std::size_t>(cfg.realizations) * n_sweep * n_alg * n_scheme);

    for (const auto& entry : ds.entries) {
        const int si = [&] {
            const auto name = scheme_name(entry.pilots.scheme);
            for (int i = 0; i < n_scheme; ++i)
                if (cfg.pilot_schemes[static_cast<std::size_t>(i)] == name) return i;
            throw std::invalid_argument("run_from_dataset: scheme not in config");
        }();
        for (int ai = 0; ai < n_alg; ++ai) {
            auto& rec = records[static_cast<std::size_t>(
                ((entry.realization * n_sweep + entry.sweep_index) * n_alg + ai) * n_scheme +
                si)];
            rec.algorithm = cfg.algorithms[static_cast<std::size_t>(ai)];
            rec.pilot_scheme = scheme_name(entry.pilots.scheme);
            rec.snr_db = entry.snr_db;
            rec.n_pilots = static_cast<int>(entry.pilots.X.cols());
            rec.realization = entry.realization;
            rec.realization_seed = entry.channel.seed;
            try {
                const auto algo = estimators::algorithm_from_name(rec.algorithm);
                const auto est_cfg = resolve_estimator_config(cfg, algo);
                const auto t0 = std::chrono::steady_clock::now();
                const auto est = estimators::estimate(entry.observations, entry.pilots, est_cfg);
                const auto t1 = std::chrono::steady_clock::now();
                rec.nmse_db = metrics::nmse_db(entry.channel.H, est.H_hat);
                rec.wall_time_s = cfg.record_timing
                                      ? std::chrono::duration<double>(t1 - t0).count()
                                      : 0.0;
            } catch (const std::exception& e) {
                rec.failed = true;
                rec.error = e.what();
                rec.nmse_db = std::nan("");
            }
        }
    }
    return records;
}

} // namespace thzce::bench
