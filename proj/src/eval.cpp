// SPDX-License-Identifier: Apache-2.0
#include "tensorcfo/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tcfo {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct SharedDraws {
    ChannelRealization channel;
    RVec unit_phase_path;
    Codebook codebook;
    MeasurementSet meas;
    ImpairmentTrace trace;
};

OmpConfig omp_policy(const ExperimentConfig& cfg, const SystemConfig& sys, int num_slabs) {
    OmpConfig omp;
    omp.epsilon = sys.num_meas * sys.noise_var / sys.pilot_power;
    omp.max_iterations = std::min(2 * cfg.sparsity_hint * num_slabs, sys.num_meas);
    return omp;
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
    case Method::TensorOmp: return "tensor_omp";
    case Method::OmpCfoIgnored: return "omp_cfo_ignored";
    case Method::PerfectCsi: return "perfect_csi";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "tensor_omp")
        return Method::TensorOmp;
    if (name == "omp_cfo_ignored")
        return Method::OmpCfoIgnored;
    if (name == "perfect_csi")
        return Method::PerfectCsi;
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    channel.validate();
    if (channel.num_rx != system.num_rx || channel.num_tx != system.num_tx)
        throw std::invalid_argument("ExperimentConfig: channel and system antenna counts differ");
    if (trials < 1)
        throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (snr_db_list.empty() || tau_list.empty() || meas_list.empty())
        throw std::invalid_argument("ExperimentConfig: sweep lists must be non-empty");
    if (methods.empty())
        throw std::invalid_argument("ExperimentConfig: method list must be non-empty");
    if (sparsity_hint < 1)
        throw std::invalid_argument("ExperimentConfig: sparsity_hint must be >= 1");
    if (std::abs(cfo_hz) > system.max_cfo_hz)
        throw std::invalid_argument("ExperimentConfig: |cfo_hz| exceeds max_cfo_hz");
    for (int m : meas_list) {
        SystemConfig sys = system;
        sys.num_meas = m;
        sys.noise_var = 1.0;
        sys.validate();
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;

    ExperimentConfig cfg;
    if (j.contains("system")) {
        const auto& s = j["system"];
        cfg.system.num_tx = s.value("num_tx", cfg.system.num_tx);
        cfg.system.num_rx = s.value("num_rx", cfg.system.num_rx);
        cfg.system.num_meas = s.value("num_meas", cfg.system.num_meas);
        cfg.system.phase_levels = s.value("phase_levels", cfg.system.phase_levels);
        cfg.system.symbol_duration_s = s.value("symbol_duration_s", cfg.system.symbol_duration_s);
        cfg.system.pilot_power = s.value("pilot_power", cfg.system.pilot_power);
        cfg.system.carrier_freq_hz = s.value("carrier_freq_hz", cfg.system.carrier_freq_hz);
        cfg.system.max_cfo_hz = s.value("max_cfo_hz", cfg.system.max_cfo_hz);
        cfg.system.leakage_factor = s.value("leakage_factor", cfg.system.leakage_factor);
        cfg.system.grid_oversampling = s.value("grid_oversampling", cfg.system.grid_oversampling);
    }
    if (j.contains("channel")) {
        const auto& c = j["channel"];
        cfg.channel.num_clusters = c.value("num_clusters", cfg.channel.num_clusters);
        cfg.channel.rays_per_cluster = c.value("rays_per_cluster", cfg.channel.rays_per_cluster);
        cfg.channel.angular_spread_deg = c.value("angular_spread_deg", cfg.channel.angular_spread_deg);
        cfg.channel.spacing_over_lambda = c.value("spacing_over_lambda", cfg.channel.spacing_over_lambda);
    }
    cfg.snr_db_list = j.value("snr_db_list", cfg.snr_db_list);
    cfg.tau_list = j.value("tau_list", cfg.tau_list);
    cfg.meas_list = j.value("meas_list", cfg.meas_list);
    cfg.cfo_hz = j.value("cfo_hz", cfg.cfo_hz);
    cfg.tau_rad = j.value("tau_rad", cfg.tau_rad);
    cfg.snr_db = j.value("snr_db", cfg.snr_db);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.sparsity_hint = j.value("sparsity_hint", cfg.sparsity_hint);
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : j["methods"]) {
            const auto m = method_from_name(name.get<std::string>());
            if (!m)
                throw std::invalid_argument("unknown method in config: " + name.get<std::string>());
            cfg.methods.push_back(*m);
        }
    }
    // channel antenna counts follow the system block
    cfg.channel.num_rx = cfg.system.num_rx;
    cfg.channel.num_tx = cfg.system.num_tx;
    return cfg;
}

double achievable_rate(const CMat& h_true, const CVec& rx_beam, const CVec& tx_beam,
                       double pilot_power, double noise_var) {
    if (std::abs(rx_beam.norm() - 1.0) > 1e-6 || std::abs(tx_beam.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("achievable_rate: beams must be unit norm");
    const double gain = std::norm(rx_beam.dot(h_true * tx_beam));
    return std::log2(1.0 + pilot_power * gain / noise_var);
}

double nmse_db_scale_aligned(const CMat& h_true, const CMat& h_est) {
    const double ref = h_true.squaredNorm();
    if (ref == 0.0)
        throw std::invalid_argument("nmse: zero reference channel");
    const double est_norm = h_est.squaredNorm();
    double nmse = 1.0;
    if (est_norm > 0.0) {
        const cdouble scale = (h_est.conjugate().cwiseProduct(h_true)).sum() / est_norm;
        nmse = (h_true - scale * h_est).squaredNorm() / ref;
    }
    return 10.0 * std::log10(nmse);
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, SweepAxis axis, double axis_value,
                                   int num_meas, int trial) {
    SystemConfig sys = cfg.system;
    sys.num_meas = num_meas;
    const double snr_db = axis == SweepAxis::Snr ? axis_value : cfg.snr_db;
    const double tau = axis == SweepAxis::Tau ? axis_value : cfg.tau_rad;
    sys.noise_var = sys.pilot_power * std::pow(10.0, -snr_db / 10.0);
    sys.validate();

    const std::uint64_t trial_seed = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(trial));
    Rng root(trial_seed);
    Rng rng_chan = root.substream(1);
    Rng rng_phase = root.substream(2);
    Rng rng_codebook = root.substream(3);
    Rng rng_noise = root.substream(4);

    SharedDraws draws;
    draws.channel = draw_channel(cfg.channel, rng_chan);
    draws.unit_phase_path = draw_phase_noise(sys.num_meas, 1.0, rng_phase);
    draws.trace = make_trace(cfg.cfo_hz, tau, tau * draws.unit_phase_path, sys);
    draws.codebook = random_codebook(sys, rng_codebook);
    draws.meas = simulate_measurements(draws.channel.h, draws.codebook, draws.trace, sys, rng_noise);

    std::vector<TrialRecord> records;
    records.reserve(cfg.methods.size());
    for (Method method : cfg.methods) {
        TrialRecord rec;
        rec.method = method_name(method);
        rec.snr_db = snr_db;
        rec.tau_rad = tau;
        rec.num_meas = num_meas;
        rec.trial = trial;
        rec.seed = trial_seed;
        rec.cfo_err_hz = kNan;
        rec.chan_nmse_db = kNan;
        rec.flag = "ok";

        const auto t0 = std::chrono::steady_clock::now();
        CVec rx_beam = draws.codebook.rx.col(0); // fallback pair
        CVec tx_beam = draws.codebook.tx.col(0);
        try {
            switch (method) {
            case Method::TensorOmp: {
                const auto grid = ReducedFrequencyGrid::make(sys.num_meas, sys.leakage_factor,
                                                             sys.max_cfo_hz, sys.symbol_duration_s);
                const SensingOperator op = build_operator(draws.codebook, sys, grid);
                const OmpConfig omp = omp_policy(cfg, sys, grid.num_slabs());
                const EstimationResult est = estimate_channel_cfo(draws.meas.y, op, omp,
                                                                  sys.phase_levels,
                                                                  sys.grid_oversampling);
                rec.omp_iters = est.omp.iterations;
                if (est.valid) {
                    rx_beam = est.beams.rx;
                    tx_beam = est.beams.tx;
                    rec.cfo_err_hz = std::abs(est.cfo_hz_hat - cfg.cfo_hz);
                    rec.chan_nmse_db = nmse_db_scale_aligned(draws.channel.h, est.h_est);
                    if (est.omp.ls_regularized)
                        rec.flag = "ridge";
                    else if (est.split_ambiguous)
                        rec.flag = "ambiguous";
                } else {
                    rec.flag = "fallback";
                    rec.chan_nmse_db = 0.0; // zero estimate
                }
                break;
            }
            case Method::OmpCfoIgnored: {
                const SteeringDictionary rx = make_steering_dictionary(sys.num_rx, sys.grid_oversampling);
                const SteeringDictionary tx = make_steering_dictionary(sys.num_tx, sys.grid_oversampling);
                const LiftedSystem lifted = LiftedSystem::build(draws.codebook, rx, tx);
                const auto grid = ReducedFrequencyGrid::make(sys.num_meas, sys.leakage_factor,
                                                             sys.max_cfo_hz, sys.symbol_duration_s);
                const OmpConfig omp = omp_policy(cfg, sys, grid.num_slabs());
                const VectorOmpResult res = standard_omp(draws.meas.y, lifted.a, omp);
                rec.omp_iters = res.iterations;
                const Eigen::Map<const CMat> coeffs(res.x.data(), lifted.grid_rx, lifted.grid_tx);
                const CMat h_est = coeffs.cwiseAbs().sum() > 0.0
                                       ? synth_on_grid(coeffs, sys.grid_oversampling)
                                       : CMat::Zero(sys.num_rx, sys.num_tx);
                if (h_est.norm() > 0.0) {
                    const BeamPair beams = select_beams(h_est, sys.phase_levels);
                    rx_beam = beams.rx;
                    tx_beam = beams.tx;
                    rec.chan_nmse_db = nmse_db_scale_aligned(draws.channel.h, h_est);
                    if (res.ls_regularized)
                        rec.flag = "ridge";
                } else {
                    rec.flag = "fallback";
                    rec.chan_nmse_db = 0.0;
                }
                break;
            }
            case Method::PerfectCsi: {
                const BeamPair beams = select_beams(draws.channel.h, sys.phase_levels);
                rx_beam = beams.rx;
                tx_beam = beams.tx;
                break;
            }
            }
        } catch (const std::exception&) {
            rec.flag = "error"; // fallback beams stay in effect
        }
        rec.rate_bps_hz = achievable_rate(draws.channel.h, rx_beam, tx_beam, sys.pilot_power,
                                          sys.noise_var);
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                          .count();
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                   std::ostream* progress) {
    cfg.validate();
    const std::vector<double>& points = axis == SweepAxis::Snr ? cfg.snr_db_list : cfg.tau_list;

    struct Item {
        int num_meas;
        double value;
        int trial;
    };
    std::vector<Item> items;
    for (int m : cfg.meas_list)
        for (double v : points)
            for (int t = 0; t < cfg.trials; ++t)
                items.push_back({m, v, t});

    std::vector<std::vector<TrialRecord>> slots(items.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
        const Item& it = items[idx];
        slots[idx] = run_trial(cfg, axis, it.value, it.num_meas, it.trial);
        if (progress && (idx + 1) % 50 == 0) {
#pragma omp critical
            (*progress) << "  " << (idx + 1) << "/" << items.size() << " trials done\n";
        }
    }

    std::vector<TrialRecord> records;
    records.reserve(items.size() * cfg.methods.size());
    for (auto& slot : slots)
        for (auto& rec : slot)
            records.push_back(std::move(rec));
    return records;
}

std::string csv_header() {
    return "method,snr_db,tau_rad,num_meas,trial,seed,rate_bps_hz,cfo_err_hz,chan_nmse_db,"
           "omp_iters,flag";
}

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
    out << csv_header() << '\n';
    for (const TrialRecord& r : records) {
        out << r.method << ',' << format_double(r.snr_db) << ',' << format_double(r.tau_rad) << ','
            << r.num_meas << ',' << r.trial << ',' << r.seed << ','
            << format_double(r.rate_bps_hz) << ',' << format_double(r.cfo_err_hz) << ','
            << format_double(r.chan_nmse_db) << ',' << r.omp_iters << ',' << r.flag << '\n';
    }
}

void print_summary(const std::vector<TrialRecord>& records, SweepAxis axis, std::ostream& out) {
    struct Cell {
        double rate_sum = 0.0;
        int count = 0;
        int flagged = 0;
    };
    std::map<std::tuple<int, double, std::string>, Cell> cells;
    for (const TrialRecord& r : records) {
        const double value = axis == SweepAxis::Snr ? r.snr_db : r.tau_rad;
        Cell& cell = cells[{r.num_meas, value, r.method}];
        cell.rate_sum += r.rate_bps_hz;
        cell.count += 1;
        if (r.flag != "ok")
            cell.flagged += 1;
    }
    out << (axis == SweepAxis::Snr ? "# mean rate by (M, snr_db, method)\n"
                                   : "# mean rate by (M, tau_rad, method)\n");
    for (const auto& [key, cell] : cells) {
        const auto& [m, value, method] = key;
        out << "  M=" << m << "  " << (axis == SweepAxis::Snr ? "snr_db=" : "tau=")
            << format_double(value) << "  " << method << "  mean_rate="
            << format_double(cell.rate_sum / cell.count) << "  trials=" << cell.count
            << "  flagged=" << cell.flagged << '\n';
    }
}

} // namespace tcfo
