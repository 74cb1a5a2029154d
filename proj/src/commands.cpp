#include "pcbench/commands.hpp"

#include "pcbench/units.hpp"

#include <cmath>
#include <future>
#include <random>
#include <set>

namespace pcbench::io {

namespace {

void write_summary(const std::filesystem::path& dir, const Summary& summary) {
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

Summary finite_or_null(double v) { return std::isfinite(v) ? Summary(v) : Summary(nullptr); }

cycling::TestConfig require_current(const RunConfig& cfg) {
    if (!cfg.cycling.i_pulse && !cfg.cycling.r_load) {
        throw ConfigError("cycling.i_pulse", "this command needs cycling.i_pulse or cycling.r_load");
    }
    return cfg.test_config();
}

struct CycleOutcome {
    cycling::CycleRun run;
    cycling::CycleResult representative;
    std::optional<std::size_t> cycles_to_failure;
    Summary results;
};

CycleOutcome simulate(const RunConfig& cfg, const cycling::TestConfig& test) {
    const auto device = cfg.device_model();
    const auto network = cfg.thermal_network();
    const auto schedule = cfg.schedule();

    CycleOutcome o;
    o.run = cycling::run_cycles(test, device, network, cfg.aging_model(), schedule);
    o.representative = cycling::representative_cycle(test, device, network, schedule);
    o.cycles_to_failure = aging::cycles_to_failure(o.run.records, cfg.aging.failure);

    std::size_t invalid = 0;
    for (const auto& r : o.run.records) invalid += r.valid ? 0 : 1;
    const double r_ds_cold = device::on_resistance(device, test.v_gs, test.t_c);

    auto& res = o.results;
    res["t_c_C"] = to_celsius(test.t_c);
    res["i_pulse_A"] = test.i_pulse;
    res["r_load_ohm"] = test.i_pulse > 0.0 ? finite_or_null(test.v_dc / test.i_pulse - r_ds_cold) : Summary(nullptr);
    res["representative_cycle"] = {{"tj_peak_C", to_celsius(o.representative.t_j_peak)},
                                   {"tj_min_C", to_celsius(o.representative.t_j_min)},
                                   {"delta_tj_K", o.representative.t_j_peak - o.representative.t_j_min}};
    res["cycles"] = o.run.records.size();
    res["invalid_cycles"] = invalid;
    res["simulated_cycles"] = o.run.simulated_cycles;
    res["cycles_to_failure"] = o.cycles_to_failure ? Summary(*o.cycles_to_failure) : Summary(nullptr);
    res["final_aging"] = {{"n_effective", o.run.final_state.n_effective},
                          {"r_multiplier", o.run.final_state.r_multiplier}};
    return o;
}

Summary fit_json(const aging::CoffinMansonFit& fit) {
    return {{"coefficient", fit.coefficient}, {"exponent", fit.exponent}, {"r_squared", fit.r_squared}};
}

}  // namespace

Summary make_summary(std::string_view command, const RunConfig& cfg, Summary results) {
    Summary s;
    s["tool"] = std::string(kToolName);
    s["version"] = std::string(kToolVersion);
    s["command"] = std::string(command);
    s["config"] = echo(cfg);
    s["results"] = std::move(results);
    return s;
}

void run_report(const std::filesystem::path& dir, std::span<const CycleRecord> records,
                std::span<const cycling::TracePoint> trace, const Summary& summary) {
    write_text_file(dir / "records.csv", records_csv(records));
    write_text_file(dir / "tj_trace.csv", trace_csv(trace));
    write_summary(dir, summary);
}

std::vector<IvRow> iv_sweep_rows(const RunConfig& cfg) {
    const auto& iv = cfg.iv_sweep;
    if (iv.v_gs.empty()) throw ConfigError("iv_sweep.v_gs", "gate voltage list is empty");
    if (iv.v_ds.empty()) throw ConfigError("iv_sweep.v_ds", "drain voltage grid is empty");
    const auto device = cfg.device_model();
    const double t_j = to_kelvin(iv.t_j);
    std::vector<IvRow> rows;
    rows.reserve(iv.v_gs.size() * iv.v_ds.size());
    for (double v_gs : iv.v_gs) {
        for (double v_ds : iv.v_ds) {
            const device::OperatingPoint op{v_gs, v_ds, t_j};
            rows.push_back({v_gs, v_ds, device::drain_current(device, op),
                            device::region_of(device.params, device.coeffs, op)});
        }
    }
    return rows;
}

Summary run_iv_sweep(const RunConfig& cfg, const CommandOptions& opts) {
    const auto rows = iv_sweep_rows(cfg);
    write_text_file(opts.out_dir / "iv_sweep.csv", iv_sweep_csv(rows));
    const auto device = cfg.device_model();
    Summary res;
    res["rows"] = rows.size();
    res["t_j_C"] = cfg.iv_sweep.t_j;
    Summary ron = Summary::array();
    for (double v_gs : cfg.iv_sweep.v_gs) {
        try {
            ron.push_back({{"vgs_V", v_gs}, {"r_on_ohm", device::on_resistance(device, v_gs, to_kelvin(cfg.iv_sweep.t_j))}});
        } catch (const std::domain_error&) {
            ron.push_back({{"vgs_V", v_gs}, {"r_on_ohm", nullptr}});
        }
    }
    res["on_resistance"] = ron;
    auto summary = make_summary("iv-sweep", cfg, std::move(res));
    write_summary(opts.out_dir, summary);
    return summary;
}

Summary run_dpt(const RunConfig& cfg, const CommandOptions& opts) {
    const auto r = losses::dpt_energies(cfg.dpt);
    write_text_file(opts.out_dir / "dpt_waveform.csv", dpt_waveform_csv(r.waveform));
    Summary res;
    res["i_test_A"] = r.energies.i_test;
    res["v_dc_V"] = r.energies.v_dc;
    res["e_on_J"] = r.energies.e_on;
    res["e_off_J"] = r.energies.e_off;
    res["e_on_trapezoid_J"] = losses::integrate_energy(r.turn_on());
    res["e_off_trapezoid_J"] = losses::integrate_energy(r.turn_off());
    const auto at_bench = losses::scale_energies(r.energies, cfg.cycling.v_dc, 1.0);
    res["bench_energy_per_amp_J"] = at_bench.e_on + at_bench.e_off;
    auto summary = make_summary("dpt", cfg, std::move(res));
    write_summary(opts.out_dir, summary);
    return summary;
}

Summary run_cycle(const RunConfig& cfg, const CommandOptions& opts) {
    auto o = simulate(cfg, require_current(cfg));
    auto summary = make_summary("cycle", cfg, std::move(o.results));
    run_report(opts.out_dir, o.run.records, o.representative.trace, summary);
    return summary;
}

Summary run_solve_amplitude(const RunConfig& cfg, const CommandOptions& opts) {
    std::vector<double> tcs;
    for (double c : cfg.sweep.t_c.empty() ? std::vector<double>{cfg.thermal.t_c} : cfg.sweep.t_c) {
        tcs.push_back(to_kelvin(c));
    }
    const auto sol = cycling::solve_amplitude_table(cfg.test_config(), cfg.device_model(), cfg.thermal_network(),
                                                    cfg.schedule(), tcs);
    write_text_file(opts.out_dir / "amplitude.csv", amplitude_csv(sol));
    Summary rows = Summary::array();
    for (const auto& s : sol) {
        rows.push_back({{"tc_C", to_celsius(s.t_c)},
                        {"i_pulse_A", s.i_pulse},
                        {"r_ds_on_hot_ohm", s.r_ds_on},
                        {"r_load_ohm", finite_or_null(s.r_load)},
                        {"tj_peak_C", to_celsius(s.t_j_peak)}});
    }
    auto summary = make_summary("solve-amplitude", cfg, {{"v_dc_V", cfg.cycling.v_dc},
                                                          {"tj_max_C", cfg.cycling.t_j_max},
                                                          {"solutions", rows}});
    write_summary(opts.out_dir, summary);
    return summary;
}

Summary run_sweep(const RunConfig& cfg, const CommandOptions& opts) {
    if (cfg.sweep.t_c.empty() && cfg.sweep.delta_tj.empty()) {
        throw ConfigError("sweep", "needs at least one of sweep.t_c or sweep.delta_tj");
    }
    const auto base = cfg.test_config();

    struct Job {
        std::filesystem::path dir;
        std::future<CycleOutcome> outcome;
    };
    std::vector<Job> tc_jobs, dtj_jobs;

    if (!cfg.sweep.t_c.empty()) {
        const auto test = require_current(cfg);
        for (std::size_t i = 0; i < cfg.sweep.t_c.size(); ++i) {
            RunConfig c = cfg;
            c.thermal.t_c = cfg.sweep.t_c[i];
            tc_jobs.push_back({opts.out_dir / ("tc_" + std::to_string(i)), std::async(std::launch::async, [c, test] {
                                   auto t = test;
                                   t.t_c = to_kelvin(c.thermal.t_c);
                                   return simulate(c, t);
                               })});
        }
    }
    for (std::size_t i = 0; i < cfg.sweep.delta_tj.size(); ++i) {
        const double target = cfg.sweep.delta_tj[i];
        dtj_jobs.push_back({opts.out_dir / ("dtj_" + std::to_string(i)), std::async(std::launch::async, [&cfg, base, target] {
                                auto t = base;
                                t.i_pulse = cycling::solve_current_for_swing(t, cfg.device_model(), cfg.thermal_network(),
                                                                             cfg.schedule(), target);
                                return simulate(cfg, t);
                            })});
    }

    Summary tc_results = Summary::array();
    for (std::size_t i = 0; i < tc_jobs.size(); ++i) {
        auto o = tc_jobs[i].outcome.get();
        RunConfig c = cfg;
        c.thermal.t_c = cfg.sweep.t_c[i];
        const auto sub = make_summary("cycle", c, o.results);
        run_report(tc_jobs[i].dir, o.run.records, o.representative.trace, sub);
        o.results["dir"] = tc_jobs[i].dir.filename().string();
        tc_results.push_back(std::move(o.results));
    }

    Summary dtj_results = Summary::array();
    std::vector<aging::LifetimePoint> points;
    for (std::size_t i = 0; i < dtj_jobs.size(); ++i) {
        auto o = dtj_jobs[i].outcome.get();
        run_report(dtj_jobs[i].dir, o.run.records, o.representative.trace, make_summary("cycle", cfg, o.results));
        o.results["target_delta_tj_K"] = cfg.sweep.delta_tj[i];
        o.results["dir"] = dtj_jobs[i].dir.filename().string();
        if (o.cycles_to_failure) {
            points.push_back({cfg.sweep.delta_tj[i], static_cast<double>(*o.cycles_to_failure)});
        }
        dtj_results.push_back(std::move(o.results));
    }

    Summary res;
    res["t_c_runs"] = tc_results;
    res["delta_tj_runs"] = dtj_results;
    if (!dtj_jobs.empty()) {
        write_text_file(opts.out_dir / "lifetime.csv", lifetime_csv(points));
        std::set<double> distinct;
        for (const auto& p : points) distinct.insert(p.delta_t_j);
        res["lifetime_fit"] = distinct.size() >= 2 ? fit_json(aging::fit_coffin_manson(points)) : Summary(nullptr);
    }
    auto summary = make_summary("sweep", cfg, std::move(res));
    write_summary(opts.out_dir, summary);
    return summary;
}

Summary run_fit_lifetime(const RunConfig& cfg, const CommandOptions& opts) {
    auto points = cfg.lifetime.points;
    if (cfg.lifetime.points_csv) {
        const auto more = parse_lifetime_csv(read_text_file(*cfg.lifetime.points_csv));
        points.insert(points.end(), more.begin(), more.end());
    }
    if (opts.seed && cfg.lifetime.noise > 0.0) {
        std::mt19937_64 rng(*opts.seed);
        std::normal_distribution<double> z(0.0, 1.0);
        for (auto& p : points) p.n_f *= std::exp(cfg.lifetime.noise * z(rng));
    }
    const auto fit = aging::fit_coffin_manson(points);
    write_text_file(opts.out_dir / "lifetime.csv", lifetime_csv(points));
    Summary res;
    res["points"] = points.size();
    res["lifetime_fit"] = fit_json(fit);
    if (opts.seed) res["seed"] = *opts.seed;
    auto summary = make_summary("fit-lifetime", cfg, std::move(res));
    write_summary(opts.out_dir, summary);
    return summary;
}

Summary run_fit_device(const RunConfig& cfg, const CommandOptions& opts) {
    if (!cfg.fit_device.iv_points_csv) throw ConfigError("fit_device.iv_points_csv", "required for fit-device");
    auto points = parse_iv_points_csv(read_text_file(*cfg.fit_device.iv_points_csv));
    if (opts.seed && cfg.fit_device.noise > 0.0) {
        std::mt19937_64 rng(*opts.seed);
        std::normal_distribution<double> z(0.0, 1.0);
        for (auto& p : points) p.i_d *= 1.0 + cfg.fit_device.noise * z(rng);
    }
    const auto coeffs = cfg.device_model().coeffs;
    const auto fit = device::fit_parameters(points, coeffs, to_kelvin(cfg.fit_device.t_ref));

    DeviceCard card;
    card.k = fit.k;
    card.v_t = fit.v_t;
    card.t_ref = cfg.fit_device.t_ref;
    card.mu_exponent = coeffs.mu_exponent;
    card.vt_slope = coeffs.vt_slope;
    write_text_file(opts.out_dir / "device_fit.json", device_card_json(card).dump(2) + "\n");

    Summary res;
    res["points"] = points.size();
    res["k"] = fit.k;
    res["v_t"] = fit.v_t;
    res["rms_residual_A"] = fit.rms_residual;
    if (opts.seed) res["seed"] = *opts.seed;
    auto summary = make_summary("fit-device", cfg, std::move(res));
    write_summary(opts.out_dir, summary);
    return summary;
}

}  // namespace pcbench::io
