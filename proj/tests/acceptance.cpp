// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "pcbench/aging.hpp"
#include "pcbench/commands.hpp"
#include "pcbench/config.hpp"
#include "pcbench/cycling.hpp"
#include "pcbench/device_model.hpp"
#include "pcbench/losses.hpp"
#include "pcbench/thermal_model.hpp"
#include "pcbench/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pcbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct Criterion {
    const char* name;
    double time_limit_s;  // <= 0 means no runtime bound
    std::function<void(Outcome&)> body;
};

io::RunConfig bench_config() {
    return io::load_config_file(fs::path(PCBENCH_SOURCE_DIR) / "configs" / "amplitude_table.json");
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "pcbench_acceptance" / name;
    fs::remove_all(dir);
    return dir;
}

void device_equations(Outcome& o) {
    double worst_gap = 0.0;
    bool flat = true;
    double worst_slope = 0.0;
    for (double k : {0.5, 2.0, 13.68, 40.0}) {
        for (double v_t : {1.0, 2.6, 4.0}) {
            const device::DeviceModel d{device::DeviceParams::from_gain(k, v_t, 300.0), {0.0, 0.0}};
            for (double v_gs = v_t + 0.5; v_gs <= 25.0; v_gs += 1.5) {
                const double p = device::pinch_off(d.params, d.coeffs, v_gs, 300.0);
                const double sat = device::drain_current(d, {v_gs, p, 300.0});
                const double lin = device::drain_current(d, {v_gs, p - 1e-12, 300.0});
                worst_gap = std::max(worst_gap, std::abs(sat - lin) / sat);
                for (double v = p; v < p + 30.0; v += 0.7) flat = flat && device::drain_current(d, {v_gs, v, 300.0}) == sat;

                const double h = 1e-6;
                const double slope = (device::drain_current(d, {v_gs, 2 * h, 300.0}) -
                                      device::drain_current(d, {v_gs, 0.0, 300.0})) / (2 * h);
                const double r = device::on_resistance(d, v_gs, 300.0);
                worst_slope = std::max(worst_slope, std::abs(1.0 / slope - r) / r);
            }
        }
    }
    o.detail << "continuity gap " << worst_gap << ", slope error " << worst_slope;
    o.require(worst_gap <= 1e-9, "continuity <= 1e-9");
    o.require(flat, "saturation flatness");
    o.require(worst_slope <= 1e-3, "reciprocal slope within 0.1%");
}

void thermal_fixed_point(Outcome& o) {
    const thermal::ThermalNetwork net({{0.6, 0.01}, {0.4, 0.5}, {1.5, 2.0}}, 350.0);
    const double p = 20.0;
    const double dt = net.min_tau() / 10.0;
    auto s = thermal::ThermalState::at_rest(net);
    for (double t = 0.0; t < 7.0 * net.max_tau(); t += dt) s = thermal::thermal_step(net, s, p, dt);
    const double target = thermal::steady_state_tj(350.0, p, 0.0, thermal::network_total_resistance(net));
    const double rel = std::abs(s.t_j - target) / target;

    const auto one = thermal::ThermalNetwork::single_stage(1.0, 0.1, 300.0);
    const auto step = thermal::thermal_step(one, thermal::ThermalState::at_rest(one), 10.0, 0.1);
    const double exact = 10.0 * (1.0 - std::exp(-1.0));
    const double rel_exp = std::abs((step.t_j - 300.0) - exact) / exact;
    o.detail << "fixed point " << rel << ", exponential " << rel_exp;
    o.require(rel <= 1e-3, "fixed point within 0.1%");
    o.require(rel_exp <= 1e-9, "exponential within 1e-9");
}

void amplitude_table(Outcome& o) {
    const auto cfg = bench_config();
    const auto tc = cfg.test_config();
    const auto dev = cfg.device_model();
    const auto net = cfg.thermal_network();
    const auto sched = cfg.schedule();

    std::vector<double> grid;
    for (double c = 25.0; c <= 150.0 + 1e-9; c += 2.5) grid.push_back(to_kelvin(c));
    const auto dense = cycling::solve_amplitude_table(tc, dev, net, sched, grid);
    bool decreasing = true;
    for (std::size_t i = 1; i < dense.size(); ++i) decreasing = decreasing && dense[i].i_pulse < dense[i - 1].i_pulse;

    const double reference[] = {3.75, 2.75, 2.25, 1.75, 1.25, 0.75};
    std::vector<cycling::AmplitudeTarget> targets;
    for (int i = 0; i < 6; ++i) targets.push_back({to_kelvin(25.0 + 25.0 * i), reference[i]});
    std::vector<double> currents;
    const double worst = cycling::amplitude_table_error(tc, dev, net, sched, targets, &currents);
    o.detail << "I =";
    for (double c : currents) o.detail << " " << c;
    o.detail << " A, max error " << worst << " A";
    o.require(decreasing, "strictly decreasing in T_c");
    o.require(worst <= 0.25, "max error <= 0.25 A");
}

void cycle_shape(Outcome& o) {
    const auto cfg = bench_config();
    auto tc = cfg.test_config();
    const auto sched = cfg.schedule();
    const double on = sched.on_time();
    bool shape = true;
    double min_swing = 1e300;
    for (double t_c : {298.15, 423.15}) {
        for (double i : {0.1, 0.7, 2.0}) {
            tc.t_c = t_c;
            tc.i_pulse = i;
            const auto rep = cycling::representative_cycle(tc, cfg.device_model(), cfg.thermal_network(), sched);
            for (std::size_t k = 1; k < rep.trace.size(); ++k) {
                const bool up = rep.trace[k].t_j > rep.trace[k - 1].t_j;
                const bool down = rep.trace[k].t_j < rep.trace[k - 1].t_j && rep.trace[k].t_j > t_c;
                shape = shape && (rep.trace[k].t <= on ? up : down);
            }
            min_swing = std::min(min_swing, rep.t_j_peak - rep.t_j_min);
        }
    }
    o.detail << "smallest swing " << min_swing << " K";
    o.require(shape, "rise during on-window, decay toward T_c after");
    o.require(min_swing > 0.0, "swing > 0");
}

void drift_shape(Outcome& o) {
    const auto cfg = bench_config();
    auto tc = cfg.test_config();
    tc.i_pulse = 2.5;
    tc.n_cycles = 1'000'000;
    const auto aging = cfg.aging_model();
    const auto run = cycling::run_cycles(tc, cfg.device_model(), cfg.thermal_network(), aging, cfg.schedule());
    const auto& r = run.records;

    bool monotone = true;
    for (std::size_t k = 1; k < r.size(); ++k) monotone = monotone && r[k].r_ds_on >= r[k - 1].r_ds_on;

    const auto n_f = aging::cycles_to_failure(r, cfg.aging.failure);
    o.detail << "cycles " << r.size() << ", simulated " << run.simulated_cycles;
    o.require(monotone, "r_ds_on non-decreasing");
    o.require(n_f.has_value(), "failure reached within the run");
    if (!n_f) return;
    o.detail << ", failure at " << *n_f;

    const double r0 = r.front().r_ds_on;
    auto at = [&](double fraction) {
        const auto idx = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(*n_f)));
        return r[std::max<std::size_t>(idx, 1) - 1].r_ds_on;
    };
    const double early = at(0.1) / r0 - 1.0;
    bool accelerating = true;
    double prev = -1.0;
    for (int k = 0; k < 10; ++k) {
        const double inc = (k == 0 ? at(0.1) - r0 : at(0.1 * (k + 1)) - at(0.1 * k));
        accelerating = accelerating && inc >= prev;
        prev = inc;
    }
    o.detail << ", early rise " << early;
    o.require(early < 0.1 * cfg.aging.failure.threshold, "early rise < 10% of threshold");
    o.require(accelerating, "per-decile increments non-decreasing");
}

void dpt_oracle(Outcome& o) {
    double worst_energy = 0.0;
    double worst_current = 0.0;
    for (double v : {50.0, 600.0, 800.0}) {
        for (double t : {20e-9, 50e-9, 120e-9}) {
            losses::DptConfig cfg;
            cfg.v_dc = v;
            cfg.t_rise = t;
            cfg.t_fall = 1.5 * t;
            const auto r = losses::dpt_energies(cfg, 1000);
            const double i = v * cfg.first_pulse / cfg.inductance;
            worst_current = std::max(worst_current, std::abs(r.energies.i_test - i) / i);
            const double e_on = 0.5 * v * i * cfg.t_rise;
            const double e_off = 0.5 * v * i * cfg.t_fall;
            worst_energy = std::max(worst_energy, std::abs(losses::integrate_energy(r.turn_on()) - e_on) / e_on);
            worst_energy = std::max(worst_energy, std::abs(losses::integrate_energy(r.turn_off()) - e_off) / e_off);
        }
    }
    o.detail << "energy error " << worst_energy << ", current error " << worst_current;
    o.require(worst_energy <= 0.01, "trapezoid within 1%");
    o.require(worst_current <= 1e-12, "i_test within 1e-12");
}

void lifetime_fit(Outcome& o) {
    std::vector<aging::LifetimePoint> exact;
    for (double dt : {50.0, 100.0}) exact.push_back({dt, 1e14 * std::pow(dt, -5.0)});
    const auto f = aging::fit_coffin_manson(exact);
    const double e_a = std::abs(f.coefficient - 1e14) / 1e14;
    const double e_n = std::abs(f.exponent - 5.0) / 5.0;

    std::mt19937_64 rng(1234);
    std::normal_distribution<double> z;
    std::vector<aging::LifetimePoint> noisy;
    for (int i = 0; i < 10; ++i) {
        const double dt = 40.0 + 10.0 * i;
        noisy.push_back({dt, 1e14 * std::pow(dt, -5.0) * std::exp(0.05 * z(rng))});
    }
    const auto g = aging::fit_coffin_manson(noisy);
    const double e_noise = std::abs(g.exponent - 5.0) / 5.0;
    o.detail << "exact (" << e_a << ", " << e_n << "), noisy exponent " << g.exponent;
    o.require(e_a <= 1e-9 && e_n <= 1e-9, "exact recovery within 1e-9");
    o.require(e_noise <= 0.10, "noisy exponent within 10%");
}

void end_to_end(Outcome& o) {
    auto cfg = bench_config();
    cfg.cycling.i_pulse = 2.5;
    cfg.cycling.n_cycles = 120'000;
    cfg.aging.electrical_feedback = false;
    cfg.aging.degradation.alpha = cfg.aging.failure.threshold;
    const auto rep = cycling::representative_cycle(cfg.test_config(), cfg.device_model(), cfg.thermal_network(),
                                                   cfg.schedule());
    cfg.aging.degradation.delta_t_ref = rep.t_j_peak - rep.t_j_min;

    const auto dir = scratch("end_to_end");
    const auto summary = io::run_cycle(cfg, {dir, std::nullopt});
    const auto& n_f = summary["results"]["cycles_to_failure"];
    o.require(n_f.is_number(), "failure reported");
    if (!n_f.is_number()) return;
    const double n = n_f.get<double>();
    o.detail << "reference swing " << cfg.aging.degradation.delta_t_ref << " K, failure at " << n;
    o.require(std::abs(n - cfg.aging.degradation.n0) <= 1.0, "n0 +/- 1 cycle");
}

void determinism(Outcome& o) {
    auto cfg = bench_config();
    cfg.cycling.i_pulse = 3.0;
    cfg.cycling.n_cycles = 20'000;
    cfg.sweep.delta_tj = {80.0, 100.0};
    cfg.lifetime.points = {{50.0, 8e5}, {80.0, 1e5}, {100.0, 3e4}};
    cfg.lifetime.noise = 0.05;

    using Runner = io::Summary (*)(const io::RunConfig&, const io::CommandOptions&);
    const std::pair<const char*, Runner> commands[] = {
        {"iv-sweep", io::run_iv_sweep}, {"dpt", io::run_dpt},     {"cycle", io::run_cycle},
        {"solve-amplitude", io::run_solve_amplitude}, {"sweep", io::run_sweep}, {"fit-lifetime", io::run_fit_lifetime},
    };
    std::size_t files = 0;
    for (const auto& [name, run] : commands) {
        const auto a = scratch(std::string("det_a_") + name);
        const auto b = scratch(std::string("det_b_") + name);
        (void)run(cfg, {a, 7});
        (void)run(cfg, {b, 7});
        for (const auto& entry : fs::recursive_directory_iterator(a)) {
            if (!entry.is_regular_file()) continue;
            const auto rel = fs::relative(entry.path(), a);
            ++files;
            if (!fs::exists(b / rel) || io::read_text_file(entry.path()) != io::read_text_file(b / rel)) {
                o.require(false, std::string(name) + "/" + rel.string() + " differs");
            }
        }
    }
    o.detail << files << " files compared";
    o.require(files > 10, "outputs were produced");
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"Device equations: continuity, flatness, reciprocal slope", 1.0, device_equations},
        {"Thermal fixed point and exponential step", 1.0, thermal_fixed_point},
        {"Amplitude table: monotone and calibrated within 0.25 A", 10.0, amplitude_table},
        {"Representative cycle shape", 1.0, cycle_shape},
        {"R_DS(on) drift shape over a 1e6-cycle run", 5.0, drift_shape},
        {"Double-pulse test oracle", 1.0, dpt_oracle},
        {"Coffin-Manson round trip", 1.0, lifetime_fit},
        {"End-to-end failure at n0", 5.0, end_to_end},
        {"Byte-identical reruns", 0.0, determinism},
    };

    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && elapsed >= c.time_limit_s) {
            o.require(false, "runtime " + std::to_string(elapsed) + " s over " + std::to_string(c.time_limit_s) + " s");
        }
        if (!o.ok) ++failures;
        std::printf("[%s] %d. %s (%.3f s): %s\n", o.ok ? "PASS" : "FAIL", index, c.name, elapsed,
                    o.detail.str().c_str());
    }
    std::printf("%d/%zu criteria passed\n", index - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
