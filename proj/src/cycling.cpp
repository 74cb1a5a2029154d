#include "pcbench/cycling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <string>

namespace pcbench::cycling {

std::string_view to_string(Mode mode) noexcept {
    return mode == Mode::ProposedComplementary ? "proposed" : "classic";
}

Mode mode_from_string(std::string_view name) {
    if (name == "proposed") return Mode::ProposedComplementary;
    if (name == "classic") return Mode::ClassicConductionOnly;
    throw std::invalid_argument("unknown cycling mode '" + std::string(name) + "' (expected proposed|classic)");
}

PulseSchedule::PulseSchedule(double period, double on_time, std::size_t n_devices, Mode mode,
                             std::vector<double> phases)
    : period_(period), on_time_(on_time), mode_(mode), phases_(std::move(phases)) {
    if (!(period_ > 0.0)) throw std::invalid_argument("schedule: period must be > 0");
    if (!(on_time_ > 0.0 && on_time_ < period_)) throw std::invalid_argument("schedule: need 0 < on_time < period");
    if (n_devices == 0 || phases_.size() != n_devices) throw std::invalid_argument("schedule: bad device count");
}

bool PulseSchedule::in_window(std::size_t device, double t) const {
    double local = std::fmod(t, period_);
    if (local < 0.0) local += period_;
    const double start = phase(device);
    return local >= start && local < start + on_time_;
}

bool PulseSchedule::gate_on(std::size_t device, double t) const {
    if (mode_ == Mode::ClassicConductionOnly) {
        (void)phase(device);
        return true;
    }
    return in_window(device, t);
}

bool PulseSchedule::load_on(std::size_t device, double t) const { return in_window(device, t); }

PulseSchedule make_schedule(double period, double duty, std::size_t n_devices, Mode mode) {
    if (!(duty > 0.0 && duty < 1.0)) throw std::invalid_argument("schedule: duty must be in (0, 1)");
    if (n_devices == 0) throw std::invalid_argument("schedule: n_devices must be >= 1");
    if (mode == Mode::ProposedComplementary && duty * static_cast<double>(n_devices) > 1.0) {
        throw std::invalid_argument("schedule: duty * n_devices > 1 would overlap conduction windows");
    }
    std::vector<double> phases(n_devices, 0.0);
    if (mode == Mode::ProposedComplementary) {
        for (std::size_t k = 0; k < n_devices; ++k) {
            phases[k] = static_cast<double>(k) * period / static_cast<double>(n_devices);
        }
    }
    return {period, duty * period, n_devices, mode, std::move(phases)};
}

void TestConfig::validate() const {
    if (!(v_dc > 0.0)) throw std::invalid_argument("cycling: v_dc must be > 0");
    if (!(i_pulse >= 0.0)) throw std::invalid_argument("cycling: i_pulse must be >= 0");
    if (!(t_c > 0.0)) throw std::invalid_argument("cycling: t_c must be > 0 K");
    if (!(t_j_max > t_c)) throw std::invalid_argument("cycling: t_j_max must exceed t_c");
    if (!(f_sw >= 0.0)) throw std::invalid_argument("cycling: f_sw must be >= 0");
}

double window_power(const TestConfig& cfg, const device::DeviceModel& device, Mode mode, double t_j,
                    double r_multiplier) {
    if (cfg.i_pulse == 0.0) return 0.0;
    const double r = device::on_resistance(device, cfg.v_gs, t_j) * r_multiplier;
    double p = losses::conduction_loss(cfg.i_pulse, r);
    if (mode == Mode::ProposedComplementary) {
        p += losses::switching_loss(losses::scale_energies(cfg.switching, cfg.v_dc, cfg.i_pulse), cfg.f_sw);
    }
    return p;
}

namespace {

std::size_t substeps(double window, double max_dt, std::size_t min_steps) {
    const double n = std::ceil(window / max_dt);
    return std::max(min_steps, static_cast<std::size_t>(n));
}

class CycleSimulator {
public:
    CycleSimulator(const TestConfig& cfg, const device::DeviceModel& device, const thermal::ThermalNetwork& thermal,
                   const PulseSchedule& schedule, const EngineOptions& opts)
        : cfg_(cfg),
          device_(device),
          network_(thermal.with_case_temperature(cfg.t_c)),
          mode_(schedule.mode()),
          opts_(opts),
          n_on_(substeps(schedule.on_time(), network_.min_tau() / 10.0, opts.min_substeps)),
          n_off_(substeps(schedule.off_time(), network_.min_tau() / 10.0, opts.min_substeps)),
          on_(network_, schedule.on_time() / static_cast<double>(n_on_)),
          off_(network_, schedule.off_time() / static_cast<double>(n_off_)) {}

    [[nodiscard]] const thermal::ThermalNetwork& network() const noexcept { return network_; }

    /// One full cycle starting from `rises`, which is advanced in place.
    CycleResult simulate(std::vector<double>& rises, double multiplier, bool keep_trace) const {
        CycleResult out;
        const std::vector<double> start = rises;
        double total = 0.0;
        for (double r : rises) total += r;
        double tj = network_.t_case() + total;
        out.t_j_peak = out.t_j_min = tj;
        if (keep_trace) {
            out.trace.reserve(n_on_ + n_off_ + 1);
            out.trace.push_back({0.0, tj});
        }
        for (std::size_t j = 0; j < n_on_; ++j) {
            const double p = window_power(cfg_, device_, mode_, tj, multiplier);
            tj = network_.t_case() + on_.advance(rises, p);
            record(out, tj, on_.dt() * static_cast<double>(j + 1), keep_trace);
        }
        const double t_on = on_.dt() * static_cast<double>(n_on_);
        for (std::size_t j = 0; j < n_off_; ++j) {
            tj = network_.t_case() + off_.advance(rises, 0.0);
            record(out, tj, t_on + off_.dt() * static_cast<double>(j + 1), keep_trace);
        }
        double drift = 0.0;
        for (std::size_t i = 0; i < rises.size(); ++i) drift = std::max(drift, std::abs(rises[i] - start[i]));
        out.settled = drift <= opts_.settle_tolerance;
        out.end_rises = rises;
        return out;
    }

    /// Per-stage periodic start values for a constant window power.
    [[nodiscard]] std::vector<double> periodic_start(double power) const {
        std::vector<double> rises;
        const double t_on = on_.dt() * static_cast<double>(n_on_);
        const double t_off = off_.dt() * static_cast<double>(n_off_);
        for (const auto& s : network_.stages()) {
            const double a = std::exp(-t_on / s.tau);
            const double b = std::exp(-t_off / s.tau);
            rises.push_back(power * s.r_theta * (1.0 - a) * b / (1.0 - a * b));
        }
        return rises;
    }

private:
    void record(CycleResult& out, double tj, double t, bool keep_trace) const {
        if (!std::isfinite(tj) || tj > opts_.divergence_limit) {
            std::ostringstream msg;
            msg << "thermal runaway: T_j reached " << tj << " K (limit " << opts_.divergence_limit
                << " K) at i_pulse=" << cfg_.i_pulse << " A, t_c=" << cfg_.t_c
                << " K; R_DS(on) temperature feedback has no stable operating point";
            throw ThermalRunaway(msg.str());
        }
        out.t_j_peak = std::max(out.t_j_peak, tj);
        out.t_j_min = std::min(out.t_j_min, tj);
        if (keep_trace) out.trace.push_back({t, tj});
    }

    const TestConfig& cfg_;
    const device::DeviceModel& device_;
    thermal::ThermalNetwork network_;
    Mode mode_;
    EngineOptions opts_;
    std::size_t n_on_;
    std::size_t n_off_;
    thermal::FixedStep on_;
    thermal::FixedStep off_;
};

}  // namespace

CycleResult representative_cycle(const TestConfig& cfg, const device::DeviceModel& device,
                                 const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                                 double r_multiplier, const EngineOptions& opts) {
    const CycleSimulator sim(cfg, device, thermal, schedule, opts);

    // Warm start from the constant-power periodic solution at an estimated
    // window temperature, then settle the coupled cycle by plain iteration.
    double t_est = cfg.t_c;
    std::vector<double> rises;
    for (int pass = 0; pass < 3; ++pass) {
        const double p = window_power(cfg, device, schedule.mode(), std::min(t_est, opts.divergence_limit),
                                      r_multiplier);
        rises = sim.periodic_start(p);
        double peak = 0.0;
        for (std::size_t i = 0; i < rises.size(); ++i) {
            const auto& s = sim.network().stages()[i];
            const double a = std::exp(-schedule.on_time() / s.tau);
            peak += rises[i] * a + p * s.r_theta * (1.0 - a);
        }
        t_est = cfg.t_c + peak;
    }
    if (!std::isfinite(t_est) || t_est > opts.divergence_limit) {
        rises.assign(rises.size(), 0.0);
    }

    for (std::size_t n = 0; n < opts.max_settle_cycles; ++n) {
        auto before = rises;
        auto res = sim.simulate(rises, r_multiplier, false);
        if (res.settled) {
            rises = std::move(before);
            return sim.simulate(rises, r_multiplier, true);
        }
    }
    throw std::runtime_error("representative_cycle: no periodic steady state within max_settle_cycles");
}

CycleRun run_cycles(const TestConfig& cfg, const device::DeviceModel& device, const thermal::ThermalNetwork& thermal,
                    const AgingModel& aging, const PulseSchedule& schedule, const EngineOptions& opts) {
    cfg.validate();
    aging.degradation.validate();
    aging.clamp.validate();

    const CycleSimulator sim(cfg, device, thermal, schedule, opts);
    const double r_reference = device::on_resistance(device, cfg.v_gs, cfg.t_c);

    CycleRun run;
    run.records.reserve(cfg.n_cycles);
    std::vector<double> rises(sim.network().size(), 0.0);
    aging::AgingState state;

    CycleResult cached;
    bool have_cached = false;
    double multiplier_simulated = 1.0;

    for (std::size_t c = 1; c <= cfg.n_cycles; ++c) {
        const double multiplier = aging.electrical_feedback ? state.r_multiplier : 1.0;
        const bool stale = std::abs(multiplier - multiplier_simulated) > opts.reuse_tolerance * multiplier_simulated;
        if (!have_cached || !cached.settled || stale) {
            cached = sim.simulate(rises, multiplier, false);
            have_cached = true;
            multiplier_simulated = multiplier;
            ++run.simulated_cycles;
        }

        CycleRecord rec;
        rec.cycle_index = c;
        rec.t_j_peak = cached.t_j_peak;
        rec.t_j_min = cached.t_j_min;
        rec.delta_t_j = cached.t_j_peak - cached.t_j_min;
        rec.valid = rec.t_j_peak <= cfg.t_j_max;
        state = aging::apply_record(state, aging.degradation, rec);
        rec.r_ds_on = r_reference * state.r_multiplier;
        rec.v_ds_on_measured = aging::vds_on_measured(cfg.i_pulse * rec.r_ds_on, aging.clamp);
        run.records.push_back(rec);
    }
    run.final_state = state;
    return run;
}

double current_from_series_resistance(const TestConfig& cfg, const device::DeviceModel& device, double r_load) {
    if (!(r_load >= 0.0)) throw std::invalid_argument("cycling: r_load must be >= 0");
    return cfg.v_dc / (r_load + device::on_resistance(device, cfg.v_gs, cfg.t_c));
}

namespace {

// Generic monotone bisection: finds i with |f(i) - target| <= tol, f increasing.
template <class F>
double bisect_current(F&& f, double target, const SolveOptions& solve, const char* what) {
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > solve.max_current) {
            throw std::runtime_error(std::string(what) + ": cannot bracket the solution below max_current");
        }
    }
    double mid = 0.5 * (lo + hi);
    for (std::size_t it = 0; it < solve.max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = f(mid);
        if (std::abs(v - target) <= solve.tolerance_k) return mid;
        (v < target ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return mid;
}

}  // namespace

AmplitudeSolution solve_pulse_amplitude(const TestConfig& cfg, const device::DeviceModel& device,
                                        const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                                        const SolveOptions& solve, const EngineOptions& opts) {
    if (cfg.t_c > cfg.t_j_max) {
        throw std::invalid_argument("solve_pulse_amplitude: t_c above t_j_max, even zero current violates the limit");
    }
    const double r_hot = device::on_resistance(device, cfg.v_gs, cfg.t_j_max);
    if (cfg.t_c == cfg.t_j_max) {
        return {cfg.t_c, 0.0, r_hot, std::numeric_limits<double>::infinity(), cfg.t_c};
    }

    auto peak_at = [&](double i) {
        TestConfig probe = cfg;
        probe.i_pulse = i;
        try {
            return representative_cycle(probe, device, thermal, schedule, 1.0, opts).t_j_peak;
        } catch (const ThermalRunaway&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const double i = bisect_current(peak_at, cfg.t_j_max, solve, "solve_pulse_amplitude");
    return {cfg.t_c, i, r_hot, cfg.v_dc / i - r_hot, peak_at(i)};
}

std::vector<AmplitudeSolution> solve_amplitude_table(const TestConfig& cfg, const device::DeviceModel& device,
                                                     const thermal::ThermalNetwork& thermal,
                                                     const PulseSchedule& schedule,
                                                     std::span<const double> case_temperatures,
                                                     const SolveOptions& solve, const EngineOptions& opts) {
    std::vector<std::future<AmplitudeSolution>> jobs;
    jobs.reserve(case_temperatures.size());
    for (double t_c : case_temperatures) {
        jobs.push_back(std::async(std::launch::async, [&, t_c] {
            TestConfig c = cfg;
            c.t_c = t_c;
            return solve_pulse_amplitude(c, device, thermal, schedule, solve, opts);
        }));
    }
    std::vector<AmplitudeSolution> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

double solve_current_for_swing(const TestConfig& cfg, const device::DeviceModel& device,
                               const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                               double target_swing, const SolveOptions& solve, const EngineOptions& opts) {
    if (!(target_swing > 0.0)) throw std::invalid_argument("solve_current_for_swing: target swing must be > 0");
    auto swing_at = [&](double i) {
        TestConfig probe = cfg;
        probe.i_pulse = i;
        try {
            const auto r = representative_cycle(probe, device, thermal, schedule, 1.0, opts);
            return r.t_j_peak - r.t_j_min;
        } catch (const ThermalRunaway&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    return bisect_current(swing_at, target_swing, solve, "solve_current_for_swing");
}

double amplitude_table_error(const TestConfig& cfg, const device::DeviceModel& device,
                             const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                             std::span<const AmplitudeTarget> targets, std::vector<double>* currents,
                             const SolveOptions& solve) {
    std::vector<double> tcs;
    for (const auto& t : targets) tcs.push_back(t.t_c);
    const auto sol = solve_amplitude_table(cfg, device, thermal, schedule, tcs, solve);
    double worst = 0.0;
    if (currents) currents->clear();
    for (std::size_t i = 0; i < sol.size(); ++i) {
        worst = std::max(worst, std::abs(sol[i].i_pulse - targets[i].i_pulse));
        if (currents) currents->push_back(sol[i].i_pulse);
    }
    return worst;
}

AmplitudeCalibration calibrate_amplitude_table(const TestConfig& cfg, const device::DeviceModel& device,
                                               const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                                               std::span<const AmplitudeTarget> targets, double r_theta_start,
                                               double f_sw_start) {
    if (targets.empty()) throw std::invalid_argument("calibrate_amplitude_table: no targets");
    if (!(r_theta_start > 0.0) || !(f_sw_start > 0.0)) {
        throw std::invalid_argument("calibrate_amplitude_table: starting point must be positive");
    }
    SolveOptions fine;
    fine.tolerance_k = 1e-7;
    std::size_t evaluations = 0;
    auto objective = [&](double log_r, double log_f) {
        ++evaluations;
        TestConfig c = cfg;
        c.f_sw = std::exp(log_f);
        try {
            return amplitude_table_error(c, device, thermal.with_total_resistance(std::exp(log_r)), schedule, targets,
                                         nullptr, fine);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double x = std::log(r_theta_start);
    double y = std::log(f_sw_start);
    double best = objective(x, y);
    double step = std::log(2.0);
    constexpr std::array<std::array<double, 2>, 8> kDirections{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};
    while (step > 1e-6) {
        double bx = x, by = y, bv = best;
        for (const auto& d : kDirections) {
            const double v = objective(x + step * d[0], y + step * d[1]);
            if (v < bv) {
                bv = v;
                bx = x + step * d[0];
                by = y + step * d[1];
            }
        }
        if (bv < best) {
            x = bx;
            y = by;
            best = bv;
        } else {
            step *= 0.5;
        }
    }

    AmplitudeCalibration out;
    out.r_theta_ja = std::exp(x);
    out.f_sw = std::exp(y);
    TestConfig c = cfg;
    c.f_sw = out.f_sw;
    out.max_abs_error = amplitude_table_error(c, device, thermal.with_total_resistance(out.r_theta_ja), schedule,
                                              targets, &out.currents);
    out.evaluations = evaluations;
    return out;
}

}  // namespace pcbench::cycling
