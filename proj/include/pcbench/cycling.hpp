/**
 * @file cycling.hpp
 * @brief The power-cycling bench: gate scheduling, coupled electro-thermal
 *        cycle simulation with T_j,max guarding, and pulse-amplitude solving.
 *
 * Time stepping is two-tier. Inside a cycle the thermal stages are advanced
 * with exact exponential sub-steps (at most min(tau)/10 long), and the
 * dissipation is evaluated from the junction temperature at the start of each
 * sub-step. Across cycles, once the thermal state is periodic the last
 * simulated cycle is reused, and only re-simulated when the R_DS(on) aging
 * multiplier has moved by more than EngineOptions::reuse_tolerance.
 *
 * Only switch 1 (device index 0) is simulated. The devices are thermally
 * decoupled through the ideal case boundary, so every DUT sees the same cycle
 * shifted by its phase.
 */
#pragma once

#include "pcbench/aging.hpp"
#include "pcbench/cycle_record.hpp"
#include "pcbench/device_model.hpp"
#include "pcbench/losses.hpp"
#include "pcbench/thermal_model.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace pcbench::cycling {

enum class Mode {
    ProposedComplementary,  ///< DUTs switch their own load current in staggered windows
    ClassicConductionOnly,  ///< DUT gate held on, an external switch gates the load current
};

[[nodiscard]] std::string_view to_string(Mode mode) noexcept;
/// Accepts "proposed" or "classic". Throws std::invalid_argument otherwise.
[[nodiscard]] Mode mode_from_string(std::string_view name);

class PulseSchedule {
public:
    PulseSchedule(double period, double on_time, std::size_t n_devices, Mode mode, std::vector<double> phases);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] double on_time() const noexcept { return on_time_; }
    [[nodiscard]] double off_time() const noexcept { return period_ - on_time_; }
    [[nodiscard]] std::size_t n_devices() const noexcept { return phases_.size(); }
    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    /// Start of the device's conduction window within a period.
    [[nodiscard]] double phase(std::size_t device) const { return phases_.at(device); }

    /// Gate envelope of the DUT at time t (s). In proposed mode the envelope
    /// carries the f_sw gate pulses; in classic mode it is constantly high.
    [[nodiscard]] bool gate_on(std::size_t device, double t) const;
    /// Whether load current flows through the device at time t.
    [[nodiscard]] bool load_on(std::size_t device, double t) const;

private:
    [[nodiscard]] bool in_window(std::size_t device, double t) const;

    double period_;
    double on_time_;
    Mode mode_;
    std::vector<double> phases_;
};

/// Device k's window starts at k * period / n in proposed mode; all windows
/// coincide in classic mode. Rejects duty * n > 1 in proposed mode.
[[nodiscard]] PulseSchedule make_schedule(double period, double duty, std::size_t n_devices, Mode mode);

struct TestConfig {
    double v_dc = 50.0;        ///< V
    double i_pulse = 0.0;      ///< A
    double v_gs = 20.0;        ///< gate drive during conduction, V
    double t_c = 298.15;       ///< K
    double t_j_max = 448.15;   ///< K
    double f_sw = 0.0;         ///< Hz, gate pulse rate inside the on-window
    std::size_t n_cycles = 0;
    losses::SwitchingEnergies switching;  ///< reference energies from the DPT

    void validate() const;
};

struct AgingModel {
    aging::DegradationParams degradation;
    aging::ClampConfig clamp;
    /// When false the aging multiplier is reported but does not raise the dissipation.
    bool electrical_feedback = true;
};

struct EngineOptions {
    std::size_t min_substeps = 20;        ///< per on- or off-window
    double settle_tolerance = 1e-9;       ///< K, max stage change over one cycle
    double reuse_tolerance = 1e-6;        ///< relative multiplier drift before re-simulating
    double divergence_limit = 1273.15;    ///< K, junction temperature treated as runaway
    std::size_t max_settle_cycles = 1'000'000;
};

/// Thrown when the electro-thermal feedback drives T_j past the divergence limit.
class ThermalRunaway : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TracePoint {
    double t;    ///< s from the start of the device's window
    double t_j;  ///< K
};

struct CycleResult {
    double t_j_peak = 0.0;
    double t_j_min = 0.0;
    std::vector<double> end_rises;
    std::vector<TracePoint> trace;
    bool settled = false;
};

/// Dissipation during the conduction window at junction temperature t_j.
[[nodiscard]] double window_power(const TestConfig& cfg, const device::DeviceModel& device, Mode mode,
                                  double t_j, double r_multiplier = 1.0);

/// Periodic steady-state cycle (with trace) for a pristine or aged device.
[[nodiscard]] CycleResult representative_cycle(const TestConfig& cfg, const device::DeviceModel& device,
                                               const thermal::ThermalNetwork& thermal,
                                               const PulseSchedule& schedule, double r_multiplier = 1.0,
                                               const EngineOptions& opts = {});

struct CycleRun {
    std::vector<CycleRecord> records;
    aging::AgingState final_state;
    std::size_t simulated_cycles = 0;  ///< cycles integrated in detail
};

/// Runs cfg.n_cycles cycles from a cold start. Invalid cycles are recorded
/// but do not age the device. Throws ThermalRunaway on divergence.
[[nodiscard]] CycleRun run_cycles(const TestConfig& cfg, const device::DeviceModel& device,
                                  const thermal::ThermalNetwork& thermal, const AgingModel& aging,
                                  const PulseSchedule& schedule, const EngineOptions& opts = {});

struct SolveOptions {
    double tolerance_k = 0.01;
    std::size_t max_iterations = 200;
    double max_current = 1.0e6;
};

struct AmplitudeSolution {
    double t_c;       ///< K
    double i_pulse;   ///< A
    double r_ds_on;   ///< at T_j,max, Ohm
    double r_load;    ///< series resistor giving i_pulse from v_dc, Ohm (inf at zero current)
    double t_j_peak;  ///< K
};

/// Bisection on i_pulse so that the steady-cycling peak equals cfg.t_j_max.
/// cfg.i_pulse is ignored.
[[nodiscard]] AmplitudeSolution solve_pulse_amplitude(const TestConfig& cfg, const device::DeviceModel& device,
                                                      const thermal::ThermalNetwork& thermal,
                                                      const PulseSchedule& schedule, const SolveOptions& solve = {},
                                                      const EngineOptions& opts = {});

/// Solves each case temperature concurrently; results follow the input order.
[[nodiscard]] std::vector<AmplitudeSolution> solve_amplitude_table(const TestConfig& cfg,
                                                                   const device::DeviceModel& device,
                                                                   const thermal::ThermalNetwork& thermal,
                                                                   const PulseSchedule& schedule,
                                                                   std::span<const double> case_temperatures,
                                                                   const SolveOptions& solve = {},
                                                                   const EngineOptions& opts = {});

/// Pulse current whose steady-cycling swing equals target_swing (K).
[[nodiscard]] double solve_current_for_swing(const TestConfig& cfg, const device::DeviceModel& device,
                                             const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                                             double target_swing, const SolveOptions& solve = {},
                                             const EngineOptions& opts = {});

/// Load current set by a series resistor: v_dc / (r_load + R_DS(on)(T_c)).
[[nodiscard]] double current_from_series_resistance(const TestConfig& cfg, const device::DeviceModel& device,
                                                    double r_load);

// ---------------------------------------------------------------------------
// Calibration of the bench against a tabulated amplitude-vs-case-temperature set.

struct AmplitudeTarget {
    double t_c;      ///< K
    double i_pulse;  ///< A
};

struct AmplitudeCalibration {
    double r_theta_ja;            ///< K/W, total of the scaled network
    double f_sw;                  ///< Hz
    std::vector<double> currents; ///< solver outputs at the calibrated point
    double max_abs_error;         ///< A
    std::size_t evaluations;
};

/// Pattern search (axes and diagonals) in (ln R_thJA, ln f_sw) minimizing the worst absolute
/// current error over the targets. The network's stage proportions and time
/// constants, the device card and the schedule stay fixed.
[[nodiscard]] AmplitudeCalibration calibrate_amplitude_table(const TestConfig& cfg,
                                                             const device::DeviceModel& device,
                                                             const thermal::ThermalNetwork& thermal,
                                                             const PulseSchedule& schedule,
                                                             std::span<const AmplitudeTarget> targets,
                                                             double r_theta_start, double f_sw_start);

/// Worst absolute error of the solver against the targets at the given network and f_sw.
[[nodiscard]] double amplitude_table_error(const TestConfig& cfg, const device::DeviceModel& device,
                                           const thermal::ThermalNetwork& thermal, const PulseSchedule& schedule,
                                           std::span<const AmplitudeTarget> targets,
                                           std::vector<double>* currents = nullptr, const SolveOptions& solve = {});

}  // namespace pcbench::cycling
