/**
 * @file losses.hpp
 * @brief Conduction and switching losses, and a simulated double-pulse test.
 *
 * The double-pulse test charges an ideal inductor through the DUT during the
 * first pulse (i = V t / L), turns off at that current, lets it freewheel
 * through the upper diode, and turns on again at the same current. Each
 * transition of duration t is a clamped-inductive hard switch: one quantity
 * moves linearly over the first half while the other is held, then the other
 * moves over the second half. The v*i product is a triangle of area
 * V * I * t / 2.
 */
#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace pcbench::losses {

struct SwitchingEnergies {
    double e_on = 0.0;    ///< J
    double e_off = 0.0;   ///< J
    double i_test = 0.0;  ///< A
    double v_dc = 0.0;    ///< V

    bool operator==(const SwitchingEnergies&) const = default;
};

struct DptConfig {
    double v_dc = 600.0;
    double inductance = 600e-6;
    double first_pulse = 20e-6;
    double t_rise = 50e-9;  ///< turn-on transition time
    double t_fall = 50e-9;  ///< turn-off transition time
    double off_time = 5e-6;
    double second_pulse = 5e-6;
    double current_limit = std::numeric_limits<double>::infinity();

    void validate() const;

    bool operator==(const DptConfig&) const = default;
};

struct WaveformSample {
    double t;     ///< s
    double v_ds;  ///< V
    double i_d;   ///< A
};

struct DptResult {
    SwitchingEnergies energies;
    std::vector<WaveformSample> waveform;  ///< whole test, time ordered
    std::size_t turn_off_begin = 0, turn_off_end = 0;  ///< sample range [begin, end)
    std::size_t turn_on_begin = 0, turn_on_end = 0;

    [[nodiscard]] std::span<const WaveformSample> turn_off() const {
        return std::span(waveform).subspan(turn_off_begin, turn_off_end - turn_off_begin);
    }
    [[nodiscard]] std::span<const WaveformSample> turn_on() const {
        return std::span(waveform).subspan(turn_on_begin, turn_on_end - turn_on_begin);
    }
};

[[nodiscard]] double conduction_loss(double i_d, double r_ds_on);

/// Throws std::invalid_argument on an invalid config or when the test current
/// exceeds cfg.current_limit. samples_per_transition is rounded up to even.
[[nodiscard]] DptResult dpt_energies(const DptConfig& cfg, std::size_t samples_per_transition = 1000);

[[nodiscard]] double switching_loss(const SwitchingEnergies& energies, double f_sw);

/// Energies at another operating point, linear in bus voltage and current.
[[nodiscard]] SwitchingEnergies scale_energies(const SwitchingEnergies& ref, double v_dc, double i_d);

/// Trapezoidal integral of v_ds * i_d over the samples (J).
[[nodiscard]] double integrate_energy(std::span<const WaveformSample> samples) noexcept;

}  // namespace pcbench::losses
