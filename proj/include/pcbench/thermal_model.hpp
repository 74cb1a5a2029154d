/**
 * @file thermal_model.hpp
 * @brief Junction temperature: steady-state Tj = Tc + P * R_thJA and a Foster
 *        stage network whose fixed point is that steady state.
 *
 * Each stage i obeys d(theta_i)/dt = (P * R_i - theta_i) / tau_i and is
 * advanced with its exact exponential solution, so a step of any length is
 * exact for piecewise-constant power. The case node is an ideal boundary.
 */
#pragma once

#include <span>
#include <vector>

namespace pcbench::thermal {

struct Stage {
    double r_theta;  ///< K/W
    double tau;      ///< s

    bool operator==(const Stage&) const = default;
};

class ThermalNetwork {
public:
    /// Throws std::invalid_argument for an empty network or non-positive stage values.
    ThermalNetwork(std::vector<Stage> stages, double t_case);

    static ThermalNetwork single_stage(double r_theta_ja, double tau, double t_case) {
        return ThermalNetwork({{r_theta_ja, tau}}, t_case);
    }

    [[nodiscard]] std::span<const Stage> stages() const noexcept { return stages_; }
    [[nodiscard]] std::size_t size() const noexcept { return stages_.size(); }
    [[nodiscard]] double t_case() const noexcept { return t_case_; }
    [[nodiscard]] double min_tau() const noexcept;
    [[nodiscard]] double max_tau() const noexcept;

    [[nodiscard]] ThermalNetwork with_case_temperature(double t_case) const { return {stages_, t_case}; }

    /// Same time constants, resistances scaled so they sum to r_theta_ja.
    [[nodiscard]] ThermalNetwork with_total_resistance(double r_theta_ja) const;

    bool operator==(const ThermalNetwork&) const = default;

private:
    std::vector<Stage> stages_;
    double t_case_;
};

struct ThermalState {
    std::vector<double> stage_rises;  ///< K above case
    double t_j = 0.0;                 ///< K

    [[nodiscard]] static ThermalState at_rest(const ThermalNetwork& network) {
        return {std::vector<double>(network.size(), 0.0), network.t_case()};
    }
};

[[nodiscard]] double steady_state_tj(double t_c, double p_cond, double p_switch, double r_theta_ja);

[[nodiscard]] double network_total_resistance(const ThermalNetwork& network) noexcept;

/// Exact update over dt with constant power. Throws for dt <= 0 or power < 0.
[[nodiscard]] ThermalState thermal_step(const ThermalNetwork& network, const ThermalState& state, double power,
                                        double dt);

/// Precomputed per-stage coefficients for a fixed step length, used by the
/// cycling engine's inner loop.
class FixedStep {
public:
    FixedStep(const ThermalNetwork& network, double dt);

    /// Advances stage rises in place and returns the new total rise.
    double advance(std::span<double> rises, double power) const noexcept;

    [[nodiscard]] double dt() const noexcept { return dt_; }

private:
    double dt_;
    std::vector<double> decay_;  // exp(-dt/tau)
    std::vector<double> gain_;   // R * (1 - exp(-dt/tau))
};

}  // namespace pcbench::thermal
