/**
 * @file aging.hpp
 * @brief Cycle-driven R_DS(on) drift, the clamp-circuit V_DS(on) reading,
 *        end-of-life detection and the Coffin-Manson lifetime fit.
 *
 * Damage is counted in reference-equivalent cycles:
 *   n_eff += (dTj / dTj_ref)^m
 *   R_DS(on) / R_DS(on),0 = 1 + alpha * (n_eff / n0)^beta
 * With beta > 1 the drift is negligible early and accelerates late.
 */
#pragma once

#include "pcbench/cycle_record.hpp"

#include <optional>
#include <span>

namespace pcbench::aging {

struct DegradationParams {
    double alpha = 0.05;         ///< fractional increase at n0
    double n0 = 1.0e5;           ///< reference cycle count
    double beta = 3.0;           ///< shape exponent, > 1
    double delta_t_ref = 100.0;  ///< reference swing (K)
    double m = 4.0;              ///< swing acceleration exponent

    void validate() const;

    bool operator==(const DegradationParams&) const = default;
};

struct AgingState {
    double n_effective = 0.0;
    double r_multiplier = 1.0;

    bool operator==(const AgingState&) const = default;
};

/// Behavioral V_DS(on) clamp: passes the on-state voltage, clips the blocking voltage.
/// Default clamp level sits below the NPN/1N4148 sense stage's supply headroom.
struct ClampConfig {
    double v_clamp = 5.0;
    double v_offset = 0.0;

    void validate() const;

    bool operator==(const ClampConfig&) const = default;
};

struct FailureCriterion {
    double threshold = 0.05;  ///< fractional R_DS(on) increase marking end of life

    void validate() const;

    bool operator==(const FailureCriterion&) const = default;
};

[[nodiscard]] double rds_multiplier(const DegradationParams& params, double n_effective);

[[nodiscard]] AgingState accumulate_damage(const AgingState& state, const DegradationParams& params,
                                           double delta_t_j);

/// Applies a record's swing only when the record is valid.
[[nodiscard]] AgingState apply_record(const AgingState& state, const DegradationParams& params,
                                      const CycleRecord& record);

[[nodiscard]] double vds_on_measured(double v_ds_actual, const ClampConfig& clamp);

/// First valid record whose r_ds_on reaches (1 + threshold) times the first
/// valid record's value. std::nullopt when the run ends below threshold.
[[nodiscard]] std::optional<std::size_t> cycles_to_failure(std::span<const CycleRecord> records,
                                                           const FailureCriterion& criterion);

struct LifetimePoint {
    double delta_t_j;  ///< K
    double n_f;        ///< cycles

    bool operator==(const LifetimePoint&) const = default;
};

/// N_f = coefficient * dTj^-exponent
struct CoffinMansonFit {
    double coefficient;
    double exponent;
    double r_squared;

    [[nodiscard]] double cycles_at(double delta_t_j) const;
};

/// Ordinary least squares on (ln dTj, ln N_f). Throws std::invalid_argument on
/// non-positive values or fewer than two distinct swings.
[[nodiscard]] CoffinMansonFit fit_coffin_manson(std::span<const LifetimePoint> points);

}  // namespace pcbench::aging
