/**
 * @file device_model.hpp
 * @brief Static behavioral model of a SiC power MOSFET.
 *
 * Square-law channel model with three operating regions:
 *   Cutoff      v_gs <= V_T
 *   Linear      v_ds <  v_gs - V_T      I_D = k/2 * (2 (v_gs - V_T) v_ds - v_ds^2)
 *   Saturation  v_ds >= v_gs - V_T      I_D = k/2 * (v_gs - V_T)^2
 *
 * with k = mu * (W/L) * C_ox. Mobility follows a power law in temperature and
 * the threshold voltage drifts linearly, both referenced to DeviceParams::t_ref.
 * All temperatures are kelvin.
 */
#pragma once

#include <span>
#include <string_view>

namespace pcbench::device {

struct DeviceParams {
    double mu = 1.0;         ///< channel mobility at t_ref (m^2/V.s)
    double w_channel = 1.0;  ///< channel width (m)
    double l_channel = 1.0;  ///< channel length (m)
    double c_ox = 1.0;       ///< gate capacitance per area (F/m^2)
    double v_t = 0.0;        ///< threshold voltage at t_ref (V)
    double t_ref = 298.15;   ///< reference temperature (K)

    /// Lumped transconductance factor k = mu * W/L * C_ox (A/V^2).
    [[nodiscard]] double gain() const noexcept { return mu * w_channel / l_channel * c_ox; }

    /// Unit geometry (W = L = 1 m, C_ox = 1 F/m^2) so that mu carries the lumped k.
    [[nodiscard]] static DeviceParams from_gain(double k, double v_t, double t_ref);

    void validate() const;

    bool operator==(const DeviceParams&) const = default;
};

struct TempCoefficients {
    double mu_exponent = 2.5;  ///< mu(T) = mu_ref * (T/T_ref)^-n
    double vt_slope = -5e-3;   ///< V_T(T) = V_T_ref + slope * (T - T_ref), V/K

    void validate() const;

    bool operator==(const TempCoefficients&) const = default;
};

/// A device card: electrical parameters plus their temperature laws.
struct DeviceModel {
    DeviceParams params;
    TempCoefficients coeffs;

    bool operator==(const DeviceModel&) const = default;
};

struct OperatingPoint {
    double v_gs = 0.0;
    double v_ds = 0.0;
    double t_j = 298.15;
};

enum class Region { Cutoff, Linear, Saturation };

[[nodiscard]] std::string_view to_string(Region region) noexcept;

/// Temperature-scaled gain and threshold.
struct ScaledParams {
    double k;
    double v_t;
};

[[nodiscard]] ScaledParams apply_temperature(const DeviceParams& params, const TempCoefficients& coeffs,
                                             double t_j);

[[nodiscard]] Region region_of(const DeviceParams& params, const TempCoefficients& coeffs,
                               const OperatingPoint& op);

[[nodiscard]] double drain_current(const DeviceParams& params, const TempCoefficients& coeffs,
                                   const OperatingPoint& op);

/// Small-signal channel resistance at v_ds -> 0+, 1 / (k (v_gs - V_T)).
/// Throws std::domain_error when the gate is not above threshold.
[[nodiscard]] double on_resistance(const DeviceParams& params, const TempCoefficients& coeffs, double v_gs,
                                   double t_j);

/// Saturation onset v_gs - V_T. Throws std::domain_error below threshold.
[[nodiscard]] double pinch_off(const DeviceParams& params, const TempCoefficients& coeffs, double v_gs,
                               double t_j);

// Convenience overloads taking a full card.
[[nodiscard]] inline double drain_current(const DeviceModel& d, const OperatingPoint& op) {
    return drain_current(d.params, d.coeffs, op);
}
[[nodiscard]] inline double on_resistance(const DeviceModel& d, double v_gs, double t_j) {
    return on_resistance(d.params, d.coeffs, v_gs, t_j);
}

// ---------------------------------------------------------------------------
// Parameter extraction from measured or digitized IV points.

struct IvPoint {
    double v_gs;
    double v_ds;
    double i_d;
    double t_j;  ///< K
};

/// Optional physical geometry. k is split into mu using W/L and C_ox.
struct Geometry {
    double w_channel = 1.0;
    double l_channel = 1.0;
    double c_ox = 1.0;
};

struct DeviceFit {
    DeviceParams params;  ///< mu = k / (W/L * C_ox) under the supplied geometry
    double k;             ///< lumped gain at t_ref (A/V^2)
    double v_t;           ///< threshold at t_ref (V)
    double rms_residual;  ///< sqrt(mean squared current residual), A
};

/// Least-squares fit of (k, V_T) at the reference temperature.
///
/// The current model is linear in k for a fixed V_T, so k is eliminated in
/// closed form and the remaining one-dimensional residual in V_T is scanned
/// and then refined with Brent's method. Points at other temperatures are
/// mapped through `coeffs`.
///
/// Throws std::invalid_argument for fewer than 4 points, a single gate
/// voltage, or a point set whose fitted partition lies in one region only.
[[nodiscard]] DeviceFit fit_parameters(std::span<const IvPoint> points, const TempCoefficients& coeffs = {},
                                       double t_ref = 298.15, const Geometry& geometry = {});

}  // namespace pcbench::device
